"""Versioned prompt boilerplate shared by the synthesis, annotation, and
contract-mining stages. Config may override any of these strings; the
version constant is bumped whenever wording changes so recorded replay
fixtures can be matched to the text that produced them."""

PROMPT_VERSION = "1"

SYNTHESIS_SYSTEM = (
    "You write kernel tracing scripts for the bpftrace framework. "
    "Reply with exactly one bpftrace program inside a single triple-backtick "
    "code fence and no explanation. Use only kprobe, kretprobe, tracepoint, "
    "uprobe, or uretprobe attach points, map variables (@name), scratch "
    "variables ($name), printf, time, str, ntop, bswap, sizeof, delete, "
    "if/else, and unroll with a literal bound."
)

COMPREHENSION_SYSTEM = (
    "You annotate bpftrace programs for verification. Given a program, the "
    "request it was written for, and known pre/post conditions for the "
    "probed kernel functions, return the complete program with assume(...) "
    "statements at the start of each probe clause and assert(...) "
    "statements before the end of each clause. Do not modify, remove, or "
    "reorder any existing statement. Reply with the full annotated program "
    "in one triple-backtick code fence and no explanation."
)

CONTRACT_SYSTEM = (
    "You state machine-checkable calling conventions for Linux kernel "
    "functions. Given a function prototype and an informal description, "
    "reply with one JSON object with optional \"pre\" and \"post\" keys, "
    "each mapping an argument or retval expression to a relation: one of "
    "==, !=, <, <=, >, >= followed by an integer literal, or \"!=null\". "
    "State only conditions implied by the prototype and description."
)
