"""Pre/post condition contracts for hookable kernel functions.

The on-disk form is one JSON object: each key is a probe key like
"kretprobe:tcp_connect_init", each value holds optional "pre" and "post"
objects mapping a subject expression ("sk", "sk->__sk_common.skc_num") to
a relation string ("!=null", ">=0", "==2"), plus optional free-text
"semantics" and "prototype". Files are written canonically: sorted keys,
single line, ", " and ": " separators, no trailing newline, so a
round-trip through load/save is byte-stable.

Lookups are fuzzy: an exact probe-key hit wins alone; otherwise every
contract whose target symbol shares a prefix with the queried target (in
either direction) is returned, best overlap first. That is what lets a
kprobe:tcp_connect query find a kretprobe:tcp_connect_init entry.

build_dataset mines contracts out of a C source corpus: a pattern scan
finds function definitions and the comment block directly above each one,
then an LLM is asked for solver-compatible conditions. Malformed replies
are skipped and reported, never fatal.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .lang.nodes import ProbeSpec
from .llm import ChatRequest, EmptyCompletion, complete, extract_code
from .prompts import CONTRACT_SYSTEM

_KEY_RE = re.compile(r"^(kprobe|kretprobe|tracepoint):\S+$")
_RELATION_RE = re.compile(r"^(==|!=|<=|>=|<|>)\s*(-?(?:0[xX][0-9a-fA-F]+|\d+))$")


class SchemaError(Exception):
    def __init__(self, key: str, reason: str):
        super().__init__(f"{key}: {reason}")
        self.key = key
        self.reason = reason


def parse_relation(relation: str) -> tuple[str, int] | None:
    """Split a relation string into (operator, literal); None when the
    relation falls outside the checkable grammar."""
    if relation == "!=null":
        return ("!=", 0)
    m = _RELATION_RE.match(relation.strip())
    if m is None:
        return None
    return (m.group(1), int(m.group(2), 0))


@dataclass(frozen=True)
class ConditionEntry:
    subject: str
    relation: str

    @property
    def checkable(self) -> bool:
        return parse_relation(self.relation) is not None


@dataclass(frozen=True)
class Contract:
    probe_key: str
    pre: tuple[ConditionEntry, ...] = ()
    post: tuple[ConditionEntry, ...] = ()
    semantics: str = ""
    prototype: str = ""

    @property
    def target(self) -> str:
        return self.probe_key.split(":", 1)[1]


@dataclass
class ContractStore:
    entries: dict[str, Contract] = field(default_factory=dict)
    source_path: str = ""

    def __len__(self) -> int:
        return len(self.entries)


def _conditions(key: str, value, which: str) -> tuple[ConditionEntry, ...]:
    if value is None:
        return ()
    if not isinstance(value, dict):
        raise SchemaError(key, f"{which} must be an object, got {type(value).__name__}")
    out = []
    for subject, relation in value.items():
        if not subject:
            raise SchemaError(key, f"{which} has an empty subject")
        if not isinstance(relation, str):
            raise SchemaError(key, f"{which}[{subject!r}] must be a string")
        out.append(ConditionEntry(subject, relation))
    return tuple(out)


def _contract_from_json(key: str, value) -> Contract:
    if not _KEY_RE.match(key):
        raise SchemaError(key, "probe key must be (kprobe|kretprobe|tracepoint):<symbol>")
    if not isinstance(value, dict):
        raise SchemaError(key, "contract value must be an object")
    known = {"pre", "post", "semantics", "prototype"}
    for extra in sorted(set(value) - known):
        raise SchemaError(key, f"unknown field {extra!r}")
    semantics = value.get("semantics", "")
    prototype = value.get("prototype", "")
    if not isinstance(semantics, str) or not isinstance(prototype, str):
        raise SchemaError(key, "semantics and prototype must be strings")
    return Contract(
        probe_key=key,
        pre=_conditions(key, value.get("pre"), "pre"),
        post=_conditions(key, value.get("post"), "post"),
        semantics=semantics,
        prototype=prototype,
    )


def loads(text: str, source_path: str = "") -> ContractStore:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError("<document>", f"invalid JSON: {exc}") from None
    if not isinstance(obj, dict):
        raise SchemaError("<document>", "top level must be a JSON object")
    store = ContractStore(source_path=source_path)
    for key, value in obj.items():
        if key in store.entries:
            raise SchemaError(key, "duplicate probe key")
        store.entries[key] = _contract_from_json(key, value)
    return store


def load(path) -> ContractStore:
    p = Path(path)
    return loads(p.read_text(encoding="utf-8"), source_path=str(p))


def dumps(store: ContractStore) -> str:
    obj = {}
    for key in sorted(store.entries):
        c = store.entries[key]
        entry = {}
        if c.pre:
            entry["pre"] = {e.subject: e.relation for e in c.pre}
        if c.post:
            entry["post"] = {e.subject: e.relation for e in c.post}
        if c.semantics:
            entry["semantics"] = c.semantics
        if c.prototype:
            entry["prototype"] = c.prototype
        obj[key] = entry
    return json.dumps(obj, sort_keys=True, separators=(", ", ": "))


def save(store: ContractStore, path) -> None:
    Path(path).write_text(dumps(store), encoding="utf-8")


def _common_prefix_len(a: str, b: str) -> int:
    n = 0
    for x, y in zip(a, b):
        if x != y:
            break
        n += 1
    return n


def lookup(store: ContractStore, probe: ProbeSpec) -> list[Contract]:
    exact = store.entries.get(probe.key)
    if exact is not None:
        return [exact]
    target = probe.target
    matched = [
        c
        for c in store.entries.values()
        if c.target.startswith(target) or target.startswith(c.target)
    ]
    matched.sort(key=lambda c: (-_common_prefix_len(c.target, target), c.probe_key))
    return matched


# --- corpus mining -----------------------------------------------------

_FUNC_RE = re.compile(
    r"^(?!\s)(?:[A-Za-z_][\w]*[\s\*]+)+([a-z_][\w]*)\s*\(([^;{}]*)\)\s*\{",
    re.MULTILINE,
)


@dataclass
class BuildReport:
    functions_found: int = 0
    contracts_built: int = 0
    malformed: list[dict] = field(default_factory=list)


def _preceding_comment(text: str, start: int) -> str:
    lines = text[:start].split("\n")
    while lines and lines[-1].strip() == "":
        if len(lines) > 1 and lines[-2].strip() == "":
            return ""
        lines.pop()
        break
    if not lines:
        return ""
    block = []
    if lines[-1].strip().endswith("*/"):
        i = len(lines) - 1
        while i >= 0:
            block.insert(0, lines[i])
            if lines[i].strip().startswith("/*"):
                break
            i -= 1
    else:
        i = len(lines) - 1
        while i >= 0 and lines[i].strip().startswith("//"):
            block.insert(0, lines[i])
            i -= 1
    cleaned = []
    for line in block:
        s = line.strip()
        for marker in ("/**", "/*", "*/", "//"):
            if s.startswith(marker):
                s = s[len(marker) :].strip()
        if s.endswith("*/"):
            s = s[:-2].strip()
        if s.startswith("*"):
            s = s[1:].strip()
        if s:
            cleaned.append(s)
    return " ".join(cleaned)


def scan_corpus(corpus_dir) -> list[dict]:
    """Find function definitions and their leading comment in every .c/.h
    file under corpus_dir, in sorted path order."""
    found = []
    root = Path(corpus_dir)
    for path in sorted(root.rglob("*")):
        if path.suffix not in (".c", ".h") or not path.is_file():
            continue
        text = path.read_text(encoding="utf-8", errors="replace")
        for m in _FUNC_RE.finditer(text):
            name = m.group(1)
            prototype = " ".join(m.group(0)[: m.group(0).rindex(")") + 1].split())
            found.append(
                {
                    "name": name,
                    "prototype": prototype,
                    "semantics": _preceding_comment(text, m.start()),
                    "source": str(path.relative_to(root)),
                }
            )
    return found


def _conditions_from_reply(key: str, reply_text: str) -> Contract:
    body = json.loads(extract_code(reply_text))
    if not isinstance(body, dict):
        raise ValueError("reply is not a JSON object")
    return Contract(
        probe_key=key,
        pre=_conditions(key, body.get("pre"), "pre"),
        post=_conditions(key, body.get("post"), "post"),
    )


def build_dataset(corpus_dir, llm, out) -> tuple[ContractStore, BuildReport]:
    report = BuildReport()
    store = ContractStore(source_path=str(out))
    for fn in scan_corpus(corpus_dir):
        report.functions_found += 1
        key = f"kprobe:{fn['name']}"
        user = (
            f"Function prototype:\n{fn['prototype']}\n\n"
            f"Approximate semantics:\n{fn['semantics'] or '(none)'}\n\n"
            "Reply with one JSON object holding optional \"pre\" and \"post\" "
            "objects that map argument expressions to relations drawn from "
            "==, !=, <, <=, >, >= followed by an integer, or \"!=null\"."
        )
        reply = complete(llm, ChatRequest(system=CONTRACT_SYSTEM, user=user, temperature=0.0))
        try:
            contract = _conditions_from_reply(key, reply.text)
        except (ValueError, SchemaError, EmptyCompletion) as exc:
            report.malformed.append({"function": fn["name"], "reason": str(exc)})
            continue
        store.entries[key] = Contract(
            probe_key=key,
            pre=contract.pre,
            post=contract.post,
            semantics=fn["semantics"],
            prototype=fn["prototype"],
        )
        report.contracts_built += 1
    save(store, out)
    return store, report
