"""Prompt assembly and candidate synthesis.

The rendered user message carries, in order: the request, retrieved
example pairs labeled as correct input/output, then every accumulated
failure message labeled with the stage that produced it, oldest first.
Failures are never truncated. synthesize() always returns a parsed
program; anything the parser rejects surfaces as SynthesisParseError
whose text feeds the next trial.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .examplestore import ExampleStore
from .lang import ParseError, Program, parse
from .llm import ChatRequest, complete, extract_code
from .prompts import SYNTHESIS_SYSTEM

STAGES = ("parse", "symexec", "safety_gate")


class SynthesisParseError(Exception):
    pass


@dataclass(frozen=True)
class FeedbackRecord:
    stage: str
    message: str
    trial_index: int

    def __post_init__(self):
        if self.stage not in STAGES:
            raise ValueError(f"unknown stage {self.stage!r}")
        if not self.message:
            raise ValueError("feedback message must be non-empty")
        if self.trial_index < 0:
            raise ValueError("trial_index must be non-negative")


@dataclass
class SynthesisPrompt:
    system: str
    examples: list[tuple[str, str]]
    user_request: str
    feedback: list[FeedbackRecord]

    def render_user(self) -> str:
        parts = [self.user_request]
        for i, (ex_prompt, ex_program) in enumerate(self.examples, 1):
            parts.append(
                f"Example {i} of a correct request and program:\n"
                f"Request: {ex_prompt}\n"
                f"Program:\n```\n{ex_program}\n```"
            )
        if self.feedback:
            parts.append(
                "Earlier attempts at this request failed. Fix every problem "
                "listed below, oldest first:"
            )
            for fb in self.feedback:
                parts.append(f"[trial {fb.trial_index + 1}, {fb.stage}] {fb.message}")
        return "\n\n".join(parts)

    @property
    def length(self) -> int:
        return len(self.system) + len(self.render_user())


def build_prompt(
    request: str,
    store: ExampleStore | None,
    history: list[FeedbackRecord],
    k: int = 3,
    system: str = SYNTHESIS_SYSTEM,
) -> SynthesisPrompt:
    examples: list[tuple[str, str]] = []
    if store is not None and k > 0:
        examples = [(r.prompt, r.program) for r in store.query(request, k)]
    feedback = sorted(history, key=lambda fb: fb.trial_index)
    return SynthesisPrompt(system, examples, request, feedback)


def synthesize(prompt: SynthesisPrompt, llm, temperature: float = 0.2,
               model: str = "default") -> Program:
    req = ChatRequest(
        system=prompt.system,
        user=prompt.render_user(),
        temperature=temperature,
        model=model,
    )
    text = extract_code(complete(llm, req))
    try:
        return parse(text)
    except ParseError as exc:
        raise SynthesisParseError(f"candidate does not parse: {exc}") from None
