"""Session driver: synthesize, annotate, verify, gate, retry.

One session runs up to max_trials candidates. Every stage failure becomes
a FeedbackRecord carrying the stage's verbatim message, and the full
history rides along in each subsequent prompt. Pipeline failures are data;
only infrastructure faults (an exhausted script, an HTTP error, a replay
miss, broken configuration) raise.

On success the stripped program is returned and one success record lands
in the example store; on exhaustion the last parsed candidate is recorded
once as a failure example. Stores honor their freeze flag silently.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .comprehension import (
    AlreadyAnnotated,
    AnnotationParseError,
    StructureViolated,
    annotate,
    direct_annotate,
)
from .contracts import ContractStore
from .examplestore import DuplicateId, ExampleStore
from .lang import Program, render, strip_annotations
from .llm import EmptyCompletion
from .prompts import SYNTHESIS_SYSTEM
from .safety import SafetyReport, check as safety_check
from .symx import KernelTypeMap, Verdict, verify
from .synthesis import FeedbackRecord, SynthesisParseError, build_prompt, synthesize


@dataclass
class SessionConfig:
    synthesis_llm: object
    comprehension_llm: object = None
    contracts: ContractStore = field(default_factory=ContractStore)
    examples: ExampleStore | None = None
    comp_examples: ExampleStore | None = None
    max_trials: int = 3
    verify_budget: float = 30.0
    k_examples: int = 3
    framework: str = "bpftrace"
    annotation: str = "llm"  # "llm" | "direct"
    types: KernelTypeMap | None = None
    safety_mode: str = "builtin"
    safety_command: object = None
    solver: object = None
    system_prompt: str = SYNTHESIS_SYSTEM

    def __post_init__(self):
        if self.max_trials < 1:
            raise ValueError("max_trials must be at least 1")
        if self.annotation not in ("llm", "direct"):
            raise ValueError(f"unknown annotation mode {self.annotation!r}")
        if self.comprehension_llm is None:
            self.comprehension_llm = self.synthesis_llm


@dataclass
class Trial:
    index: int
    candidate_text: str | None
    verdict: Verdict | None
    safety: SafetyReport | None
    feedback: FeedbackRecord | None


@dataclass
class Success:
    program: Program
    trial_count: int
    status: str = "success"


@dataclass
class NeedsUserInfo:
    history: list[FeedbackRecord]
    status: str = "needs_user_info"


@dataclass
class SessionResult:
    status: Success | NeedsUserInfo
    trials: list[Trial]


def _record_quietly(store: ExampleStore | None, prompt: str, program: str,
                    outcome: str) -> None:
    if store is None:
        return
    try:
        store.add(store.new_record(prompt, program, outcome=outcome))
    except DuplicateId:
        pass


def run_session(request: str, cfg: SessionConfig) -> SessionResult:
    history: list[FeedbackRecord] = []
    trials: list[Trial] = []
    last_candidate_text: str | None = None

    for index in range(cfg.max_trials):
        prompt = build_prompt(
            request, cfg.examples, history, cfg.k_examples, system=cfg.system_prompt
        )

        def fail(stage: str, message: str, candidate_text=None, verdict=None,
                 safety=None) -> None:
            fb = FeedbackRecord(stage, message, index)
            history.append(fb)
            trials.append(Trial(index, candidate_text, verdict, safety, fb))

        try:
            candidate = synthesize(prompt, cfg.synthesis_llm)
        except (SynthesisParseError, EmptyCompletion) as exc:
            fail("parse", str(exc))
            continue
        candidate_text = render(candidate)
        last_candidate_text = candidate_text

        try:
            if cfg.annotation == "direct":
                annotated = direct_annotate(candidate, cfg.contracts)
            else:
                annotated = annotate(
                    candidate,
                    request,
                    cfg.contracts,
                    cfg.comprehension_llm,
                    cfg.comp_examples,
                )
        except (AnnotationParseError, StructureViolated, AlreadyAnnotated) as exc:
            fail("parse", f"annotation failed: {exc}", candidate_text)
            continue

        verdict = verify(
            annotated.program,
            types=cfg.types,
            budget=cfg.verify_budget,
            solver=cfg.solver,
        )
        if verdict.kind != "verified":
            fail("symexec", verdict.message, candidate_text, verdict)
            continue

        stripped = strip_annotations(annotated.program)
        report = safety_check(stripped, cfg.safety_mode, cfg.safety_command)
        if not report.ok:
            fail("safety_gate", "; ".join(report.messages), candidate_text,
                 verdict, report)
            continue

        trials.append(Trial(index, candidate_text, verdict, report, None))
        _record_quietly(cfg.examples, request, render(stripped), "success")
        return SessionResult(Success(stripped, index + 1), trials)

    if last_candidate_text is not None:
        _record_quietly(cfg.examples, request, last_candidate_text, "failure")
    return SessionResult(NeedsUserInfo(list(history)), trials)
