"""Batch evaluation: run sessions over a labeled dataset and score them.

Each case carries exactly one judge. A session that returns a program is
judged correct (accurate) or incorrect (false positive); a session that
gives up is a false negative. A judge that cannot evaluate raises
JudgeError and that case-iteration is excluded from the metrics but
counted in the report. All ratios stay exact rationals until rendering.

With scripted backends and a fixed worker count of one, the whole run,
including the report file bytes, is reproducible.
"""

from __future__ import annotations

import json
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .lang import ParseError, parse, render
from .orchestrator import SessionConfig, Success, run_session

ACCURATE = "accurate"
FALSE_POSITIVE = "false_positive"
FALSE_NEGATIVE = "false_negative"
JUDGE_ERROR = "judge_error"


class DatasetError(Exception):
    pass


class JudgeError(Exception):
    pass


@dataclass(frozen=True)
class ProbeMatch:
    expected: tuple[str, ...]


@dataclass(frozen=True)
class RegexChecks:
    patterns: tuple[str, ...]


@dataclass(frozen=True)
class ManualLabel:
    correct: bool
    source: str = ""


Judge = ProbeMatch | RegexChecks | ManualLabel


@dataclass(frozen=True)
class EvalCase:
    id: str
    prompt: str
    reference_program: str
    judge: Judge


@dataclass(frozen=True)
class Metrics:
    accuracy: Fraction
    fp: Fraction
    fn: Fraction
    n: int

    def __post_init__(self):
        if self.n > 0 and self.accuracy + self.fp + self.fn != 1:
            raise ValueError("classification fractions must sum to 1")


@dataclass(frozen=True)
class EvalRow:
    id: str
    iteration: int
    classification: str
    trial_count: int
    messages: tuple[str, ...]


@dataclass
class EvalResult:
    metrics: Metrics
    rows: list[EvalRow]
    judge_errors: int


_JUDGE_KINDS = ("probe_match", "regex_checks", "manual_label")


def _judge_from_json(obj, case_id: str) -> Judge:
    if not isinstance(obj, dict) or "kind" not in obj:
        raise DatasetError(f"case {case_id}: judge must be an object with a kind")
    kind = obj["kind"]
    if kind == "probe_match":
        expected = obj.get("expected")
        if not isinstance(expected, list) or not all(isinstance(p, str) for p in expected):
            raise DatasetError(f"case {case_id}: probe_match needs a list of probe keys")
        extra = set(obj) - {"kind", "expected"}
    elif kind == "regex_checks":
        patterns = obj.get("patterns")
        if not isinstance(patterns, list) or not all(isinstance(p, str) for p in patterns):
            raise DatasetError(f"case {case_id}: regex_checks needs a list of patterns")
        extra = set(obj) - {"kind", "patterns"}
    elif kind == "manual_label":
        if not isinstance(obj.get("correct"), bool):
            raise DatasetError(f"case {case_id}: manual_label needs a boolean 'correct'")
        extra = set(obj) - {"kind", "correct", "source"}
    else:
        raise DatasetError(
            f"case {case_id}: unknown judge kind {kind!r}, expected one of {_JUDGE_KINDS}"
        )
    if extra:
        raise DatasetError(f"case {case_id}: unknown judge fields {sorted(extra)}")
    if kind == "probe_match":
        return ProbeMatch(tuple(obj["expected"]))
    if kind == "regex_checks":
        return RegexChecks(tuple(obj["patterns"]))
    return ManualLabel(obj["correct"], obj.get("source", ""))


def load_cases(path) -> list[EvalCase]:
    cases: list[EvalCase] = []
    seen: set[str] = set()
    text = Path(path).read_text(encoding="utf-8")
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise DatasetError(f"line {lineno}: bad JSON: {exc}") from exc
        extra = set(obj) - {"id", "prompt", "reference_program", "judge"}
        if extra:
            raise DatasetError(f"line {lineno}: unknown fields {sorted(extra)}")
        for key in ("id", "prompt"):
            if not isinstance(obj.get(key), str) or not obj[key]:
                raise DatasetError(f"line {lineno}: missing or empty {key}")
        case_id = obj["id"]
        if case_id in seen:
            raise DatasetError(f"line {lineno}: duplicate case id {case_id!r}")
        seen.add(case_id)
        cases.append(
            EvalCase(
                case_id,
                obj["prompt"],
                obj.get("reference_program", ""),
                _judge_from_json(obj.get("judge"), case_id),
            )
        )
    return cases


def _program_probe_keys(text: str) -> list[str]:
    try:
        program = parse(text)
    except ParseError as exc:
        raise JudgeError(f"synthesized program does not re-parse: {exc}") from exc
    keys = []
    for clause in program.clauses:
        keys.extend(p.key for p in clause.attach_points)
    return keys


def judge_program(judge: Judge, program_text: str) -> bool:
    if isinstance(judge, ManualLabel):
        return judge.correct
    if isinstance(judge, ProbeMatch):
        return sorted(set(_program_probe_keys(program_text))) == sorted(set(judge.expected))
    if isinstance(judge, RegexChecks):
        for pat in judge.patterns:
            try:
                rx = re.compile(pat)
            except re.error as exc:
                raise JudgeError(f"bad pattern {pat!r}: {exc}") from exc
            if not rx.search(program_text):
                return False
        return True
    raise JudgeError(f"unknown judge type {type(judge).__name__}")


def _run_one(case: EvalCase, iteration: int, cfg: SessionConfig) -> EvalRow:
    result = run_session(case.prompt, cfg)
    if isinstance(result.status, Success):
        text = render(result.status.program)
        trial_count = result.status.trial_count
        try:
            correct = judge_program(case.judge, text)
        except JudgeError as exc:
            return EvalRow(case.id, iteration, JUDGE_ERROR, trial_count, (str(exc),))
        cls = ACCURATE if correct else FALSE_POSITIVE
        messages = tuple(
            f"[trial {fb.trial_index + 1}, {fb.stage}] {fb.message}"
            for t in result.trials
            if (fb := t.feedback) is not None
        )
        return EvalRow(case.id, iteration, cls, trial_count, messages)
    messages = tuple(
        f"[trial {fb.trial_index + 1}, {fb.stage}] {fb.message}"
        for fb in result.status.history
    )
    return EvalRow(case.id, iteration, FALSE_NEGATIVE, len(result.trials), messages)


def compute_metrics(rows: list[EvalRow]) -> tuple[Metrics, int]:
    errors = sum(1 for r in rows if r.classification == JUDGE_ERROR)
    n = len(rows) - errors
    if n == 0:
        return Metrics(Fraction(0), Fraction(0), Fraction(0), 0), errors
    acc = sum(1 for r in rows if r.classification == ACCURATE)
    fp = sum(1 for r in rows if r.classification == FALSE_POSITIVE)
    fn = sum(1 for r in rows if r.classification == FALSE_NEGATIVE)
    return (
        Metrics(Fraction(acc, n), Fraction(fp, n), Fraction(fn, n), n),
        errors,
    )


def _report_json(result: EvalResult) -> str:
    report = {
        "summary": {
            "n": result.metrics.n,
            "judge_errors": result.judge_errors,
            "accuracy": str(result.metrics.accuracy),
            "fp": str(result.metrics.fp),
            "fn": str(result.metrics.fn),
        },
        "rows": [
            {
                "id": r.id,
                "iteration": r.iteration,
                "classification": r.classification,
                "trial_count": r.trial_count,
                "messages": list(r.messages),
            }
            for r in result.rows
        ],
    }
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def format_table(rows: list[EvalRow]) -> str:
    header = ("case", "iter", "classification", "trials")
    body = [(r.id, str(r.iteration), r.classification, str(r.trial_count)) for r in rows]
    widths = [max(len(row[i]) for row in [header] + body) for i in range(4)]
    lines = []
    for row in [header] + body:
        lines.append("  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)).rstrip())
    return "\n".join(lines)


def run_eval(
    cases: list[EvalCase],
    cfg: SessionConfig,
    iterations: int = 1,
    workers: int = 1,
    freeze: bool = True,
    report_path=None,
) -> EvalResult:
    if not cases:
        raise DatasetError("dataset is empty")
    if iterations < 1:
        raise ValueError("iterations must be at least 1")
    if workers < 1:
        raise ValueError("workers must be at least 1")

    store = cfg.examples
    was_frozen = store.frozen if store is not None else False
    if freeze and store is not None and not was_frozen:
        store.freeze()
    try:
        jobs = [(case, it) for case in cases for it in range(iterations)]
        if workers == 1:
            rows = [_run_one(case, it, cfg) for case, it in jobs]
        else:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                futures = [pool.submit(_run_one, case, it, cfg) for case, it in jobs]
                rows = [f.result() for f in futures]
    finally:
        if freeze and store is not None and not was_frozen:
            store.thaw()

    rows.sort(key=lambda r: (r.id, r.iteration))
    metrics, errors = compute_metrics(rows)
    result = EvalResult(metrics, rows, errors)
    if report_path is not None:
        Path(report_path).write_text(_report_json(result), encoding="utf-8")
    return result
