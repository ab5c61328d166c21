"""Static safety gate run after verification, mirroring the checks an
in-kernel loader enforces: bounded loops only, no writes through pointer
fields, recognized attach kinds, and map keys built from plain values
rather than dereferences. The caller strips assume/assert first; finding
one here is a precondition violation, not a report.

External mode renders the program to a temp file and runs a configured
command with a {file} placeholder, treating exit 0 as safe. That is how a
real tracer's dry-run can stand in for the builtin rules.
"""

from __future__ import annotations

import shlex
import subprocess
import tempfile
from dataclasses import dataclass
from pathlib import Path

from .lang import (
    Assign,
    Delete,
    FieldChain,
    MapAccess,
    MapAssign,
    PROBE_KINDS,
    Program,
    ScratchVar,
    Unroll,
    has_annotations,
    render,
    render_expr,
    stmt_exprs,
    walk_exprs,
    walk_stmts,
)

EXTERNAL_TIMEOUT = 20.0


class AnnotationsPresent(Exception):
    pass


class ExternalToolMissing(Exception):
    pass


@dataclass
class SafetyReport:
    ok: bool
    messages: tuple[str, ...]
    mode: str

    def __post_init__(self):
        if not self.ok and not self.messages:
            raise ValueError("a failing report needs at least one message")


def _key_problem(expr) -> str | None:
    for sub in walk_exprs(expr):
        if isinstance(sub, FieldChain):
            return "dereferences a pointer field"
        if isinstance(sub, MapAccess):
            return "reads another map"
    return None


def _check_keys(keys, messages: list[str]) -> None:
    for key in keys:
        problem = _key_problem(key)
        if problem:
            messages.append(
                f"{key.line}:{key.column}: map key {render_expr(key)} {problem}"
            )


def _check_builtin(program: Program) -> list[str]:
    messages: list[str] = []
    for clause in program.clauses:
        for probe in clause.attach_points:
            if probe.kind not in PROBE_KINDS:
                messages.append(
                    f"{probe.line}:{probe.column}: unknown probe kind {probe.kind!r}"
                )
        exprs = [clause.predicate] if clause.predicate is not None else []
        for s in walk_stmts(clause.body):
            if isinstance(s, Unroll) and s.count < 1:
                messages.append(f"{s.line}:{s.column}: unroll bound must be positive")
            if isinstance(s, Assign) and not isinstance(s.target, ScratchVar):
                messages.append(
                    f"{s.line}:{s.column}: assignment writes through "
                    f"{render_expr(s.target)}; only scratch variables and maps "
                    "may be written"
                )
            if isinstance(s, (MapAssign, Delete)):
                _check_keys(s.keys, messages)
            exprs.extend(stmt_exprs(s))
        for e in exprs:
            for sub in walk_exprs(e):
                if isinstance(sub, MapAccess):
                    _check_keys(sub.keys, messages)
    return messages


def _check_external(program: Program, command) -> list[str]:
    if not command:
        raise ExternalToolMissing("no external safety command configured")
    if isinstance(command, str):
        command = shlex.split(command)
    with tempfile.NamedTemporaryFile(
        "w", suffix=".bt", delete=False, encoding="utf-8"
    ) as fh:
        fh.write(render(program))
        path = fh.name
    argv = [part.replace("{file}", path) for part in command]
    try:
        proc = subprocess.run(
            argv, capture_output=True, text=True, timeout=EXTERNAL_TIMEOUT
        )
    except FileNotFoundError:
        raise ExternalToolMissing(f"safety command not found: {argv[0]}") from None
    except subprocess.TimeoutExpired:
        return [f"external safety check timed out after {EXTERNAL_TIMEOUT:.0f}s"]
    finally:
        Path(path).unlink(missing_ok=True)
    if proc.returncode == 0:
        return []
    lines = [ln for ln in (proc.stderr or "").splitlines() if ln.strip()]
    if not lines:
        lines = [f"external safety check exited with status {proc.returncode}"]
    return lines


def check(program: Program, mode: str = "builtin", command=None) -> SafetyReport:
    if has_annotations(program):
        raise AnnotationsPresent(
            "safety check requires annotations to be stripped first"
        )
    if mode == "builtin":
        messages = _check_builtin(program)
    elif mode == "external":
        messages = _check_external(program, command)
    else:
        raise ValueError(f"unknown safety mode {mode!r}")
    return SafetyReport(ok=not messages, messages=tuple(messages), mode=mode)
