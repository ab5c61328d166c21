"""Satisfiability backends for bit-vector constraint queries.

All three speak the same dialect semantics; they differ in strategy:

* BitBlastBackend: in-process gate-level reduction to CNF plus a CDCL
  search. The default. Complete over the whole dialect.
* EnumeratorBackend: exhaustive sweep over narrow symbol domains via the
  grid kernels. Only admits queries with at most three symbols of width
  eight or less, but within that box it is a trivially-auditable oracle.
* ProcessBackend: shells out to an external solver process speaking
  SMT-LIB v2 on stdin/stdout, for cross-checking against independent
  implementations.

check() returns SolverResult(status, model); timeouts raise SolverTimeout
and infrastructure faults raise SolverFailure so callers can distinguish
"slow" from "broken".
"""

from __future__ import annotations

import subprocess
import time
from dataclasses import dataclass
from typing import Sequence

from .ackermann import ackermannize
from .bitblast import BitBlaster
from .gridcompile import UnsupportedForEnumeration, compile_query
from .kernels import run_grid
from .satcore import SatSolver, SatTimeout
from .values import SymExpr


class SolverTimeout(Exception):
    pass


class SolverFailure(Exception):
    pass


@dataclass
class SolverResult:
    status: str  # "sat" | "unsat"
    model: dict[str, int] | None = None


class BitBlastBackend:
    """Default backend: constraints -> gates -> CNF -> CDCL."""

    name = "bitblast"

    def check(self, constraints: Sequence[SymExpr], deadline: float | None = None) -> SolverResult:
        solver = SatSolver()
        blaster = BitBlaster(solver)
        for c in ackermannize(list(constraints)):
            blaster.assert_true(c)
        if not solver.ok:
            return SolverResult("unsat")
        try:
            sat = solver.solve(deadline)
        except SatTimeout:
            raise SolverTimeout("propositional search exceeded the deadline") from None
        if not sat:
            return SolverResult("unsat")
        return SolverResult("sat", blaster.model())


class EnumeratorBackend:
    """Exhaustive oracle over small domains; rejects anything wider."""

    name = "enumerate"

    def __init__(self, kernel: str = "auto"):
        self.kernel = kernel

    def check(self, constraints: Sequence[SymExpr], deadline: float | None = None) -> SolverResult:
        if deadline is not None and time.monotonic() > deadline:
            raise SolverTimeout("deadline expired before enumeration")
        try:
            prog = compile_query(ackermannize(list(constraints)))
        except UnsupportedForEnumeration as exc:
            raise SolverFailure(f"query outside the enumerable fragment: {exc}") from None
        witness = run_grid(prog, kernel=self.kernel)
        if witness is None:
            return SolverResult("unsat")
        return SolverResult("sat", witness)


class ProcessBackend:
    """Drives an external SMT-LIB v2 solver process per query."""

    name = "process"

    def __init__(self, command: Sequence[str]):
        if not command:
            raise ValueError("solver command must be non-empty")
        self.command = list(command)

    def check(self, constraints: Sequence[SymExpr], deadline: float | None = None) -> SolverResult:
        from .smtlib import emit_smtlib, parse_solver_output

        script = emit_smtlib(list(constraints))
        timeout = None
        if deadline is not None:
            timeout = deadline - time.monotonic()
            if timeout <= 0:
                raise SolverTimeout("deadline expired before the solver started")
        try:
            proc = subprocess.run(
                self.command,
                input=script,
                capture_output=True,
                text=True,
                timeout=timeout,
            )
        except subprocess.TimeoutExpired:
            raise SolverTimeout("external solver exceeded the deadline") from None
        except OSError as exc:
            raise SolverFailure(f"cannot run {self.command[0]}: {exc}") from None
        if proc.returncode != 0:
            detail = (proc.stderr or proc.stdout or "").strip()
            raise SolverFailure(
                f"solver exited with status {proc.returncode}: {detail[:500]}"
            )
        status, model = parse_solver_output(proc.stdout)
        if status == "unsat":
            return SolverResult("unsat")
        if status == "sat":
            return SolverResult("sat", model or {})
        raise SolverFailure(f"solver answered {status!r}")
