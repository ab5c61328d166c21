"""Symbolic execution of annotated programs.

Each probe clause runs from a fresh symbolic state. The clause predicate
(if any) joins the path condition; if statements fork the path (then branch
explored first, document order); unroll bodies are expanded literally.
assume conjoins onto the assumption set; assert asks the solver whether
path /\\ assumptions /\\ !condition is satisfiable, and a witness becomes an
AssertViolation counterexample (re-validated concretely before it is
believed). Division and modulo raise an implicit divisor!=0 obligation at
the point of use. Paths whose assumptions are unsatisfiable verify
trivially, since every goal query is unsatisfiable there too.

Dialect value semantics (shared with every solver backend and the grid
kernels): integers are unsigned 64-bit unless a kernel type table narrows a
field; operands widen to the larger width (sign-extending only when the
narrower side is signed); mixed-signedness comparisons are unsigned;
unbound scratch variables read as fresh 64-bit unknowns; map reads are
uninterpreted over their key tuple with written entries layered on top;
ntop/str/time are uninterpreted; strings are opaque tokens.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from ..lang import nodes as L
from ..lang.render import escape_string, render_expr
from . import concrete
from . import exprbuild as eb
from .ackermann import ackermannize
from .backends import BitBlastBackend, SolverFailure, SolverTimeout
from .types import KernelTypeMap
from .values import Concrete, SymExpr, Symbol, Uninterpreted, symbols_of


class UnsupportedExpr(Exception):
    pass


_UNROLL_EXPANSION_LIMIT = 4096


@dataclass
class Verified:
    kind: str = "verified"


@dataclass
class AssertViolation:
    line: int
    column: int
    expr_text: str
    counterexample: dict[str, int]
    message: str
    kind: str = "assert_violation"


@dataclass
class Timeout:
    message: str
    elapsed: float
    checks_completed: int = 0
    kind: str = "timeout"


@dataclass
class SolverError:
    message: str
    kind: str = "solver_error"


Verdict = Verified | AssertViolation | Timeout | SolverError


class SymState:
    """Per-path symbolic state. Forking copies the mutable parts; symbol
    naming is deterministic, so sibling paths materialize identical names
    for identical reads."""

    def __init__(self):
        self.env: dict[str, SymExpr] = {}
        self.maps: dict[tuple[str, int], list[tuple[tuple[SymExpr, ...], SymExpr]]] = {}
        self.path: list[SymExpr] = []
        self.assumptions: list[SymExpr] = []
        self.field_model: dict[tuple[SymExpr, str], Symbol] = {}
        self.field_names: dict[str, int] = {}
        self.div_checks: list[tuple[L.Binary, SymExpr]] = []

    def fork(self) -> "SymState":
        child = SymState.__new__(SymState)
        child.env = dict(self.env)
        child.maps = {k: list(v) for k, v in self.maps.items()}
        child.path = list(self.path)
        child.assumptions = list(self.assumptions)
        child.field_model = dict(self.field_model)
        child.field_names = dict(self.field_names)
        child.div_checks = []
        return child

    def constraints(self) -> list[SymExpr]:
        return self.path + self.assumptions


def _scalar_cast(type_name: str) -> tuple[int, bool]:
    if type_name.startswith("uint"):
        return int(type_name[4:]), False
    return int(type_name[3:]), True


def eval_expr(state: SymState, node: L.Expr, types: KernelTypeMap) -> SymExpr:
    """Evaluate one expression to a symbolic term, materializing fresh
    symbols for unknowns and queueing implicit division checks on state."""
    if isinstance(node, L.IntLit):
        return Concrete(node.value, 64, signed=True)
    if isinstance(node, L.StrLit):
        return Symbol(f'"{escape_string(node.value)}"', 64)
    if isinstance(node, L.BuiltinVar):
        if node.name == "retval":
            return Symbol("retval", 64, signed=True)
        if node.name.startswith("args."):
            ft = types.lookup(node.name)
            return Symbol(node.name, ft.width, ft.signed)
        return Symbol(node.name, 64)
    if isinstance(node, L.ScratchVar):
        value = state.env.get(node.name)
        if value is None:
            value = Symbol(f"${node.name}", 64)
            state.env[node.name] = value
        return value
    if isinstance(node, L.MapAccess):
        keys = tuple(eb.resize(eval_expr(state, k, types), 64) for k in node.keys)
        result: SymExpr = Uninterpreted(f"@{node.name}", keys, 64)
        for stored_keys, stored_value in state.maps.get((node.name, len(keys)), []):
            cond: SymExpr = eb.TRUE
            for lhs, rhs in zip(keys, stored_keys):
                cond = eb.band(cond, eb.eq(lhs, rhs))
            result = eb.ite(cond, stored_value, result)
        return result
    if isinstance(node, L.FieldChain):
        base_val = eval_expr(state, node.base, types)
        path = ".".join(node.fields)
        key = (base_val, path)
        sym = state.field_model.get(key)
        if sym is None:
            ft = types.lookup(path)
            display = render_expr(node)
            n = state.field_names.get(display, 0)
            state.field_names[display] = n + 1
            name = display if n == 0 else f"{display}#{n}"
            sym = Symbol(name, ft.width, ft.signed)
            state.field_model[key] = sym
        return sym
    if isinstance(node, L.Cast):
        value = eval_expr(state, node.value, types)
        if node.type_name.endswith("*"):
            return eb.resize(value, 64, signed=False)
        if node.type_name.startswith("struct"):
            raise UnsupportedExpr(f"cannot cast to a struct value: ({node.type_name})")
        width, signed = _scalar_cast(node.type_name)
        return eb.resize(value, width, signed=signed)
    if isinstance(node, L.Unary):
        if node.op == "!":
            return eb.bnot(eval_expr(state, node.operand, types))
        value = eval_expr(state, node.operand, types)
        if value.width == 0:
            value = eb.resize(value, 64)
        if node.op == "-":
            return eb.negate(value)
        return eb.bitnot(value)
    if isinstance(node, L.Binary):
        return _eval_binary(state, node, types)
    if isinstance(node, L.Call):
        return _eval_call(state, node, types)
    raise UnsupportedExpr(f"cannot evaluate {type(node).__name__}")


_ARITH = {"+": "add", "-": "sub", "*": "mul", "&": "and", "|": "or", "^": "xor",
          "<<": "shl", ">>": "lshr"}
_CMP = {"==": "eq", "!=": "ne", "<": "ult", "<=": "ule", ">": "ugt", ">=": "uge"}


def _eval_binary(state: SymState, node: L.Binary, types: KernelTypeMap) -> SymExpr:
    op = node.op
    if op == "&&":
        return eb.band(eval_expr(state, node.lhs, types), eval_expr(state, node.rhs, types))
    if op == "||":
        return eb.bor(eval_expr(state, node.lhs, types), eval_expr(state, node.rhs, types))
    lhs = eval_expr(state, node.lhs, types)
    rhs = eval_expr(state, node.rhs, types)
    if op in _CMP:
        return eb.compare(_CMP[op], lhs, rhs)
    if op in ("/", "%"):
        lhs2, rhs2, _ = eb.promote_pair(lhs, rhs)
        if not (isinstance(rhs2, Concrete) and rhs2.value != 0):
            state.div_checks.append((node, rhs2))
        return eb.arith("udiv" if op == "/" else "urem", lhs2, rhs2)
    if op in _ARITH:
        return eb.arith(_ARITH[op], lhs, rhs)
    raise UnsupportedExpr(f"operator {op!r}")


def _eval_call(state: SymState, node: L.Call, types: KernelTypeMap) -> SymExpr:
    if node.name == "bswap":
        if len(node.args) != 1:
            raise UnsupportedExpr("bswap takes exactly one argument")
        value = eval_expr(state, node.args[0], types)
        try:
            return eb.byteswap(value)
        except ValueError as exc:
            raise UnsupportedExpr(str(exc)) from None
    if node.name == "sizeof":
        if len(node.args) != 1:
            raise UnsupportedExpr("sizeof takes exactly one argument")
        arg = node.args[0]
        if isinstance(arg, L.FieldChain):
            ft = types.lookup(".".join(arg.fields))
            if ft.variable_size:
                return Symbol(f"sizeof({render_expr(arg)})", 64)
            if ft.size_bytes is not None:
                return Concrete(ft.size_bytes, 64)
            return Concrete(ft.width // 8, 64)
        value = eval_expr(state, arg, types)
        return Concrete(value.width // 8 if value.width else 1, 64)
    # ntop, str, time: opaque helpers
    args = tuple(eb.resize(eval_expr(state, a, types), 64) for a in node.args)
    return Uninterpreted(node.name, args, 64)


class _OutOfTime(Exception):
    pass


class _ForkCapExceeded(Exception):
    pass


class _Run:
    def __init__(self, types: KernelTypeMap, solver, budget: float, fork_cap: int):
        self.types = types
        self.solver = solver
        self.started = time.monotonic()
        self.deadline = self.started + budget
        self.fork_cap = fork_cap
        self.paths = 1
        self.checks = 0

    def elapsed(self) -> float:
        return time.monotonic() - self.started

    def _solve(self, constraints: list[SymExpr]):
        if time.monotonic() > self.deadline:
            raise _OutOfTime()
        query = ackermannize(constraints)
        result = self.solver.check(query, deadline=self.deadline)
        self.checks += 1
        if result.status == "sat":
            model = dict(result.model or {})
            for name in symbols_of(query):
                model.setdefault(name, 0)
            if not concrete.holds(query, model):
                raise SolverFailure(
                    "backend returned a counterexample that fails concrete re-evaluation"
                )
            return model
        return None

    @staticmethod
    def _describe_model(model: dict[str, int]) -> str:
        parts = []
        for name in sorted(model):
            value = model[name]
            parts.append(f"{name} = {value}" if value < 65536 else f"{name} = {value:#x}")
        return ", ".join(parts)

    def _drain_divisions(self, state: SymState) -> AssertViolation | None:
        while state.div_checks:
            node, divisor = state.div_checks.pop(0)
            zero = Concrete(0, divisor.width)
            model = self._solve(state.constraints() + [eb.eq(divisor, zero)])
            if model is not None:
                text = render_expr(node)
                where = f" at line {node.line}" if node.line else ""
                return AssertViolation(
                    node.line,
                    node.column,
                    text,
                    model,
                    f"division by zero is possible{where}: {text} "
                    f"with {self._describe_model(model)}",
                )
        return None

    def _eval(self, state: SymState, node: L.Expr) -> tuple[SymExpr, AssertViolation | None]:
        value = eval_expr(state, node, self.types)
        return value, self._drain_divisions(state)

    def run_clause(self, clause: L.ProbeClause) -> Verdict | None:
        state = SymState()
        if clause.predicate is not None:
            value, bad = self._eval(state, clause.predicate)
            if bad:
                return bad
            state.path.append(eb.coerce_bool(value))
        return self.run_body(clause.body, state)

    def run_body(self, stmts: tuple[L.Stmt, ...], state: SymState) -> Verdict | None:
        i = 0
        while i < len(stmts):
            s = stmts[i]
            if isinstance(s, L.If):
                cond, bad = self._eval(state, s.cond)
                if bad:
                    return bad
                cond_b = eb.coerce_bool(cond)
                self.paths += 1
                if self.paths > self.fork_cap:
                    raise _ForkCapExceeded()
                rest = stmts[i + 1 :]
                then_state = state.fork()
                then_state.path.append(cond_b)
                verdict = self.run_body(s.then_body + rest, then_state)
                if verdict:
                    return verdict
                state.path.append(eb.bnot(cond_b))
                return self.run_body(s.else_body + rest, state)
            if isinstance(s, L.Unroll):
                if s.count * max(len(s.body), 1) > _UNROLL_EXPANSION_LIMIT:
                    raise UnsupportedExpr(
                        f"unroll bound {s.count} is too large to expand"
                    )
                stmts = s.body * s.count + stmts[i + 1 :]
                i = 0
                continue
            verdict = self._run_simple(s, state)
            if verdict:
                return verdict
            i += 1
        return None

    def _run_simple(self, s: L.Stmt, state: SymState) -> Verdict | None:
        if isinstance(s, L.Assign):
            if not isinstance(s.target, L.ScratchVar):
                raise UnsupportedExpr("assignment target must be a scratch variable")
            value, bad = self._eval(state, s.value)
            if bad:
                return bad
            state.env[s.target.name] = value
            return None
        if isinstance(s, L.MapAssign):
            keys = []
            for k in s.keys:
                value, bad = self._eval(state, k)
                if bad:
                    return bad
                keys.append(eb.resize(value, 64))
            value, bad = self._eval(state, s.value)
            if bad:
                return bad
            slot = state.maps.setdefault((s.name, len(keys)), [])
            slot.append((tuple(keys), eb.resize(value, 64)))
            return None
        if isinstance(s, (L.Delete, L.Printf, L.ExprStmt)):
            # side-effect-free for verification; still evaluate for the
            # implicit division obligations buried in arguments
            exprs: tuple[L.Expr, ...]
            if isinstance(s, L.Delete):
                exprs = s.keys
            elif isinstance(s, L.Printf):
                exprs = s.args
            else:
                exprs = (s.value,)
            for e in exprs:
                _, bad = self._eval(state, e)
                if bad:
                    return bad
            return None
        if isinstance(s, L.Assume):
            value, bad = self._eval(state, s.cond)
            if bad:
                return bad
            state.assumptions.append(eb.coerce_bool(value))
            return None
        if isinstance(s, L.Assert):
            value, bad = self._eval(state, s.cond)
            if bad:
                return bad
            goal = eb.coerce_bool(value)
            model = self._solve(state.constraints() + [eb.bnot(goal)])
            if model is not None:
                text = render_expr(s.cond)
                where = f" at line {s.line}" if s.line else ""
                return AssertViolation(
                    s.line,
                    s.column,
                    text,
                    model,
                    f"assert({text}) can fail{where}: "
                    f"counterexample {self._describe_model(model)}",
                )
            return None
        raise UnsupportedExpr(f"cannot execute {type(s).__name__}")


def verify(
    program: L.Program,
    types: KernelTypeMap | None = None,
    budget: float = 30.0,
    solver=None,
    fork_cap: int = 64,
) -> Verdict:
    run = _Run(
        types or KernelTypeMap.default(),
        solver or BitBlastBackend(),
        budget,
        fork_cap,
    )
    try:
        for clause in program.clauses:
            verdict = run.run_clause(clause)
            if verdict:
                return verdict
    except (_OutOfTime, SolverTimeout):
        return Timeout(
            f"verification budget exhausted after {run.checks} solver checks",
            run.elapsed(),
            run.checks,
        )
    except _ForkCapExceeded:
        return Timeout(
            f"path fork cap ({run.fork_cap}) exceeded; simplify branching",
            run.elapsed(),
            run.checks,
        )
    except UnsupportedExpr as exc:
        return SolverError(f"program leaves the checkable dialect: {exc}")
    except SolverFailure as exc:
        return SolverError(str(exc))
    return Verified()
