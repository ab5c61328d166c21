"""AST node types for the bpftrace dialect handled by this package.

All nodes are plain dataclasses. Source positions (line, column) are carried
for error reporting but excluded from equality, so two parses of the same
text compare equal no matter where the text came from. Child sequences are
tuples: programs are immutable values and transforms build new trees.
"""

from __future__ import annotations

from dataclasses import dataclass, field

PROBE_KINDS = frozenset({"kprobe", "kretprobe", "tracepoint", "uprobe", "uretprobe"})

BUILTIN_NAMES = frozenset(
    {"tid", "pid", "comm", "retval", "args"} | {f"arg{i}" for i in range(10)}
)

CALL_NAMES = frozenset({"ntop", "bswap", "sizeof", "time", "str"})

SCALAR_TYPE_NAMES = frozenset(
    {"int8", "int16", "int32", "int64", "uint8", "uint16", "uint32", "uint64"}
)

BINARY_OPS = frozenset(
    {
        "||", "&&", "|", "^", "&", "==", "!=", "<", "<=", ">", ">=",
        "<<", ">>", "+", "-", "*", "/", "%",
    }
)

UNARY_OPS = frozenset({"!", "~", "-"})


class Expr:
    pass


class Stmt:
    pass


@dataclass(frozen=True)
class IntLit(Expr):
    value: int
    width_hint: int = 64
    hex: bool = field(default=False, compare=False)
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class StrLit(Expr):
    value: str
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class BuiltinVar(Expr):
    """tid, pid, comm, arg0..arg9, retval, or a tracepoint field args.<name>."""

    name: str
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class ScratchVar(Expr):
    """$name; the name is stored without the sigil."""

    name: str
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class MapAccess(Expr):
    """@name or @name[key, ...]; the name is stored without the sigil."""

    name: str
    keys: tuple[Expr, ...] = ()
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class FieldChain(Expr):
    """base->f1->f2 where each field may itself be a dotted path (a.b.c)."""

    base: Expr
    fields: tuple[str, ...]
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Cast(Expr):
    """(struct sock *) e or (uint16) e; type_name is the rendered type text."""

    type_name: str
    value: Expr
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Unary(Expr):
    op: str
    operand: Expr
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Binary(Expr):
    op: str
    lhs: Expr
    rhs: Expr
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Call(Expr):
    name: str
    args: tuple[Expr, ...]
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Assign(Stmt):
    """$var = value. The target is an Expr so malformed trees built by hand
    (e.g. a write through a FieldChain) can be represented and then rejected
    by the safety gate; the parser itself only produces ScratchVar targets."""

    target: Expr
    value: Expr
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class MapAssign(Stmt):
    name: str
    keys: tuple[Expr, ...]
    value: Expr
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Delete(Stmt):
    name: str
    keys: tuple[Expr, ...]
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Printf(Stmt):
    fmt: str
    args: tuple[Expr, ...] = ()
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class ExprStmt(Stmt):
    value: Expr
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class If(Stmt):
    cond: Expr
    then_body: tuple[Stmt, ...]
    else_body: tuple[Stmt, ...] = ()
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Unroll(Stmt):
    count: int
    body: tuple[Stmt, ...]
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Assume(Stmt):
    cond: Expr
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Assert(Stmt):
    cond: Expr
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class ProbeSpec:
    kind: str
    target: str
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)

    @property
    def key(self) -> str:
        return f"{self.kind}:{self.target}"


@dataclass(frozen=True)
class ProbeClause:
    attach_points: tuple[ProbeSpec, ...]
    predicate: Expr | None
    body: tuple[Stmt, ...]
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Program:
    clauses: tuple[ProbeClause, ...]


def walk_stmts(stmts):
    """Yield every statement in document order, descending into bodies."""
    for s in stmts:
        yield s
        if isinstance(s, If):
            yield from walk_stmts(s.then_body)
            yield from walk_stmts(s.else_body)
        elif isinstance(s, Unroll):
            yield from walk_stmts(s.body)


def stmt_exprs(s: Stmt):
    """Yield the expressions a statement holds directly (no descent)."""
    if isinstance(s, Assign):
        yield s.target
        yield s.value
    elif isinstance(s, MapAssign):
        yield from s.keys
        yield s.value
    elif isinstance(s, Delete):
        yield from s.keys
    elif isinstance(s, Printf):
        yield from s.args
    elif isinstance(s, ExprStmt):
        yield s.value
    elif isinstance(s, If):
        yield s.cond
    elif isinstance(s, (Assume, Assert)):
        yield s.cond


def walk_exprs(e: Expr):
    """Yield e and every sub-expression, outermost first."""
    yield e
    if isinstance(e, MapAccess):
        for k in e.keys:
            yield from walk_exprs(k)
    elif isinstance(e, FieldChain):
        yield from walk_exprs(e.base)
    elif isinstance(e, Cast):
        yield from walk_exprs(e.value)
    elif isinstance(e, Unary):
        yield from walk_exprs(e.operand)
    elif isinstance(e, Binary):
        yield from walk_exprs(e.lhs)
        yield from walk_exprs(e.rhs)
    elif isinstance(e, Call):
        for a in e.args:
            yield from walk_exprs(a)


def iter_annotations(program: Program):
    for clause in program.clauses:
        for s in walk_stmts(clause.body):
            if isinstance(s, (Assume, Assert)):
                yield s


def has_annotations(program: Program) -> bool:
    return next(iter_annotations(program), None) is not None
