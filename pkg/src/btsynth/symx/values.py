"""Symbolic value terms produced by expression evaluation.

A term is either Concrete (a known constant), a Symbol (an unknown the
solver may assign), an Op (a fixed-width operation over sub-terms), or an
Uninterpreted application (helper calls like ntop and map reads, later
reduced to fresh symbols plus congruence constraints).

Widths: width > 0 is a bit-vector of that many bits; width == 0 is the
boolean sort used for comparisons, logical connectives, path constraints
and goals. Concrete values are stored masked into [0, 2**width); the signed
flag is promotion metadata, not a semantic property of the stored bits.

Hashes are cached on first use: terms are DAGs and get used as dict keys
heavily during bit-blasting.
"""

from __future__ import annotations

from dataclasses import dataclass

BOOL = 0

BV_OPS = frozenset(
    {"add", "sub", "mul", "udiv", "urem", "and", "or", "xor", "shl", "lshr",
     "neg", "bitnot", "bswap", "zext", "sext", "trunc", "ite"}
)
CMP_OPS = frozenset({"eq", "ne", "ult", "ule", "ugt", "uge", "slt", "sle", "sgt", "sge"})
BOOL_OPS = frozenset({"band", "bor", "bnot"})


class SymExpr:
    __slots__ = ()


@dataclass(frozen=True)
class Concrete(SymExpr):
    value: int
    width: int
    signed: bool = False

    def __post_init__(self):
        mask = (1 << self.width) - 1 if self.width else 1
        object.__setattr__(self, "value", self.value & mask)

    def __hash__(self):
        return hash(("c", self.value, self.width))


@dataclass(frozen=True)
class Symbol(SymExpr):
    name: str
    width: int
    signed: bool = False

    def __hash__(self):
        return hash(("s", self.name, self.width))


@dataclass(frozen=True)
class Op(SymExpr):
    op: str
    operands: tuple[SymExpr, ...]
    width: int
    signed: bool = False

    def __hash__(self):
        cached = getattr(self, "_hash", None)
        if cached is None:
            cached = hash((self.op, self.operands, self.width))
            object.__setattr__(self, "_hash", cached)
        return cached


@dataclass(frozen=True)
class Uninterpreted(SymExpr):
    fn: str
    args: tuple[SymExpr, ...]
    width: int = 64
    signed: bool = False

    def __hash__(self):
        cached = getattr(self, "_hash", None)
        if cached is None:
            cached = hash((self.fn, self.args, self.width))
            object.__setattr__(self, "_hash", cached)
        return cached


TRUE = Concrete(1, BOOL)
FALSE = Concrete(0, BOOL)


def walk(expr: SymExpr, seen: set[int] | None = None):
    """Yield every node of the term DAG once."""
    if seen is None:
        seen = set()
    if id(expr) in seen:
        return
    seen.add(id(expr))
    yield expr
    if isinstance(expr, Op):
        for child in expr.operands:
            yield from walk(child, seen)
    elif isinstance(expr, Uninterpreted):
        for child in expr.args:
            yield from walk(child, seen)


def symbols_of(exprs) -> dict[str, Symbol]:
    out: dict[str, Symbol] = {}
    seen: set[int] = set()
    for e in exprs:
        for node in walk(e, seen):
            if isinstance(node, Symbol):
                out.setdefault(node.name, node)
    return out


def uninterpreted_of(exprs) -> list[Uninterpreted]:
    """Distinct applications in first-encounter order (deterministic)."""
    out: list[Uninterpreted] = []
    index: set[Uninterpreted] = set()
    seen: set[int] = set()
    for e in exprs:
        for node in walk(e, seen):
            if isinstance(node, Uninterpreted) and node not in index:
                index.add(node)
                out.append(node)
    return out
