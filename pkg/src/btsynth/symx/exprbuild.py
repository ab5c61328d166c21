"""Smart constructors for symbolic terms.

These fold constants eagerly (via the reference concrete semantics) and
handle width promotion, so the executor can build terms without worrying
about either. Promotion: operands widen to the larger width, sign-extending
when the narrower operand is signed; mixed-signedness comparisons compare
unsigned, matching the documented dialect semantics.
"""

from __future__ import annotations

from . import concrete
from .values import BOOL, Concrete, FALSE, Op, SymExpr, TRUE


def _all_concrete(*terms: SymExpr) -> bool:
    return all(isinstance(t, Concrete) for t in terms)


def _fold(op: str, width: int, operands: tuple[SymExpr, ...], signed: bool = False) -> SymExpr:
    if _all_concrete(*operands):
        value = concrete.eval_op(
            op, width, [t.value for t in operands], [t.width for t in operands]
        )
        return Concrete(value, width, signed)
    return Op(op, operands, width, signed)


def resize(value: SymExpr, width: int, signed: bool | None = None) -> SymExpr:
    """Widen, narrow or re-flag a term. Booleans become 0/1 bit-vectors."""
    if signed is None:
        signed = value.signed
    if value.width == BOOL and width != BOOL:
        one = Concrete(1, width)
        zero = Concrete(0, width)
        if isinstance(value, Concrete):
            return Concrete(value.value, width, signed)
        return Op("ite", (value, one, zero), width, signed)
    if value.width == width:
        if value.signed == signed:
            return value
        if isinstance(value, Concrete):
            return Concrete(value.value, width, signed)
        return Op("zext", (value,), width, signed)  # same width, re-flag only
    if width < value.width:
        return _fold("trunc", width, (value,), signed)
    kind = "sext" if value.signed else "zext"
    return _fold(kind, width, (value,), signed)


def promote_pair(a: SymExpr, b: SymExpr) -> tuple[SymExpr, SymExpr, int]:
    if a.width == BOOL:
        a = resize(a, 64)
    if b.width == BOOL:
        b = resize(b, 64)
    width = max(a.width, b.width)
    return resize(a, width), resize(b, width), width


def arith(op: str, a: SymExpr, b: SymExpr) -> SymExpr:
    a, b, width = promote_pair(a, b)
    return _fold(op, width, (a, b), a.signed and b.signed)


def compare(op: str, a: SymExpr, b: SymExpr) -> SymExpr:
    """op is the unsigned mnemonic (eq/ne/ult/ule/ugt/uge); the ordered ones
    switch to their signed forms when both operands are signed."""
    a, b, _ = promote_pair(a, b)
    if op not in ("eq", "ne") and a.signed and b.signed:
        op = {"ult": "slt", "ule": "sle", "ugt": "sgt", "uge": "sge"}[op]
    if not isinstance(a, Concrete) or not isinstance(b, Concrete):
        # trivially true/false unsigned bounds
        if op == "uge" and isinstance(b, Concrete) and b.value == 0:
            return TRUE
        if op == "ult" and isinstance(b, Concrete) and b.value == 0:
            return FALSE
    return _fold(op, BOOL, (a, b))


def eq(a: SymExpr, b: SymExpr) -> SymExpr:
    return compare("eq", a, b)


def ne(a: SymExpr, b: SymExpr) -> SymExpr:
    return compare("ne", a, b)


def coerce_bool(v: SymExpr) -> SymExpr:
    if v.width == BOOL:
        return v
    return ne(v, Concrete(0, v.width))


def band(a: SymExpr, b: SymExpr) -> SymExpr:
    a, b = coerce_bool(a), coerce_bool(b)
    if a == TRUE:
        return b
    if b == TRUE:
        return a
    if FALSE in (a, b):
        return FALSE
    return _fold("band", BOOL, (a, b))


def bor(a: SymExpr, b: SymExpr) -> SymExpr:
    a, b = coerce_bool(a), coerce_bool(b)
    if a == FALSE:
        return b
    if b == FALSE:
        return a
    if TRUE in (a, b):
        return TRUE
    return _fold("bor", BOOL, (a, b))


def bnot(a: SymExpr) -> SymExpr:
    a = coerce_bool(a)
    if a == TRUE:
        return FALSE
    if a == FALSE:
        return TRUE
    return _fold("bnot", BOOL, (a,))


def negate(a: SymExpr) -> SymExpr:
    return _fold("neg", a.width, (a,), a.signed)


def bitnot(a: SymExpr) -> SymExpr:
    return _fold("bitnot", a.width, (a,), a.signed)


def byteswap(a: SymExpr) -> SymExpr:
    if a.width == BOOL or a.width % 8:
        raise ValueError(f"bswap needs a byte-multiple width, got {a.width}")
    return _fold("bswap", a.width, (a,), a.signed)


def ite(cond: SymExpr, then_v: SymExpr, else_v: SymExpr) -> SymExpr:
    cond = coerce_bool(cond)
    then_v, else_v, width = promote_pair(then_v, else_v)
    if cond == TRUE:
        return then_v
    if cond == FALSE:
        return else_v
    if then_v == else_v:
        return then_v
    if _all_concrete(cond, then_v, else_v):
        return then_v if cond.value else else_v
    return Op("ite", (cond, then_v, else_v), width, then_v.signed and else_v.signed)
