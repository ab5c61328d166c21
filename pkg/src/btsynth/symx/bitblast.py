"""Translate symbolic terms into CNF over a SAT solver.

Standard circuits: ripple-carry adders, shift-add multiplication, barrel
shifters for symbolic shift amounts, borrow-style unsigned comparison with
the sign-bit flip for signed forms. Division and modulo are encoded by the
multiplication axiom (d != 0 implies q*d + r == n and r < d, computed at
doubled width so nothing overflows) with the SMT-LIB zero-divisor results
multiplexed in. Gate constructors fold constants aggressively, so circuits
over mostly-concrete inputs collapse before they reach the solver.

Uninterpreted applications must be reduced away (see ackermann.py) before
terms get here.
"""

from __future__ import annotations

from .satcore import SatSolver
from .values import BOOL, Concrete, Op, SymExpr, Symbol, Uninterpreted


class BitBlaster:
    def __init__(self, solver: SatSolver | None = None):
        self.sat = solver or SatSolver()
        t = self.sat.new_var()
        self.sat.add_clause([t])
        self.TRUE = t
        self.FALSE = -t
        self._gates: dict[tuple, int] = {}
        self._bv_memo: dict[SymExpr, list[int]] = {}
        self._bool_memo: dict[SymExpr, int] = {}
        self._div_memo: dict[tuple, tuple[list[int], list[int]]] = {}
        self.sym_bits: dict[str, list[int]] = {}
        self.sym_width: dict[str, int] = {}

    # -- gate level ---------------------------------------------------------

    def g_and(self, a: int, b: int) -> int:
        if a == self.FALSE or b == self.FALSE:
            return self.FALSE
        if a == self.TRUE:
            return b
        if b == self.TRUE:
            return a
        if a == b:
            return a
        if a == -b:
            return self.FALSE
        key = ("and", min(a, b), max(a, b))
        z = self._gates.get(key)
        if z is None:
            z = self.sat.new_var()
            self.sat.add_clause([-z, a])
            self.sat.add_clause([-z, b])
            self.sat.add_clause([z, -a, -b])
            self._gates[key] = z
        return z

    def g_or(self, a: int, b: int) -> int:
        return -self.g_and(-a, -b)

    def g_xor(self, a: int, b: int) -> int:
        if a == self.FALSE:
            return b
        if b == self.FALSE:
            return a
        if a == self.TRUE:
            return -b
        if b == self.TRUE:
            return -a
        if a == b:
            return self.FALSE
        if a == -b:
            return self.TRUE
        # xor(a,b) == xor(-a,-b); canonicalize on a positive smaller literal
        if abs(b) < abs(a):
            a, b = b, a
        if a < 0:
            a, b = -a, -b
        key = ("xor", a, b)
        z = self._gates.get(key)
        if z is None:
            z = self.sat.new_var()
            self.sat.add_clause([-z, a, b])
            self.sat.add_clause([-z, -a, -b])
            self.sat.add_clause([z, -a, b])
            self.sat.add_clause([z, a, -b])
            self._gates[key] = z
        return z

    def g_ite(self, c: int, t: int, e: int) -> int:
        if c == self.TRUE:
            return t
        if c == self.FALSE:
            return e
        if t == e:
            return t
        if t == self.TRUE:
            return self.g_or(c, e)
        if t == self.FALSE:
            return self.g_and(-c, e)
        if e == self.TRUE:
            return self.g_or(-c, t)
        if e == self.FALSE:
            return self.g_and(c, t)
        if t == -e:
            return self.g_xnor(c, t)
        key = ("ite", c, t, e)
        z = self._gates.get(key)
        if z is None:
            z = self.sat.new_var()
            self.sat.add_clause([-c, -t, z])
            self.sat.add_clause([-c, t, -z])
            self.sat.add_clause([c, -e, z])
            self.sat.add_clause([c, e, -z])
            self.sat.add_clause([-t, -e, z])
            self.sat.add_clause([t, e, -z])
            self._gates[key] = z
        return z

    def g_xnor(self, a: int, b: int) -> int:
        return -self.g_xor(a, b)

    # -- vector level ---------------------------------------------------------

    def const_bits(self, value: int, width: int) -> list[int]:
        return [self.TRUE if (value >> i) & 1 else self.FALSE for i in range(width)]

    def symbol_bits(self, sym: Symbol) -> list[int]:
        bits = self.sym_bits.get(sym.name)
        if bits is None:
            bits = [self.sat.new_var() for _ in range(sym.width)]
            self.sym_bits[sym.name] = bits
            self.sym_width[sym.name] = sym.width
        return bits

    def v_add(self, a: list[int], b: list[int], carry: int | None = None) -> list[int]:
        carry = self.FALSE if carry is None else carry
        out = []
        for ai, bi in zip(a, b):
            axb = self.g_xor(ai, bi)
            out.append(self.g_xor(axb, carry))
            carry = self.g_or(self.g_and(ai, bi), self.g_and(axb, carry))
        return out

    def v_sub(self, a: list[int], b: list[int]) -> list[int]:
        return self.v_add(a, [-x for x in b], carry=self.TRUE)

    def v_neg(self, a: list[int]) -> list[int]:
        zero = [self.FALSE] * len(a)
        return self.v_sub(zero, a)

    def v_mul(self, a: list[int], b: list[int]) -> list[int]:
        w = len(a)
        acc = [self.FALSE] * w
        for i, bi in enumerate(b):
            if bi == self.FALSE:
                continue
            partial = [self.FALSE] * i + [self.g_and(aj, bi) for aj in a[: w - i]]
            acc = self.v_add(acc, partial)
        return acc

    def v_divmod(self, n: list[int], d: list[int]) -> tuple[list[int], list[int]]:
        key = (tuple(n), tuple(d))
        hit = self._div_memo.get(key)
        if hit is not None:
            return hit
        w = len(n)
        q = [self.sat.new_var() for _ in range(w)]
        r = [self.sat.new_var() for _ in range(w)]
        pad = [self.FALSE] * w
        prod = self.v_mul(q + pad, d + pad)
        total = self.v_add(prod, r + pad)
        eqn = self.v_eq(total, n + pad)
        rlt = self.v_ult(r, d)
        d_zero = self.v_eq(d, [self.FALSE] * w)
        self.sat.add_clause([d_zero, eqn])
        self.sat.add_clause([d_zero, rlt])
        quot = self.v_ite(d_zero, [self.TRUE] * w, q)
        rem = self.v_ite(d_zero, n, r)
        self._div_memo[key] = (quot, rem)
        return quot, rem

    def v_eq(self, a: list[int], b: list[int]) -> int:
        acc = self.TRUE
        for ai, bi in zip(a, b):
            acc = self.g_and(acc, self.g_xnor(ai, bi))
            if acc == self.FALSE:
                return acc
        return acc

    def v_ult(self, a: list[int], b: list[int]) -> int:
        lt = self.FALSE
        for ai, bi in zip(a, b):  # LSB to MSB; the last bit dominates
            lt = self.g_ite(self.g_xor(ai, bi), bi, lt)
        return lt

    def v_slt(self, a: list[int], b: list[int]) -> int:
        a2 = a[:-1] + [-a[-1]]
        b2 = b[:-1] + [-b[-1]]
        return self.v_ult(a2, b2)

    def v_ite(self, c: int, t: list[int], e: list[int]) -> list[int]:
        return [self.g_ite(c, ti, ei) for ti, ei in zip(t, e)]

    def _shift_const(self, bits: list[int], amount: int, left: bool) -> list[int]:
        w = len(bits)
        if amount >= w:
            return [self.FALSE] * w
        if left:
            return [self.FALSE] * amount + bits[: w - amount]
        return bits[amount:] + [self.FALSE] * amount

    def v_shift(self, bits: list[int], amt: list[int], left: bool) -> list[int]:
        w = len(bits)
        stages = [k for k in range(len(amt)) if (1 << k) < w]
        cur = bits
        for k in stages:
            cur = self.v_ite(amt[k], self._shift_const(cur, 1 << k, left), cur)
        overflow = self.FALSE
        for k in range(len(amt)):
            if (1 << k) >= w:
                overflow = self.g_or(overflow, amt[k])
        return self.v_ite(overflow, [self.FALSE] * w, cur)

    def v_bswap(self, bits: list[int]) -> list[int]:
        chunks = [bits[i : i + 8] for i in range(0, len(bits), 8)]
        out: list[int] = []
        for chunk in reversed(chunks):
            out.extend(chunk)
        return out

    # -- term translation --------------------------------------------------------

    def bv(self, expr: SymExpr) -> list[int]:
        hit = self._bv_memo.get(expr)
        if hit is not None:
            return hit
        bits = self._bv_inner(expr)
        self._bv_memo[expr] = bits
        return bits

    def _bv_inner(self, expr: SymExpr) -> list[int]:
        if isinstance(expr, Concrete):
            return self.const_bits(expr.value, expr.width)
        if isinstance(expr, Symbol):
            return self.symbol_bits(expr)
        if isinstance(expr, Uninterpreted):
            raise ValueError(f"uninterpreted {expr.fn!r} reached the bit-blaster")
        assert isinstance(expr, Op)
        op = expr.op
        if op == "ite":
            c = self.bool(expr.operands[0])
            return self.v_ite(c, self.bv(expr.operands[1]), self.bv(expr.operands[2]))
        if op in ("zext", "trunc", "sext"):
            bits = self.bv(expr.operands[0])
            w = expr.width
            if len(bits) >= w:
                return bits[:w]
            if op == "sext":
                return bits + [bits[-1]] * (w - len(bits))
            return bits + [self.FALSE] * (w - len(bits))
        args = [self.bv(operand) for operand in expr.operands]
        if op == "add":
            return self.v_add(args[0], args[1])
        if op == "sub":
            return self.v_sub(args[0], args[1])
        if op == "mul":
            return self.v_mul(args[0], args[1])
        if op == "udiv":
            return self.v_divmod(args[0], args[1])[0]
        if op == "urem":
            return self.v_divmod(args[0], args[1])[1]
        if op == "and":
            return [self.g_and(x, y) for x, y in zip(args[0], args[1])]
        if op == "or":
            return [self.g_or(x, y) for x, y in zip(args[0], args[1])]
        if op == "xor":
            return [self.g_xor(x, y) for x, y in zip(args[0], args[1])]
        if op == "shl":
            return self.v_shift(args[0], args[1], left=True)
        if op == "lshr":
            return self.v_shift(args[0], args[1], left=False)
        if op == "neg":
            return self.v_neg(args[0])
        if op == "bitnot":
            return [-x for x in args[0]]
        if op == "bswap":
            return self.v_bswap(args[0])
        raise ValueError(f"not a bit-vector operation: {op!r}")

    def bool(self, expr: SymExpr) -> int:
        hit = self._bool_memo.get(expr)
        if hit is not None:
            return hit
        lit = self._bool_inner(expr)
        self._bool_memo[expr] = lit
        return lit

    def _bool_inner(self, expr: SymExpr) -> int:
        if isinstance(expr, Concrete):
            return self.TRUE if expr.value else self.FALSE
        if not isinstance(expr, Op):
            raise ValueError(f"expected a boolean term, got {type(expr).__name__}")
        op = expr.op
        if op == "band":
            return self.g_and(self.bool(expr.operands[0]), self.bool(expr.operands[1]))
        if op == "bor":
            return self.g_or(self.bool(expr.operands[0]), self.bool(expr.operands[1]))
        if op == "bnot":
            return -self.bool(expr.operands[0])
        if op == "ite" and expr.width == BOOL:
            return self.g_ite(
                self.bool(expr.operands[0]),
                self.bool(expr.operands[1]),
                self.bool(expr.operands[2]),
            )
        a = self.bv(expr.operands[0])
        b = self.bv(expr.operands[1])
        if op == "eq":
            return self.v_eq(a, b)
        if op == "ne":
            return -self.v_eq(a, b)
        if op == "ult":
            return self.v_ult(a, b)
        if op == "ule":
            return -self.v_ult(b, a)
        if op == "ugt":
            return self.v_ult(b, a)
        if op == "uge":
            return -self.v_ult(a, b)
        if op == "slt":
            return self.v_slt(a, b)
        if op == "sle":
            return -self.v_slt(b, a)
        if op == "sgt":
            return self.v_slt(b, a)
        if op == "sge":
            return -self.v_slt(a, b)
        raise ValueError(f"not a boolean operation: {op!r}")

    # -- top level ------------------------------------------------------------------

    def assert_true(self, expr: SymExpr):
        self.sat.add_clause([self.bool(expr)])

    def model(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for name, bits in self.sym_bits.items():
            value = 0
            for i, lit in enumerate(bits):
                v = abs(lit)
                bit = self.sat.model_value(v)
                if lit < 0:
                    bit = not bit
                if bit:
                    value |= 1 << i
            out[name] = value
        return out
