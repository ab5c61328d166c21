"""Compile boolean terms to a postfix program for the grid kernels.

The exhaustive backend sweeps every assignment of the query's symbols and
needs a representation both kernels (Cython and numpy) can execute without
touching Python object trees. Opcode numbering is part of the kernel ABI:

     0 PUSH_CONST a=value          1 PUSH_SYM a=symbol index
     2 ADD   3 SUB   4 MUL   5 UDIV   6 UREM     (a=width)
     7 AND   8 OR    9 XOR  10 SHL   11 LSHR     (a=width)
    12 EQ   13 NE   14 ULT  15 ULE   16 UGT  17 UGE
    18 SLT  19 SLE  20 SGT  21 SGE                (a=operand width)
    22 BAND 23 BOR  24 BNOT
    25 NEG  26 BITNOT 27 BSWAP                    (a=width)
    28 SEXT (a=from width, b=to width) 29 TRUNC/ZEXT (a=to width)
    30 ITE  (pops else, then, cond)

Values on the evaluation stack are uint64, always masked to their term's
width; booleans are 0/1.
"""

from __future__ import annotations

from .values import BOOL, Concrete, Op, SymExpr, Symbol, Uninterpreted, symbols_of

MAX_SYMBOLS = 3
MAX_SYMBOL_WIDTH = 8
_STACK_LIMIT = 60

_BINOPS = {
    "add": 2, "sub": 3, "mul": 4, "udiv": 5, "urem": 6,
    "and": 7, "or": 8, "xor": 9, "shl": 10, "lshr": 11,
    "eq": 12, "ne": 13, "ult": 14, "ule": 15, "ugt": 16, "uge": 17,
    "slt": 18, "sle": 19, "sgt": 20, "sge": 21,
    "band": 22, "bor": 23,
}
_UNOPS = {"bnot": 24, "neg": 25, "bitnot": 26, "bswap": 27}


class UnsupportedForEnumeration(Exception):
    pass


class GridProgram:
    def __init__(self, ops, pa, pb, starts, sym_names, sym_widths):
        self.ops = ops
        self.pa = pa
        self.pb = pb
        self.starts = starts  # len == number of constraints + 1
        self.sym_names = sym_names
        self.sym_widths = sym_widths

    @property
    def domains(self) -> list[int]:
        return [1 << w for w in self.sym_widths]


def compile_query(constraints: list[SymExpr]) -> GridProgram:
    syms = symbols_of(constraints)
    names = sorted(syms)
    if len(names) > MAX_SYMBOLS:
        raise UnsupportedForEnumeration(
            f"{len(names)} symbols, exhaustive sweep handles at most {MAX_SYMBOLS}"
        )
    for name in names:
        w = syms[name].width
        if w == BOOL or w > MAX_SYMBOL_WIDTH:
            raise UnsupportedForEnumeration(
                f"symbol {name!r} is {w} bits wide, limit is {MAX_SYMBOL_WIDTH}"
            )
    index = {name: i for i, name in enumerate(names)}

    ops: list[int] = []
    pa: list[int] = []
    pb: list[int] = []
    depth = 0
    max_depth = 0

    def emit(op: int, a: int = 0, b: int = 0, delta: int = 0):
        nonlocal depth, max_depth
        ops.append(op)
        pa.append(a)
        pb.append(b)
        depth += delta
        max_depth = max(max_depth, depth)
        if max_depth > _STACK_LIMIT:
            raise UnsupportedForEnumeration("term too deep for the grid kernels")

    def walk(e: SymExpr):
        if isinstance(e, Concrete):
            emit(0, e.value, delta=1)
            return
        if isinstance(e, Symbol):
            emit(1, index[e.name], delta=1)
            return
        if isinstance(e, Uninterpreted):
            raise UnsupportedForEnumeration(
                f"uninterpreted application {e.fn!r} cannot be enumerated"
            )
        assert isinstance(e, Op)
        if e.op == "ite":
            walk(e.operands[0])
            walk(e.operands[1])
            walk(e.operands[2])
            emit(30, delta=-2)
            return
        if e.op in ("zext", "trunc"):
            walk(e.operands[0])
            emit(29, e.width)
            return
        if e.op == "sext":
            walk(e.operands[0])
            emit(28, e.operands[0].width, e.width)
            return
        if e.op in _UNOPS:
            walk(e.operands[0])
            emit(_UNOPS[e.op], e.width)
            return
        if e.op in _BINOPS:
            walk(e.operands[0])
            walk(e.operands[1])
            # comparisons need the operand width for sign handling
            width = e.operands[0].width if e.width == BOOL else e.width
            emit(_BINOPS[e.op], width, delta=-1)
            return
        raise UnsupportedForEnumeration(f"operation {e.op!r} not supported by the kernels")

    starts = [0]
    for c in constraints:
        depth = 0
        walk(c)
        starts.append(len(ops))

    widths = [syms[name].width for name in names]
    return GridProgram(ops, pa, pb, starts, names, widths)
