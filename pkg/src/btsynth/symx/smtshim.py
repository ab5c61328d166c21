"""A miniature SMT-LIB v2 solver process over the QF_AUFBV fragment the
emitter produces.

Reads a script on stdin, prints sat/unsat for each (check-sat) and a model
block for (get-model). Decisions are delegated to the in-process bit-blast
stack, so this is not an independent oracle; it exists to exercise the
process-backend plumbing end to end and to give the emitter a consumer.

    python -m btsynth.symx.smtshim < query.smt2
"""

from __future__ import annotations

import sys

from .ackermann import ackermannize
from .bitblast import BitBlaster
from .satcore import SatSolver
from .smtlib import _atom_name, parse_sexprs, tokenize_sexpr
from .values import BOOL, FALSE, TRUE, Concrete, Op, SymExpr, Uninterpreted

_BIN = {
    "bvadd": "add", "bvsub": "sub", "bvmul": "mul", "bvudiv": "udiv",
    "bvurem": "urem", "bvand": "and", "bvor": "or", "bvxor": "xor",
    "bvshl": "shl", "bvlshr": "lshr",
}
_CMP = {
    "bvult": "ult", "bvule": "ule", "bvugt": "ugt", "bvuge": "uge",
    "bvslt": "slt", "bvsle": "sle", "bvsgt": "sgt", "bvsge": "sge",
}
_NARY = {"bvadd", "bvmul", "bvand", "bvor", "bvxor"}


class ShimError(Exception):
    pass


def _zext(e: SymExpr, width: int) -> SymExpr:
    if e.width == width:
        return e
    return Op("zext", (e,), width)


def _bool_not(e: SymExpr) -> SymExpr:
    return Op("bnot", (e,), BOOL)


class _Script:
    def __init__(self):
        self.symbols: dict[str, SymExpr] = {}
        self.funs: dict[str, int] = {}
        self.constraints: list[SymExpr] = []
        self.model: dict[str, int] | None = None
        self.out: list[str] = []

    def run(self, text: str) -> str:
        for form in parse_sexprs(tokenize_sexpr(text)):
            if not isinstance(form, list) or not form:
                continue
            self._command(form)
        return "".join(line + "\n" for line in self.out)

    def _command(self, form: list) -> None:
        head = form[0]
        if head in ("set-option", "set-logic", "set-info", "exit"):
            return
        if head == "declare-const":
            self._declare(form[1], [], form[2])
        elif head == "declare-fun":
            self._declare(form[1], form[2], form[3])
        elif head == "assert":
            term = self._term(form[1])
            if term.width != BOOL:
                raise ShimError("asserted term is not boolean")
            self.constraints.append(term)
        elif head == "check-sat":
            self._check()
        elif head == "get-model":
            self._print_model()
        else:
            raise ShimError(f"unsupported command {head!r}")

    @staticmethod
    def _sort_width(sort) -> int:
        if isinstance(sort, list) and len(sort) == 3 and sort[0] == "_" and sort[1] == "BitVec":
            return int(sort[2])
        if sort == "Bool":
            return BOOL
        raise ShimError(f"unsupported sort {sort!r}")

    def _declare(self, name_tok: str, domain: list, ret_sort) -> None:
        name = _atom_name(name_tok)
        width = self._sort_width(ret_sort)
        if domain:
            for d in domain:
                self._sort_width(d)
            self.funs[name] = width
        else:
            from .values import Symbol

            self.symbols[name] = Symbol(name, width)

    def _term(self, node) -> SymExpr:
        if isinstance(node, str):
            return self._atom(node)
        if not node:
            raise ShimError("empty application")
        head = node[0]
        if head == "_":
            if node[1].startswith("bv"):
                return Concrete(int(node[1][2:]), int(node[2]))
            raise ShimError(f"unsupported indexed atom {node!r}")
        if isinstance(head, list) and head and head[0] == "_":
            return self._indexed(head, [self._term(a) for a in node[1:]])
        args = [self._term(a) for a in node[1:]]
        return self._apply(head, args)

    def _atom(self, tok: str) -> SymExpr:
        if tok.startswith("#x"):
            return Concrete(int(tok[2:], 16), 4 * (len(tok) - 2))
        if tok.startswith("#b"):
            return Concrete(int(tok[2:], 2), len(tok) - 2)
        if tok == "true":
            return TRUE
        if tok == "false":
            return FALSE
        if tok.lstrip("-").isdigit():
            raise ShimError("integer literals need a bit-vector sort")
        name = _atom_name(tok)
        sym = self.symbols.get(name)
        if sym is not None:
            return sym
        if name in self.funs:
            return Uninterpreted(name, (), self.funs[name])
        raise ShimError(f"unknown symbol {name!r}")

    def _indexed(self, head: list, args: list[SymExpr]) -> SymExpr:
        kind = head[1]
        (arg,) = args
        if kind == "zero_extend":
            k = int(head[2])
            return arg if k == 0 else Op("zext", (arg,), arg.width + k)
        if kind == "sign_extend":
            k = int(head[2])
            return arg if k == 0 else Op("sext", (arg,), arg.width + k)
        if kind == "extract":
            hi, lo = int(head[2]), int(head[3])
            term = arg
            if lo:
                term = Op("lshr", (term, Concrete(lo, term.width)), term.width)
            width = hi - lo + 1
            return term if width == term.width else Op("trunc", (term,), width)
        raise ShimError(f"unsupported indexed operator {kind!r}")

    def _apply(self, head: str, args: list[SymExpr]) -> SymExpr:
        if head in _BIN:
            if len(args) > 2 and head not in _NARY:
                raise ShimError(f"{head} is binary")
            acc = args[0]
            for nxt in args[1:]:
                acc = Op(_BIN[head], (acc, nxt), acc.width)
            return acc
        if head in _CMP:
            return Op(_CMP[head], tuple(args), BOOL)
        if head == "bvneg":
            return Op("neg", (args[0],), args[0].width)
        if head == "bvnot":
            return Op("bitnot", (args[0],), args[0].width)
        if head == "concat":
            acc = args[0]
            for nxt in args[1:]:
                width = acc.width + nxt.width
                shifted = Op("shl", (_zext(acc, width), Concrete(nxt.width, width)), width)
                acc = Op("or", (shifted, _zext(nxt, width)), width)
            return acc
        if head == "=":
            a, b = args
            if a.width == BOOL:
                both = Op("band", (a, b), BOOL)
                neither = Op("band", (_bool_not(a), _bool_not(b)), BOOL)
                return Op("bor", (both, neither), BOOL)
            return Op("eq", (a, b), BOOL)
        if head == "distinct":
            a, b = args
            return Op("ne", (a, b), BOOL)
        if head == "not":
            return _bool_not(args[0])
        if head in ("and", "or"):
            op = "band" if head == "and" else "bor"
            acc = args[0]
            for nxt in args[1:]:
                acc = Op(op, (acc, nxt), BOOL)
            return acc
        if head == "=>":
            a, b = args
            return Op("bor", (_bool_not(a), b), BOOL)
        if head == "ite":
            c, t, e = args
            return Op("ite", (c, t, e), t.width)
        name = _atom_name(head)
        if name in self.funs:
            return Uninterpreted(name, tuple(args), self.funs[name])
        raise ShimError(f"unknown function {name!r}")

    def _check(self) -> None:
        solver = SatSolver()
        blaster = BitBlaster(solver)
        for c in ackermannize(self.constraints):
            blaster.assert_true(c)
        if solver.ok and solver.solve(None):
            self.model = blaster.model()
            self.out.append("sat")
        else:
            self.model = None
            self.out.append("unsat")

    def _print_model(self) -> None:
        if self.model is None:
            self.out.append('(error "model unavailable")')
            return
        from .smtlib import _sym

        lines = ["("]
        for name in sorted(self.symbols):
            sym = self.symbols[name]
            value = self.model.get(name, 0)
            lines.append(
                f"  (define-fun {_sym(name)} () (_ BitVec {sym.width}) "
                f"#x{value:0{sym.width // 4}x})"
            )
        lines.append(")")
        self.out.extend(lines)


def main(argv=None) -> int:
    text = sys.stdin.read()
    try:
        sys.stdout.write(_Script().run(text))
    except (ShimError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
