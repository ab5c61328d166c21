"""SMT-LIB v2 serialization of constraint queries and solver-output parsing.

Symbols are emitted as |quoted| names so the display names used internally
(which contain ->, $, spaces and parentheses) survive verbatim. Quoted
SMT-LIB symbols cannot contain a pipe or backslash, so those two characters
are mangled reversibly. Byte swaps become concat-of-extract chains; every
other operation maps one-to-one onto QF_AUFBV.
"""

from __future__ import annotations

from typing import Iterator, Sequence

from .values import BOOL, Concrete, Op, SymExpr, Symbol, Uninterpreted, symbols_of, uninterpreted_of

_BINOPS = {
    "add": "bvadd", "sub": "bvsub", "mul": "bvmul", "udiv": "bvudiv",
    "urem": "bvurem", "and": "bvand", "or": "bvor", "xor": "bvxor",
    "shl": "bvshl", "lshr": "bvlshr",
    "ult": "bvult", "ule": "bvule", "ugt": "bvugt", "uge": "bvuge",
    "slt": "bvslt", "sle": "bvsle", "sgt": "bvsgt", "sge": "bvsge",
}


def _mangle(name: str) -> str:
    return name.replace("\\", "<bs>").replace("|", "<bar>")


def _unmangle(name: str) -> str:
    return name.replace("<bar>", "|").replace("<bs>", "\\")


def _sym(name: str) -> str:
    return f"|{_mangle(name)}|"


def _fun_name(fn: str, arity: int) -> str:
    return _sym(f"{fn}.{arity}")


def _term(e: SymExpr) -> str:
    if isinstance(e, Concrete):
        if e.width == BOOL:
            return "true" if e.value else "false"
        return f"(_ bv{e.value} {e.width})"
    if isinstance(e, Symbol):
        return _sym(e.name)
    if isinstance(e, Uninterpreted):
        head = _fun_name(e.fn, len(e.args))
        if not e.args:
            return head
        return "(" + head + " " + " ".join(_term(a) for a in e.args) + ")"
    assert isinstance(e, Op)
    op, args = e.op, e.operands
    if op in _BINOPS:
        return f"({_BINOPS[op]} {_term(args[0])} {_term(args[1])})"
    if op == "neg":
        return f"(bvneg {_term(args[0])})"
    if op == "bitnot":
        return f"(bvnot {_term(args[0])})"
    if op == "eq":
        return f"(= {_term(args[0])} {_term(args[1])})"
    if op == "ne":
        return f"(not (= {_term(args[0])} {_term(args[1])}))"
    if op == "band":
        return f"(and {_term(args[0])} {_term(args[1])})"
    if op == "bor":
        return f"(or {_term(args[0])} {_term(args[1])})"
    if op == "bnot":
        return f"(not {_term(args[0])})"
    if op == "ite":
        return f"(ite {_term(args[0])} {_term(args[1])} {_term(args[2])})"
    if op == "zext":
        return f"((_ zero_extend {e.width - args[0].width}) {_term(args[0])})"
    if op == "sext":
        return f"((_ sign_extend {e.width - args[0].width}) {_term(args[0])})"
    if op == "trunc":
        return f"((_ extract {e.width - 1} 0) {_term(args[0])})"
    if op == "bswap":
        inner = _term(args[0])
        w = e.width
        bytes_le = [f"((_ extract {i + 7} {i}) {inner})" for i in range(0, w, 8)]
        out = bytes_le[0]
        for part in bytes_le[1:]:
            out = f"(concat {out} {part})"
        return out
    raise ValueError(f"cannot serialize operator {op!r}")


def emit_smtlib(constraints: Sequence[SymExpr], logic: str = "QF_AUFBV") -> str:
    """Render a complete solver script: declarations, assertions,
    (check-sat) and (get-model)."""
    lines = ["(set-option :produce-models true)", f"(set-logic {logic})"]
    syms = symbols_of(constraints)
    for name in sorted(syms):
        lines.append(f"(declare-const {_sym(name)} (_ BitVec {syms[name].width}))")
    seen_funs = set()
    for app in uninterpreted_of(constraints):
        key = (app.fn, len(app.args))
        if key in seen_funs:
            continue
        seen_funs.add(key)
        doms = " ".join(f"(_ BitVec {a.width})" for a in app.args)
        lines.append(
            f"(declare-fun {_fun_name(*key)} ({doms}) (_ BitVec {app.width}))"
        )
    for c in constraints:
        lines.append(f"(assert {_term(c)})")
    lines.append("(check-sat)")
    lines.append("(get-model)")
    return "\n".join(lines) + "\n"


def tokenize_sexpr(text: str) -> Iterator[str]:
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch in " \t\r\n":
            i += 1
        elif ch == ";":
            while i < n and text[i] != "\n":
                i += 1
        elif ch in "()":
            yield ch
            i += 1
        elif ch == "|":
            j = text.index("|", i + 1)
            yield text[i : j + 1]
            i = j + 1
        elif ch == '"':
            j = i + 1
            while j < n:
                if text[j] == '"':
                    if j + 1 < n and text[j + 1] == '"':
                        j += 2
                        continue
                    break
                j += 1
            yield text[i : j + 1]
            i = j + 1
        else:
            j = i
            while j < n and text[j] not in ' \t\r\n();"|':
                j += 1
            yield text[i:j]
            i = j


def parse_sexprs(tokens: Iterator[str]) -> list:
    """Build nested lists from a token stream; atoms stay strings."""
    stack: list[list] = [[]]
    for tok in tokens:
        if tok == "(":
            stack.append([])
        elif tok == ")":
            done = stack.pop()
            if not stack:
                raise ValueError("unbalanced parentheses in solver output")
            stack[-1].append(done)
        else:
            stack[-1].append(tok)
    if len(stack) != 1:
        raise ValueError("unterminated s-expression in solver output")
    return stack[0]


def _atom_name(tok: str) -> str:
    if tok.startswith("|") and tok.endswith("|"):
        tok = tok[1:-1]
    return _unmangle(tok)


def parse_value(node) -> int:
    if isinstance(node, list):
        if len(node) == 3 and node[0] == "_" and node[1].startswith("bv"):
            return int(node[1][2:])
        raise ValueError(f"unrecognized model value {node!r}")
    if node.startswith("#x"):
        return int(node[2:], 16)
    if node.startswith("#b"):
        return int(node[2:], 2)
    if node == "true":
        return 1
    if node == "false":
        return 0
    return int(node)


def parse_solver_output(text: str) -> tuple[str, dict[str, int] | None]:
    """Extract (status, model) from a solver's stdout. The model maps
    display names back through the quoting mangle."""
    forms = parse_sexprs(tokenize_sexpr(text))
    status = None
    model: dict[str, int] = {}
    for form in forms:
        if isinstance(form, str):
            if form in ("sat", "unsat", "unknown") and status is None:
                status = form
            continue
        entries = form
        if entries and entries[0] == "model":
            entries = entries[1:]
        for entry in entries:
            if (
                isinstance(entry, list)
                and len(entry) >= 5
                and entry[0] == "define-fun"
                and entry[2] == []
            ):
                model[_atom_name(entry[1])] = parse_value(entry[4])
    if status is None:
        raise ValueError("no sat/unsat answer in solver output")
    return status, (model if status == "sat" else None)
