"""Canonical pretty-printer. parse(render(p)) == p structurally."""

from __future__ import annotations

from .nodes import (
    Assert,
    Assign,
    Assume,
    Binary,
    BuiltinVar,
    Call,
    Cast,
    Delete,
    Expr,
    ExprStmt,
    FieldChain,
    If,
    IntLit,
    MapAccess,
    MapAssign,
    Printf,
    Program,
    ProbeClause,
    ProbeSpec,
    ScratchVar,
    Stmt,
    StrLit,
    Unary,
    Unroll,
)

_INDENT = "    "

_PREC = {
    "||": 1, "&&": 2, "|": 3, "^": 4, "&": 5,
    "==": 6, "!=": 6, "<": 7, "<=": 7, ">": 7, ">=": 7,
    "<<": 8, ">>": 8, "+": 9, "-": 9, "*": 10, "/": 10, "%": 10,
}
_UNARY_PREC = 11
_POSTFIX_PREC = 12
_ATOM_PREC = 100

_STR_ESCAPES = {"\\": "\\\\", '"': '\\"', "\n": "\\n", "\t": "\\t", "\r": "\\r", "\0": "\\0"}


def escape_string(value: str) -> str:
    return "".join(_STR_ESCAPES.get(ch, ch) for ch in value)


def _prec(e: Expr) -> int:
    if isinstance(e, Binary):
        return _PREC[e.op]
    if isinstance(e, (Unary, Cast)):
        return _UNARY_PREC
    if isinstance(e, FieldChain):
        return _POSTFIX_PREC
    return _ATOM_PREC


def render_expr(e: Expr) -> str:
    if isinstance(e, IntLit):
        return hex(e.value) if e.hex and e.value >= 0 else str(e.value)
    if isinstance(e, StrLit):
        return f'"{escape_string(e.value)}"'
    if isinstance(e, BuiltinVar):
        return e.name
    if isinstance(e, ScratchVar):
        return f"${e.name}"
    if isinstance(e, MapAccess):
        if e.keys:
            return f"@{e.name}[{', '.join(render_expr(k) for k in e.keys)}]"
        return f"@{e.name}"
    if isinstance(e, FieldChain):
        base = render_expr(e.base)
        if _prec(e.base) < _POSTFIX_PREC:
            base = f"({base})"
        return base + "".join(f"->{f}" for f in e.fields)
    if isinstance(e, Cast):
        operand = render_expr(e.value)
        if _prec(e.value) < _UNARY_PREC:
            operand = f"({operand})"
        return f"({e.type_name}) {operand}"
    if isinstance(e, Unary):
        operand = render_expr(e.operand)
        if _prec(e.operand) < _UNARY_PREC:
            operand = f"({operand})"
        return f"{e.op}{operand}"
    if isinstance(e, Binary):
        prec = _PREC[e.op]
        lhs = render_expr(e.lhs)
        if _prec(e.lhs) < prec:
            lhs = f"({lhs})"
        rhs = render_expr(e.rhs)
        if _prec(e.rhs) <= prec:
            rhs = f"({rhs})"
        return f"{lhs} {e.op} {rhs}"
    if isinstance(e, Call):
        return f"{e.name}({', '.join(render_expr(a) for a in e.args)})"
    raise TypeError(f"cannot render {type(e).__name__}")


def _render_stmt(s: Stmt, depth: int) -> list[str]:
    pad = _INDENT * depth
    if isinstance(s, Assign):
        return [f"{pad}{render_expr(s.target)} = {render_expr(s.value)};"]
    if isinstance(s, MapAssign):
        lhs = MapAccess(s.name, s.keys)
        return [f"{pad}{render_expr(lhs)} = {render_expr(s.value)};"]
    if isinstance(s, Delete):
        return [f"{pad}delete({render_expr(MapAccess(s.name, s.keys))});"]
    if isinstance(s, Printf):
        parts = [f'"{escape_string(s.fmt)}"'] + [render_expr(a) for a in s.args]
        return [f"{pad}printf({', '.join(parts)});"]
    if isinstance(s, ExprStmt):
        return [f"{pad}{render_expr(s.value)};"]
    if isinstance(s, If):
        lines = [f"{pad}if ({render_expr(s.cond)}) {{"]
        for child in s.then_body:
            lines.extend(_render_stmt(child, depth + 1))
        if s.else_body:
            lines.append(f"{pad}}} else {{")
            for child in s.else_body:
                lines.extend(_render_stmt(child, depth + 1))
        lines.append(f"{pad}}}")
        return lines
    if isinstance(s, Unroll):
        lines = [f"{pad}unroll ({s.count}) {{"]
        for child in s.body:
            lines.extend(_render_stmt(child, depth + 1))
        lines.append(f"{pad}}}")
        return lines
    if isinstance(s, Assume):
        return [f"{pad}assume({render_expr(s.cond)});"]
    if isinstance(s, Assert):
        return [f"{pad}assert({render_expr(s.cond)});"]
    raise TypeError(f"cannot render {type(s).__name__}")


def _slash_outside_parens(text: str) -> bool:
    depth = 0
    in_string = False
    i = 0
    while i < len(text):
        ch = text[i]
        if in_string:
            if ch == "\\":
                i += 1
            elif ch == '"':
                in_string = False
        elif ch == '"':
            in_string = True
        elif ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        elif ch == "/" and depth == 0:
            return True
        i += 1
    return False


def _render_predicate(expr: Expr) -> str:
    # A '/' at paren depth zero would read as the closing delimiter, so
    # predicates containing top-level division get wrapped in parentheses.
    text = render_expr(expr)
    if _slash_outside_parens(text):
        text = f"({text})"
    return text


def render(program: Program) -> str:
    chunks: list[str] = []
    for clause in program.clauses:
        lines = [", ".join(p.key for p in clause.attach_points)]
        if clause.predicate is not None:
            lines.append(f"/{_render_predicate(clause.predicate)}/")
        lines.append("{")
        for s in clause.body:
            lines.extend(_render_stmt(s, 1))
        lines.append("}")
        chunks.append("\n".join(lines))
    return "\n\n".join(chunks) + "\n"


def _strip_body(body: tuple[Stmt, ...]) -> tuple[Stmt, ...]:
    out: list[Stmt] = []
    for s in body:
        if isinstance(s, (Assume, Assert)):
            continue
        if isinstance(s, If):
            out.append(
                If(
                    s.cond,
                    _strip_body(s.then_body),
                    _strip_body(s.else_body),
                    line=s.line,
                    column=s.column,
                )
            )
        elif isinstance(s, Unroll):
            out.append(Unroll(s.count, _strip_body(s.body), line=s.line, column=s.column))
        else:
            out.append(s)
    return tuple(out)


def strip_annotations(program: Program) -> Program:
    return Program(
        tuple(
            ProbeClause(
                c.attach_points,
                c.predicate,
                _strip_body(c.body),
                line=c.line,
                column=c.column,
            )
            for c in program.clauses
        )
    )


def extract_probes(program: Program) -> list[ProbeSpec]:
    return [spec for clause in program.clauses for spec in clause.attach_points]
