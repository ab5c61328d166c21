from .errors import EmptyProgramError, ParseError
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
    BUILTIN_NAMES,
    CALL_NAMES,
    PROBE_KINDS,
    has_annotations,
    iter_annotations,
    stmt_exprs,
    walk_exprs,
    walk_stmts,
)
from .parser import parse
from .render import escape_string, extract_probes, render, render_expr, strip_annotations

__all__ = [
    "Assert", "Assign", "Assume", "Binary", "BuiltinVar", "Call", "Cast",
    "Delete", "EmptyProgramError", "Expr", "ExprStmt", "FieldChain", "If",
    "IntLit", "MapAccess", "MapAssign", "ParseError", "Printf", "Program",
    "ProbeClause", "ProbeSpec", "ScratchVar", "Stmt", "StrLit", "Unary",
    "Unroll", "BUILTIN_NAMES", "CALL_NAMES", "PROBE_KINDS",
    "escape_string", "extract_probes", "has_annotations", "iter_annotations",
    "parse", "render", "render_expr", "stmt_exprs", "strip_annotations",
    "walk_exprs", "walk_stmts",
]
