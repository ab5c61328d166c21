"""Recursive-descent parser for the accepted bpftrace dialect.

The grammar is deliberately small: probe clauses with optional /predicate/
guards, scratch and map assignments, delete, printf, if/else, unroll with a
literal bound, assume/assert annotations, and C-style expressions over
builtins, scratch vars, maps, field chains, casts and a fixed call set.
Anything else is a ParseError carrying the offending line and column.

One dialect restriction worth naming: '/' is not available as a division
operator inside a /predicate/, where it would be ambiguous with the closing
delimiter. Division anywhere else is fine.
"""

from __future__ import annotations

from .errors import EmptyProgramError, ParseError
from .lexer import Token, tokenize
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
    SCALAR_TYPE_NAMES,
)

_KEYWORDS = frozenset(
    {"if", "else", "unroll", "delete", "printf", "assume", "assert", "struct"}
)

_PRECEDENCE = {
    "||": 1,
    "&&": 2,
    "|": 3,
    "^": 4,
    "&": 5,
    "==": 6,
    "!=": 6,
    "<": 7,
    "<=": 7,
    ">": 7,
    ">=": 7,
    "<<": 8,
    ">>": 8,
    "+": 9,
    "-": 9,
    "*": 10,
    "/": 10,
    "%": 10,
}


class Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.index = 0
        self._in_predicate = False
        self._pred_depth = 0

    # -- token plumbing -----------------------------------------------------

    def peek(self, offset: int = 0) -> Token:
        i = min(self.index + offset, len(self.tokens) - 1)
        return self.tokens[i]

    def advance(self) -> Token:
        tok = self.tokens[self.index]
        if tok.kind != "EOF":
            self.index += 1
        if self._in_predicate and tok.kind == "OP":
            if tok.value in ("(", "["):
                self._pred_depth += 1
            elif tok.value in (")", "]"):
                self._pred_depth -= 1
        return tok

    def at_op(self, text: str) -> bool:
        tok = self.peek()
        return tok.kind == "OP" and tok.value == text

    def expect_op(self, text: str) -> Token:
        tok = self.peek()
        if not self.at_op(text):
            raise self._err(tok, f"expected {text!r}, found {self._describe(tok)}")
        return self.advance()

    def expect(self, kind: str, what: str) -> Token:
        tok = self.peek()
        if tok.kind != kind:
            raise self._err(tok, f"expected {what}, found {self._describe(tok)}")
        return self.advance()

    @staticmethod
    def _describe(tok: Token) -> str:
        return "end of input" if tok.kind == "EOF" else repr(tok.value)

    @staticmethod
    def _err(tok: Token, message: str) -> ParseError:
        return ParseError(message, tok.line, tok.column)

    # -- program structure --------------------------------------------------

    def parse_program(self) -> Program:
        clauses: list[ProbeClause] = []
        while self.peek().kind != "EOF":
            clauses.append(self.parse_clause())
        if not clauses:
            raise EmptyProgramError()
        return Program(tuple(clauses))

    def parse_clause(self) -> ProbeClause:
        tok = self.peek()
        if tok.kind != "ATTACH":
            raise self._err(tok, f"expected probe attach point, found {self._describe(tok)}")
        attach = [self._attach_spec(self.advance())]
        while self.at_op(","):
            self.advance()
            attach.append(self._attach_spec(self.expect("ATTACH", "probe attach point")))
        predicate = None
        if self.at_op("/"):
            self.advance()
            self._in_predicate = True
            self._pred_depth = 0
            try:
                predicate = self.parse_expr()
            finally:
                self._in_predicate = False
            self.expect_op("/")
        body = self.parse_block()
        return ProbeClause(
            tuple(attach), predicate, body, line=tok.line, column=tok.column
        )

    @staticmethod
    def _attach_spec(tok: Token) -> ProbeSpec:
        kind, _, target = tok.value.partition(":")
        return ProbeSpec(kind, target, line=tok.line, column=tok.column)

    def parse_block(self) -> tuple[Stmt, ...]:
        self.expect_op("{")
        body: list[Stmt] = []
        while not self.at_op("}"):
            if self.peek().kind == "EOF":
                raise self._err(self.peek(), "unterminated block, expected '}'")
            body.append(self.parse_stmt())
        self.advance()
        return tuple(body)

    # -- statements ---------------------------------------------------------

    def parse_stmt(self) -> Stmt:
        tok = self.peek()
        if tok.kind == "IDENT":
            handler = {
                "if": self._parse_if,
                "unroll": self._parse_unroll,
                "delete": self._parse_delete,
                "printf": self._parse_printf,
                "assume": self._parse_assume,
                "assert": self._parse_assert,
            }.get(tok.value)
            if handler is not None:
                return handler()
            if tok.value == "else":
                raise self._err(tok, "'else' without a preceding if")
        expr = self.parse_expr()
        if self.at_op("="):
            eq = self.advance()
            value = self.parse_expr()
            self._semi()
            if isinstance(expr, ScratchVar):
                return Assign(expr, value, line=expr.line, column=expr.column)
            if isinstance(expr, MapAccess):
                return MapAssign(
                    expr.name, expr.keys, value, line=expr.line, column=expr.column
                )
            raise self._err(eq, "only scratch variables and maps can be assigned")
        self._semi()
        return ExprStmt(expr, line=tok.line, column=tok.column)

    def _semi(self):
        self.expect_op(";")

    def _parse_if(self) -> Stmt:
        tok = self.advance()
        self.expect_op("(")
        cond = self.parse_expr()
        self.expect_op(")")
        then_body = self.parse_block()
        else_body: tuple[Stmt, ...] = ()
        nxt = self.peek()
        if nxt.kind == "IDENT" and nxt.value == "else":
            self.advance()
            else_body = self.parse_block()
        return If(cond, then_body, else_body, line=tok.line, column=tok.column)

    def _parse_unroll(self) -> Stmt:
        tok = self.advance()
        self.expect_op("(")
        count_tok = self.expect("INT", "an integer unroll bound")
        count = int(count_tok.value, 0)
        if count < 1:
            raise self._err(count_tok, "unroll bound must be a positive integer literal")
        self.expect_op(")")
        body = self.parse_block()
        return Unroll(count, body, line=tok.line, column=tok.column)

    def _parse_delete(self) -> Stmt:
        tok = self.advance()
        self.expect_op("(")
        name_tok = self.expect("MAPNAME", "a map name")
        keys: tuple[Expr, ...] = ()
        if self.at_op("["):
            keys = self._bracket_keys()
        self.expect_op(")")
        self._semi()
        return Delete(name_tok.value, keys, line=tok.line, column=tok.column)

    def _parse_printf(self) -> Stmt:
        tok = self.advance()
        self.expect_op("(")
        fmt_tok = self.expect("STRING", "a format string")
        args: list[Expr] = []
        while self.at_op(","):
            self.advance()
            args.append(self.parse_expr())
        self.expect_op(")")
        self._semi()
        return Printf(fmt_tok.value, tuple(args), line=tok.line, column=tok.column)

    def _parse_assume(self) -> Stmt:
        tok = self.advance()
        self.expect_op("(")
        cond = self.parse_expr()
        self.expect_op(")")
        self._semi()
        return Assume(cond, line=tok.line, column=tok.column)

    def _parse_assert(self) -> Stmt:
        tok = self.advance()
        self.expect_op("(")
        cond = self.parse_expr()
        self.expect_op(")")
        self._semi()
        return Assert(cond, line=tok.line, column=tok.column)

    # -- expressions ----------------------------------------------------------

    def parse_expr(self) -> Expr:
        return self._parse_binary(1)

    def _parse_binary(self, min_prec: int) -> Expr:
        left = self._parse_unary()
        while True:
            tok = self.peek()
            if tok.kind != "OP":
                return left
            prec = _PRECEDENCE.get(tok.value)
            if prec is None or prec < min_prec:
                return left
            if tok.value == "/" and self._in_predicate and self._pred_depth == 0:
                return left  # closing delimiter, not division
            self.advance()
            right = self._parse_binary(prec + 1)
            left = Binary(tok.value, left, right, line=tok.line, column=tok.column)

    def _cast_lookahead(self) -> bool:
        if not self.at_op("("):
            return False
        nxt = self.peek(1)
        if nxt.kind != "IDENT":
            return False
        return nxt.value == "struct" or nxt.value in SCALAR_TYPE_NAMES

    def _parse_cast(self) -> Expr:
        open_tok = self.advance()  # '('
        parts: list[str] = []
        tok = self.advance()
        if tok.value == "struct":
            name = self.expect("IDENT", "a struct name")
            parts.append(f"struct {name.value}")
        else:
            parts.append(tok.value)
        stars = 0
        while self.at_op("*"):
            self.advance()
            stars += 1
        self.expect_op(")")
        type_name = parts[0] + (" " + "*" * stars if stars else "")
        operand = self._parse_unary()
        return Cast(type_name, operand, line=open_tok.line, column=open_tok.column)

    def _parse_unary(self) -> Expr:
        if self._cast_lookahead():
            return self._parse_cast()
        tok = self.peek()
        if tok.kind == "OP" and tok.value in ("!", "~", "-"):
            self.advance()
            operand = self._parse_unary()
            return Unary(tok.value, operand, line=tok.line, column=tok.column)
        return self._parse_postfix(self._parse_primary())

    def _parse_postfix(self, expr: Expr) -> Expr:
        while True:
            if self.at_op("->"):
                self.advance()
                name = self._dotted_name()
                if isinstance(expr, FieldChain):
                    expr = FieldChain(
                        expr.base, expr.fields + (name,), line=expr.line, column=expr.column
                    )
                else:
                    expr = FieldChain(expr, (name,), line=expr.line, column=expr.column)
            elif self.at_op("[") and isinstance(expr, MapAccess) and not expr.keys:
                keys = self._bracket_keys()
                expr = MapAccess(expr.name, keys, line=expr.line, column=expr.column)
            else:
                return expr

    def _bracket_keys(self) -> tuple[Expr, ...]:
        self.expect_op("[")
        keys = [self.parse_expr()]
        while self.at_op(","):
            self.advance()
            keys.append(self.parse_expr())
        self.expect_op("]")
        return tuple(keys)

    def _dotted_name(self) -> str:
        parts = [self.expect("IDENT", "a field name").value]
        while self.at_op("."):
            self.advance()
            parts.append(self.expect("IDENT", "a field name").value)
        return ".".join(parts)

    def _parse_primary(self) -> Expr:
        tok = self.peek()
        if tok.kind == "INT":
            self.advance()
            return IntLit(
                int(tok.value, 0),
                hex=tok.value.lower().startswith("0x"),
                line=tok.line,
                column=tok.column,
            )
        if tok.kind == "STRING":
            self.advance()
            return StrLit(tok.value, line=tok.line, column=tok.column)
        if tok.kind == "SCRATCH":
            self.advance()
            return ScratchVar(tok.value, line=tok.line, column=tok.column)
        if tok.kind == "MAPNAME":
            self.advance()
            return MapAccess(tok.value, line=tok.line, column=tok.column)
        if tok.kind == "IDENT":
            return self._parse_ident(tok)
        if self.at_op("("):
            self.advance()
            inner = self.parse_expr()
            self.expect_op(")")
            return inner
        raise self._err(tok, f"expected an expression, found {self._describe(tok)}")

    def _parse_ident(self, tok: Token) -> Expr:
        self.advance()
        name = tok.value
        if name in CALL_NAMES and self.at_op("("):
            self.advance()
            args: list[Expr] = []
            if not self.at_op(")"):
                args.append(self.parse_expr())
                while self.at_op(","):
                    self.advance()
                    args.append(self.parse_expr())
            self.expect_op(")")
            return Call(name, tuple(args), line=tok.line, column=tok.column)
        if name == "args":
            self.expect_op(".")
            field = self.expect("IDENT", "a tracepoint field name")
            return BuiltinVar(f"args.{field.value}", line=tok.line, column=tok.column)
        if name in BUILTIN_NAMES:
            return BuiltinVar(name, line=tok.line, column=tok.column)
        if name in _KEYWORDS or name in CALL_NAMES:
            raise self._err(tok, f"unexpected keyword {name!r} in expression")
        raise self._err(tok, f"unknown identifier {name!r}")


def parse(text: str) -> Program:
    return Parser(text).parse_program()
