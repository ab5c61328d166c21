"""Tokenizer with line/column tracking.

Attach points are lexed as single tokens: when a probe-kind identifier is
followed directly by ':' the whole attach point (up to whitespace, '{' or
',') becomes one ATTACH token. That keeps uprobe paths with slashes intact
and leaves '/' free to delimit predicates elsewhere.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ParseError
from .nodes import PROBE_KINDS

_MULTI_OPS = ("->", "||", "&&", "==", "!=", "<=", ">=", "<<", ">>")
_SINGLE_OPS = "+-*/%&|^!~<>=(){}[];,./"

_ESCAPES = {"n": "\n", "t": "\t", "r": "\r", '"': '"', "\\": "\\", "0": "\0"}


@dataclass(frozen=True, slots=True)
class Token:
    kind: str  # ATTACH, IDENT, INT, STRING, SCRATCH, MAPNAME, OP, EOF
    value: str
    line: int
    column: int


def _is_ident_start(ch: str) -> bool:
    return ch.isalpha() or ch == "_"


def _is_ident_char(ch: str) -> bool:
    return ch.isalnum() or ch == "_"


class Lexer:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.line = 1
        self.column = 1

    def error(self, message: str) -> ParseError:
        return ParseError(message, self.line, self.column)

    def _peek(self, offset: int = 0) -> str:
        i = self.pos + offset
        return self.text[i] if i < len(self.text) else ""

    def _advance(self, n: int = 1) -> str:
        taken = self.text[self.pos : self.pos + n]
        for ch in taken:
            if ch == "\n":
                self.line += 1
                self.column = 1
            else:
                self.column += 1
        self.pos += n
        return taken

    def _skip_trivia(self):
        while self.pos < len(self.text):
            ch = self._peek()
            if ch in " \t\r\n":
                self._advance()
            elif ch == "#" and self.pos == 0 and self._peek(1) == "!":
                while self.pos < len(self.text) and self._peek() != "\n":
                    self._advance()
            elif ch == "/" and self._peek(1) == "/":
                while self.pos < len(self.text) and self._peek() != "\n":
                    self._advance()
            elif ch == "/" and self._peek(1) == "*":
                self._advance(2)
                while self.pos < len(self.text):
                    if self._peek() == "*" and self._peek(1) == "/":
                        self._advance(2)
                        break
                    self._advance()
                else:
                    raise self.error("unterminated block comment")
            else:
                return

    def _lex_string(self) -> Token:
        line, col = self.line, self.column
        self._advance()  # opening quote
        out: list[str] = []
        while True:
            if self.pos >= len(self.text):
                raise ParseError("unterminated string literal", line, col)
            ch = self._advance()
            if ch == '"':
                break
            if ch == "\n":
                raise ParseError("newline inside string literal", line, col)
            if ch == "\\":
                esc = self._advance()
                if esc not in _ESCAPES:
                    raise self.error(f"unknown escape sequence \\{esc}")
                out.append(_ESCAPES[esc])
            else:
                out.append(ch)
        return Token("STRING", "".join(out), line, col)

    def _lex_number(self) -> Token:
        line, col = self.line, self.column
        start = self.pos
        if self._peek() == "0" and self._peek(1) in "xX":
            self._advance(2)
            if not self._peek().isalnum():
                raise self.error("malformed hex literal")
            while _is_ident_char(self._peek()):
                self._advance()
            text = self.text[start : self.pos]
            try:
                int(text, 16)
            except ValueError:
                raise ParseError(f"malformed hex literal {text!r}", line, col) from None
            return Token("INT", text, line, col)
        while self._peek().isdigit():
            self._advance()
        if _is_ident_start(self._peek()):
            raise self.error("identifier may not start with a digit")
        return Token("INT", self.text[start : self.pos], line, col)

    def _lex_attach(self, kind_start: int, line: int, col: int) -> Token:
        # called with pos just past "kind:"; eat the rest of the attach point
        while self.pos < len(self.text) and self._peek() not in " \t\r\n{,":
            self._advance()
        value = self.text[kind_start : self.pos]
        if value.endswith(":"):
            raise ParseError("attach point has empty target", line, col)
        return Token("ATTACH", value, line, col)

    def _lex_word(self) -> Token:
        line, col = self.line, self.column
        start = self.pos
        while _is_ident_char(self._peek()):
            self._advance()
        word = self.text[start : self.pos]
        if word in PROBE_KINDS and self._peek() == ":":
            self._advance()
            return self._lex_attach(start, line, col)
        return Token("IDENT", word, line, col)

    def _lex_sigil(self, kind: str) -> Token:
        line, col = self.line, self.column
        self._advance()  # sigil
        start = self.pos
        while _is_ident_char(self._peek()):
            self._advance()
        name = self.text[start : self.pos]
        if not name:
            raise ParseError(f"expected a name after {'$' if kind == 'SCRATCH' else '@'}", line, col)
        return Token(kind, name, line, col)

    def next_token(self) -> Token:
        self._skip_trivia()
        if self.pos >= len(self.text):
            return Token("EOF", "", self.line, self.column)
        ch = self._peek()
        if ch == '"':
            return self._lex_string()
        if ch.isdigit():
            return self._lex_number()
        if ch == "$":
            return self._lex_sigil("SCRATCH")
        if ch == "@":
            return self._lex_sigil("MAPNAME")
        if _is_ident_start(ch):
            return self._lex_word()
        line, col = self.line, self.column
        two = self.text[self.pos : self.pos + 2]
        if two in _MULTI_OPS:
            self._advance(2)
            return Token("OP", two, line, col)
        if ch in _SINGLE_OPS:
            self._advance()
            return Token("OP", ch, line, col)
        raise self.error(f"unexpected character {ch!r}")


def tokenize(text: str) -> list[Token]:
    lexer = Lexer(text)
    tokens: list[Token] = []
    while True:
        tok = lexer.next_token()
        tokens.append(tok)
        if tok.kind == "EOF":
            return tokens
