from __future__ import annotations


class ParseError(Exception):
    """Raised on any input outside the accepted dialect."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{line}:{column}: {message}")
        self.message = message
        self.line = line
        self.column = column


class EmptyProgramError(ParseError):
    def __init__(self):
        super().__init__("no probe clause found", 1, 1)
