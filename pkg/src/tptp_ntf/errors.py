from __future__ import annotations


class TptpError(Exception):
    """Base class for every error raised by the toolkit."""


class PositionedError(TptpError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.message = message
        self.line = line
        self.column = column
        where = f" at {line}:{column}" if line is not None else ""
        super().__init__(f"{message}{where}")


class LexError(PositionedError):
    pass


class ParseError(PositionedError):
    def __init__(
        self,
        message: str,
        line: int | None = None,
        column: int | None = None,
        expected: frozenset[str] = frozenset(),
    ):
        self.expected = expected
        if expected:
            message = f"{message} (expected one of: {', '.join(sorted(expected))})"
        super().__init__(message, line, column)


class UnsupportedDialectError(ParseError):
    pass


class TypingError(TptpError):
    pass


class LogicSpecError(TptpError):
    pass


class EmbeddingError(TptpError):
    pass


class InterpretationError(TptpError):
    pass


class EvaluationError(TptpError):
    pass


class DerivationError(TptpError):
    pass
