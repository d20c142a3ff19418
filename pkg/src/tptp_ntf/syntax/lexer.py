"""Tokenizer for the NX0 subset of the TPTP language.

Whitespace is skipped; comments are kept as ``comment`` tokens so that the
token stream plus the skipped whitespace reproduces the input exactly.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from ..errors import LexError

KEYWORD = "keyword"
LOWER_WORD = "lower_word"
UPPER_WORD = "upper_word"
DEFINED_WORD = "defined_word"
SYSTEM_WORD = "system_word"
SINGLE_QUOTED = "single_quoted"
HASH_WORD = "hash_word"
PUNCTUATION = "punctuation"
CONNECTIVE = "connective"
INTEGER = "integer"
COMMENT = "comment"

KEYWORDS = frozenset({"tff", "thf", "fof", "cnf", "include"})

# Longest first: the scanner takes the first alternative that matches.
CONNECTIVES = (
    "[.]", "<.>",
    "<~>", "<=>", "=>", "<=", "~|", "~&", "!=", "!>", "?*", "@+", "@-",
    ":=", "==",
    "!", "?", "~", "|", "&", "=", "@", "*", ">", "^", "+",
)
PUNCTUATION_CHARS = "()[]{},.:-"

_WORD_TAIL = re.compile(r"[A-Za-z0-9_]*")
_DIGITS = re.compile(r"[0-9]+")
_HASH_TAIL = re.compile(r"\$?\$?[A-Za-z0-9_]+")
_WHITESPACE = re.compile(r"\s+")
LOWER_WORD_RE = re.compile(r"[a-z][A-Za-z0-9_]*\Z")


@dataclass(frozen=True)
class Token:
    kind: str
    lexeme: str
    line: int
    column: int
    offset: int

    def __repr__(self) -> str:
        return f"Token({self.kind}, {self.lexeme!r}, {self.line}:{self.column})"


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    pos = 0
    line = 1
    line_start = 0
    n = len(text)

    def emit(kind: str, end: int) -> None:
        tokens.append(Token(kind, text[pos:end], line, pos - line_start + 1, pos))

    while pos < n:
        ch = text[pos]
        if ch.isspace():
            m = _WHITESPACE.match(text, pos)
            end = m.end()
        elif ch == "%":
            end = text.find("\n", pos)
            end = n if end < 0 else end
            emit(COMMENT, end)
        elif text.startswith("/*", pos):
            close = text.find("*/", pos + 2)
            if close < 0:
                raise LexError("unterminated block comment", line, pos - line_start + 1)
            end = close + 2
            emit(COMMENT, end)
        elif ch == "'":
            end = _scan_quoted(text, pos, line, pos - line_start + 1)
            emit(SINGLE_QUOTED, end)
        elif ch.isalpha():
            end = _WORD_TAIL.match(text, pos + 1).end()
            word = text[pos:end]
            if ch.isupper():
                kind = UPPER_WORD
            elif word in KEYWORDS:
                kind = KEYWORD
            else:
                kind = LOWER_WORD
            emit(kind, end)
        elif ch == "$":
            if text.startswith("$$", pos):
                end = _WORD_TAIL.match(text, pos + 2).end()
                kind = SYSTEM_WORD
                if end == pos + 2:
                    raise LexError("empty system word", line, pos - line_start + 1)
            else:
                end = _WORD_TAIL.match(text, pos + 1).end()
                kind = DEFINED_WORD
                if end == pos + 1:
                    raise LexError("empty defined word", line, pos - line_start + 1)
            emit(kind, end)
        elif ch == "#":
            m = _HASH_TAIL.match(text, pos + 1)
            if m is None:
                raise LexError("'#' must be followed by a constant", line, pos - line_start + 1)
            end = m.end()
            emit(HASH_WORD, end)
        elif ch.isdigit():
            end = _DIGITS.match(text, pos).end()
            emit(INTEGER, end)
        else:
            for sym in CONNECTIVES:
                if text.startswith(sym, pos):
                    end = pos + len(sym)
                    emit(CONNECTIVE, end)
                    break
            else:
                if ch in PUNCTUATION_CHARS:
                    end = pos + 1
                    emit(PUNCTUATION, end)
                else:
                    raise LexError(f"unexpected character {ch!r}", line, pos - line_start + 1)
        newlines = text.count("\n", pos, end)
        if newlines:
            line += newlines
            line_start = text.rfind("\n", pos, end) + 1
        pos = end
    return tokens


def _scan_quoted(text: str, start: int, line: int, column: int) -> int:
    pos = start + 1
    while pos < len(text):
        ch = text[pos]
        if ch == "\\":
            pos += 2
            continue
        if ch == "'":
            if pos == start + 1:
                raise LexError("empty quoted atom", line, column)
            return pos + 1
        if ch == "\n":
            break
        pos += 1
    raise LexError("unterminated quoted atom", line, column)


def reconstruct(text: str, tokens: list[Token]) -> str:
    """Rebuild *text* from tokens and the whitespace gaps between them."""
    out: list[str] = []
    pos = 0
    for tok in tokens:
        gap = text[pos:tok.offset]
        if gap and not gap.isspace():
            raise ValueError(f"non-whitespace gap before {tok!r}")
        out.append(gap)
        out.append(tok.lexeme)
        pos = tok.offset + len(tok.lexeme)
    tail = text[pos:]
    if tail and not tail.isspace():
        raise ValueError("non-whitespace tail")
    out.append(tail)
    return "".join(out)


def unquote(atom: str) -> str:
    """Canonical symbol key: ``'abc'`` and ``abc`` denote the same symbol."""
    if len(atom) >= 2 and atom[0] == "'" and atom[-1] == "'":
        inner = atom[1:-1].replace("\\'", "'").replace("\\\\", "\\")
        if LOWER_WORD_RE.match(inner):
            return inner
    return atom
