"""Lexical scanner for MiniSpec source text.

The scanner is total: any input, well formed or not, is split into a token
stream whose spans tile the text exactly. It never builds a syntax tree, so
token classes stay available while the buffer is mid-edit.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

KEYWORDS = frozenset({
    "method", "function", "returns", "requires", "ensures", "decreases",
    "invariant", "var", "if", "else", "while", "assert", "assume",
    "return", "forall", "old", "true", "false", "int", "bool", "array",
})

# Longest match first; every prefix of a multi-char operator is also a
# valid single so maximal munch never dead-ends.
_MULTI_OPS = ("==>", "==", "!=", "<=", ">=", "&&", "||", ":=", "::")
_SINGLE_OPS = frozenset("+-*/%<>!=.,;:()[]{}")


class TokenKind(Enum):
    KEYWORD = "Keyword"
    IDENT = "Ident"
    NUMBER = "Number"
    OPERATOR = "Operator"
    COMMENT = "Comment"
    WHITESPACE = "Whitespace"
    STRING_LIT = "StringLit"
    ERROR = "Error"


@dataclass(frozen=True, order=True)
class Span:
    """0-based source range, end-exclusive in both line and column."""

    start_line: int
    start_col: int
    end_line: int
    end_col: int

    def contains(self, line: int, col: int) -> bool:
        return (self.start_line, self.start_col) <= (line, col) < (self.end_line, self.end_col)

    def contains_span(self, other: "Span") -> bool:
        return ((self.start_line, self.start_col) <= (other.start_line, other.start_col)
                and (other.end_line, other.end_col) <= (self.end_line, self.end_col))


def merge_spans(a: Span, b: Span) -> Span:
    start = min((a.start_line, a.start_col), (b.start_line, b.start_col))
    end = max((a.end_line, a.end_col), (b.end_line, b.end_col))
    return Span(start[0], start[1], end[0], end[1])


@dataclass(frozen=True)
class Token:
    kind: TokenKind
    span: Span
    text: str


class _Cursor:
    __slots__ = ("text", "pos", "line", "col")

    def __init__(self, text: str) -> None:
        self.text = text
        self.pos = 0
        self.line = 0
        self.col = 0

    def peek(self, offset: int = 0) -> str:
        i = self.pos + offset
        return self.text[i] if i < len(self.text) else ""

    def advance(self, n: int = 1) -> None:
        for _ in range(n):
            if self.pos >= len(self.text):
                return
            if self.text[self.pos] == "\n":
                self.line += 1
                self.col = 0
            else:
                self.col += 1
            self.pos += 1

    def mark(self) -> tuple[int, int, int]:
        return self.pos, self.line, self.col


# ASCII-only classes: source files are UTF-8, but identifiers, numbers, and
# whitespace follow the ASCII grammar; anything else is an Error token.
_WHITESPACE = frozenset(" \t\r\n\f\v")


def _is_digit(ch: str) -> bool:
    return "0" <= ch <= "9"


def _is_ident_start(ch: str) -> bool:
    return "a" <= ch <= "z" or "A" <= ch <= "Z" or ch == "_"


def _is_ident_char(ch: str) -> bool:
    return _is_ident_start(ch) or _is_digit(ch)


def lex_scan(text: str) -> list[Token]:
    """Split ``text`` into tokens covering it exactly.

    Unknown characters become single-character Error tokens; unterminated
    comments and string literals run to end of input. Reassembling the token
    texts in order reproduces the input verbatim.
    """
    cur = _Cursor(text)
    tokens: list[Token] = []

    def emit(kind: TokenKind, start: tuple[int, int, int]) -> None:
        pos0, line0, col0 = start
        span = Span(line0, col0, cur.line, cur.col)
        tokens.append(Token(kind, span, text[pos0:cur.pos]))

    while cur.pos < len(text):
        start = cur.mark()
        ch = cur.peek()
        if ch in _WHITESPACE:
            while cur.peek() in _WHITESPACE and cur.peek():
                cur.advance()
            emit(TokenKind.WHITESPACE, start)
        elif ch == "/" and cur.peek(1) == "/":
            while cur.peek() and cur.peek() != "\n":
                cur.advance()
            emit(TokenKind.COMMENT, start)
        elif ch == "/" and cur.peek(1) == "*":
            cur.advance(2)
            while cur.pos < len(text) and not (cur.peek() == "*" and cur.peek(1) == "/"):
                cur.advance()
            cur.advance(2)
            emit(TokenKind.COMMENT, start)
        elif ch == '"':
            cur.advance()
            while cur.peek() and cur.peek() != '"':
                if cur.peek() == "\\" and cur.peek(1):
                    cur.advance(2)
                else:
                    cur.advance()
            cur.advance()
            emit(TokenKind.STRING_LIT, start)
        elif _is_digit(ch):
            while cur.peek() and _is_digit(cur.peek()):
                cur.advance()
            emit(TokenKind.NUMBER, start)
        elif _is_ident_start(ch):
            while _is_ident_char(cur.peek()):
                cur.advance()
            word = text[start[0]:cur.pos]
            emit(TokenKind.KEYWORD if word in KEYWORDS else TokenKind.IDENT, start)
        else:
            for op in _MULTI_OPS:
                if text.startswith(op, cur.pos):
                    cur.advance(len(op))
                    emit(TokenKind.OPERATOR, start)
                    break
            else:
                if ch in _SINGLE_OPS:
                    cur.advance()
                    emit(TokenKind.OPERATOR, start)
                else:
                    cur.advance()
                    emit(TokenKind.ERROR, start)
    return tokens
