"""MiniSpec language front end: lexer, parser, resolver, pretty-printer."""

from .ast import (
    Diagnostic, Entity, EntityId, EntityKind, HoverInfo, Program, SourceText,
    hover_info, signature_text,
)
from .parser import parse
from .printer import pretty_print
from .resolver import resolve
from .tokens import KEYWORDS, Span, Token, TokenKind, lex_scan

__all__ = [
    "Diagnostic", "Entity", "EntityId", "EntityKind", "HoverInfo", "Program",
    "SourceText", "hover_info", "signature_text", "parse", "pretty_print",
    "resolve", "KEYWORDS", "Span", "Token", "TokenKind", "lex_scan",
]
