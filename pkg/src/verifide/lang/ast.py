"""Syntax tree and program model for MiniSpec.

Nodes carry their source spans as side metadata; the spans never take part
in structural identity (the fingerprint module serializes trees without
them). Every node is immutable after construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Union

from .tokens import Span, Token


class Type(Enum):
    INT = "int"
    BOOL = "bool"
    ARRAY_INT = "array<int>"

    def __str__(self) -> str:
        return self.value


# ── Expressions ──────────────────────────────────────────────────

@dataclass(frozen=True)
class IntLit:
    value: int
    span: Span


@dataclass(frozen=True)
class BoolLit:
    value: bool
    span: Span


@dataclass(frozen=True)
class VarRef:
    name: str
    span: Span


@dataclass(frozen=True)
class UnaryOp:
    op: str  # "!" or "-"
    operand: "Expr"
    span: Span


@dataclass(frozen=True)
class BinaryOp:
    op: str  # + - * / % == != < <= > >= && || ==>
    left: "Expr"
    right: "Expr"
    span: Span


@dataclass(frozen=True)
class IndexExpr:
    base: "Expr"
    index: "Expr"
    span: Span


@dataclass(frozen=True)
class LengthExpr:
    base: "Expr"
    span: Span
    name_span: Span  # the "Length" identifier


@dataclass(frozen=True)
class CallExpr:
    name: str
    args: tuple["Expr", ...]
    span: Span
    name_span: Span


@dataclass(frozen=True)
class OldExpr:
    operand: "Expr"
    span: Span


@dataclass(frozen=True)
class ForallExpr:
    """Bounded quantifier ``forall v :: lo <= v < hi ==> body``."""

    var: str
    lo: "Expr"
    hi: "Expr"
    body: "Expr"
    span: Span
    var_span: Span


Expr = Union[IntLit, BoolLit, VarRef, UnaryOp, BinaryOp, IndexExpr,
             LengthExpr, CallExpr, OldExpr, ForallExpr]


# ── Statements ───────────────────────────────────────────────────

@dataclass(frozen=True)
class VarDeclStmt:
    name: str
    value: Expr
    span: Span
    name_span: Span


@dataclass(frozen=True)
class AssignStmt:
    target: str
    value: Expr
    span: Span
    target_span: Span


@dataclass(frozen=True)
class ArrayAssignStmt:
    target: str
    index: Expr
    value: Expr
    span: Span
    target_span: Span


@dataclass(frozen=True)
class CallStmt:
    targets: tuple[str, ...]
    method: str
    args: tuple[Expr, ...]
    span: Span
    name_span: Span
    target_spans: tuple[Span, ...] = ()


@dataclass(frozen=True)
class SpecClause:
    kind: str  # requires | ensures | invariant | decreases
    exprs: tuple[Expr, ...]  # decreases carries several, others exactly one
    span: Span

    @property
    def expr(self) -> Expr:
        return self.exprs[0]


@dataclass(frozen=True)
class IfStmt:
    cond: Expr
    then_block: "Block"
    else_block: Optional["Block"]
    span: Span
    header_span: Span


@dataclass(frozen=True)
class WhileStmt:
    cond: Expr
    invariants: tuple[SpecClause, ...]
    decreases: tuple[SpecClause, ...]
    body: "Block"
    span: Span
    header_span: Span


@dataclass(frozen=True)
class AssertStmt:
    cond: Expr
    span: Span


@dataclass(frozen=True)
class AssumeStmt:
    cond: Expr
    span: Span


@dataclass(frozen=True)
class ReturnStmt:
    span: Span


Stmt = Union[VarDeclStmt, AssignStmt, ArrayAssignStmt, CallStmt, IfStmt,
             WhileStmt, AssertStmt, AssumeStmt, ReturnStmt]


@dataclass(frozen=True)
class Block:
    stmts: tuple[Stmt, ...]
    span: Span       # includes braces
    close_span: Span  # the closing brace, used as the implicit exit point


# ── Declarations ─────────────────────────────────────────────────

@dataclass(frozen=True)
class Param:
    name: str
    type: Type
    span: Span
    name_span: Span


@dataclass(frozen=True)
class Attribute:
    name: str
    value: Optional[int]
    span: Span


@dataclass(frozen=True)
class FunctionDecl:
    name: str
    params: tuple[Param, ...]
    return_type: Type
    decreases: tuple[SpecClause, ...]
    body: Expr
    attributes: tuple[Attribute, ...]
    span: Span
    name_span: Span
    sig_span: Span


@dataclass(frozen=True)
class MethodDecl:
    name: str
    params: tuple[Param, ...]
    outs: tuple[Param, ...]
    requires: tuple[SpecClause, ...]
    ensures: tuple[SpecClause, ...]
    decreases: tuple[SpecClause, ...]
    body: Block
    attributes: tuple[Attribute, ...]
    span: Span
    name_span: Span
    sig_span: Span


Decl = Union[FunctionDecl, MethodDecl]


# ── Program-level model ──────────────────────────────────────────

class EntityKind(Enum):
    FUNCTION_DEF = "FunctionDef"
    METHOD_SPEC = "MethodSpec"
    METHOD_BODY = "MethodBody"


@dataclass(frozen=True)
class EntityId:
    name: str
    kind: EntityKind

    @property
    def sort_key(self) -> tuple[str, str]:
        return (self.name, self.kind.value)

    def __str__(self) -> str:
        return f"{self.kind.value} {self.name}"


@dataclass(frozen=True)
class Entity:
    """A named program fragment: the unit of checksumming and caching."""

    id: EntityId
    decl: Decl
    span: Span


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error"
    message: str
    span: Span
    category: str  # "syntax" | "name" | "type"


@dataclass(frozen=True)
class HoverInfo:
    text: str
    var_name: Optional[str] = None


@dataclass(frozen=True)
class SourceText:
    content: str
    snapshot_id: int


@dataclass(eq=False)
class Program:
    """Parse/resolve result. ``entities`` and the maps are filled by resolve."""

    text: str
    decls: tuple[Decl, ...]
    diagnostics: list[Diagnostic]
    entities: tuple[Entity, ...] = ()
    call_graph: dict[EntityId, frozenset[EntityId]] = field(default_factory=dict)
    hover_map: dict[Span, HoverInfo] = field(default_factory=dict)
    resolved: bool = False

    @property
    def has_errors(self) -> bool:
        return any(d.severity == "error" for d in self.diagnostics)

    def functions(self) -> dict[str, FunctionDecl]:
        return {d.name: d for d in self.decls if isinstance(d, FunctionDecl)}

    def methods(self) -> dict[str, MethodDecl]:
        return {d.name: d for d in self.decls if isinstance(d, MethodDecl)}

    def entity(self, entity_id: EntityId) -> Entity:
        for e in self.entities:
            if e.id == entity_id:
                return e
        raise KeyError(entity_id)


def hover_info(program: Program, line: int, col: int) -> Optional[HoverInfo]:
    """Innermost hover entry whose span contains (line, col), if any."""
    best: Optional[tuple[Span, HoverInfo]] = None
    for span, info in program.hover_map.items():
        if not span.contains(line, col):
            continue
        if best is None or _is_inner(span, best[0]):
            best = (span, info)
    return best[1] if best else None


def _is_inner(a: Span, b: Span) -> bool:
    # Prefer the span that starts later; on a tie, the one that ends earlier.
    ka = ((a.start_line, a.start_col), (-a.end_line, -a.end_col))
    kb = ((b.start_line, b.start_col), (-b.end_line, -b.end_col))
    return ka > kb


def signature_text(decl: Decl) -> str:
    params = ", ".join(f"{p.name}: {p.type}" for p in decl.params)
    if isinstance(decl, FunctionDecl):
        return f"{decl.name}({params}): {decl.return_type}"
    sig = f"{decl.name}({params})"
    if decl.outs:
        outs = ", ".join(f"{p.name}: {p.type}" for p in decl.outs)
        sig += f" returns ({outs})"
    return sig


__all__ = [
    "Type", "IntLit", "BoolLit", "VarRef", "UnaryOp", "BinaryOp",
    "IndexExpr", "LengthExpr", "CallExpr", "OldExpr", "ForallExpr", "Expr",
    "VarDeclStmt", "AssignStmt", "ArrayAssignStmt", "CallStmt", "SpecClause",
    "IfStmt", "WhileStmt", "AssertStmt", "AssumeStmt", "ReturnStmt", "Stmt",
    "Block", "Param", "Attribute", "FunctionDecl", "MethodDecl", "Decl",
    "EntityKind", "EntityId", "Entity", "Diagnostic", "HoverInfo",
    "SourceText", "Program", "hover_info", "signature_text",
    "Span", "Token",
]
