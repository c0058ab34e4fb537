"""Entity checksums and dependency checksums.

An entity checksum is a 64-bit FNV-1a hash of the entity's canonical byte
form, which serializes the tree in prefix notation with length-prefixed
children and no source positions, so edits to comments, whitespace, or
layout never change it.

A dependency checksum folds the entity checksum together with the
dependency checksums of the entity's direct dependencies. Cycles are
handled by condensing the graph into strongly connected components and
giving each component a group checksum, so mutually recursive entities get
stable, order-independent values.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

from .lang.ast import (
    ArrayAssignStmt, AssertStmt, AssignStmt, AssumeStmt, BinaryOp, Block,
    BoolLit, CallExpr, CallStmt, Entity, EntityId, EntityKind, Expr,
    ForallExpr, FunctionDecl, IfStmt, IndexExpr, IntLit, LengthExpr,
    MethodDecl, OldExpr, ReturnStmt, SpecClause, Stmt, UnaryOp, VarDeclStmt,
    VarRef, WhileStmt,
)

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_MASK64 = 0xFFFFFFFFFFFFFFFF


def fnv1a(data: bytes) -> int:
    h = _FNV_OFFSET
    for byte in data:
        h = ((h ^ byte) * _FNV_PRIME) & _MASK64
    return h


def combine(items: list[int]) -> int:
    """Hash a list of 64-bit values over their length-prefixed concatenation."""
    buf = bytearray()
    for value in items:
        buf += struct.pack("<I", 8)
        buf += struct.pack("<Q", value)
    return fnv1a(bytes(buf))


def render_checksum(value: int) -> str:
    return f"{value:016x}"


# ── canonical serialization ──────────────────────────────────────

class _Writer:
    def __init__(self) -> None:
        self.buf = bytearray()

    def tag(self, name: str, arity: int) -> None:
        self.string(name)
        self.buf += struct.pack("<I", arity)

    def string(self, s: str) -> None:
        raw = s.encode("utf-8")
        self.buf += struct.pack("<I", len(raw))
        self.buf += raw

    def int64(self, n: int) -> None:
        self.buf += struct.pack("<q", n)


def _write_expr(w: _Writer, expr: Expr) -> None:
    if isinstance(expr, IntLit):
        w.tag("int", 0)
        w.int64(expr.value)
    elif isinstance(expr, BoolLit):
        w.tag("bool", 0)
        w.buf.append(1 if expr.value else 0)
    elif isinstance(expr, VarRef):
        w.tag("var", 0)
        w.string(expr.name)
    elif isinstance(expr, UnaryOp):
        w.tag("unary", 1)
        w.string(expr.op)
        _write_expr(w, expr.operand)
    elif isinstance(expr, BinaryOp):
        w.tag("binary", 2)
        w.string(expr.op)
        _write_expr(w, expr.left)
        _write_expr(w, expr.right)
    elif isinstance(expr, IndexExpr):
        w.tag("index", 2)
        _write_expr(w, expr.base)
        _write_expr(w, expr.index)
    elif isinstance(expr, LengthExpr):
        w.tag("length", 1)
        _write_expr(w, expr.base)
    elif isinstance(expr, CallExpr):
        w.tag("apply", len(expr.args))
        w.string(expr.name)
        for arg in expr.args:
            _write_expr(w, arg)
    elif isinstance(expr, OldExpr):
        w.tag("old", 1)
        _write_expr(w, expr.operand)
    elif isinstance(expr, ForallExpr):
        w.tag("forall", 3)
        w.string(expr.var)
        _write_expr(w, expr.lo)
        _write_expr(w, expr.hi)
        _write_expr(w, expr.body)
    else:
        raise TypeError(f"unknown expression node: {expr!r}")


def _write_stmt(w: _Writer, stmt: Stmt) -> None:
    if isinstance(stmt, VarDeclStmt):
        w.tag("vardecl", 1)
        w.string(stmt.name)
        _write_expr(w, stmt.value)
    elif isinstance(stmt, AssignStmt):
        w.tag("assign", 1)
        w.string(stmt.target)
        _write_expr(w, stmt.value)
    elif isinstance(stmt, ArrayAssignStmt):
        w.tag("arrayassign", 2)
        w.string(stmt.target)
        _write_expr(w, stmt.index)
        _write_expr(w, stmt.value)
    elif isinstance(stmt, CallStmt):
        w.tag("call", len(stmt.args))
        w.string(stmt.method)
        w.buf += struct.pack("<I", len(stmt.targets))
        for t in stmt.targets:
            w.string(t)
        for arg in stmt.args:
            _write_expr(w, arg)
    elif isinstance(stmt, IfStmt):
        w.tag("if", 3 if stmt.else_block is not None else 2)
        _write_expr(w, stmt.cond)
        _write_block(w, stmt.then_block)
        if stmt.else_block is not None:
            _write_block(w, stmt.else_block)
    elif isinstance(stmt, WhileStmt):
        w.tag("while", 1 + len(stmt.invariants) + len(stmt.decreases) + 1)
        _write_expr(w, stmt.cond)
        for inv in stmt.invariants:
            _write_clause(w, inv)
        for dec in stmt.decreases:
            _write_clause(w, dec)
        _write_block(w, stmt.body)
    elif isinstance(stmt, AssertStmt):
        w.tag("assert", 1)
        _write_expr(w, stmt.cond)
    elif isinstance(stmt, AssumeStmt):
        w.tag("assume", 1)
        _write_expr(w, stmt.cond)
    elif isinstance(stmt, ReturnStmt):
        w.tag("return", 0)
    else:
        raise TypeError(f"unknown statement node: {stmt!r}")


def _write_block(w: _Writer, block: Block) -> None:
    w.tag("block", len(block.stmts))
    for stmt in block.stmts:
        _write_stmt(w, stmt)


def _write_clause(w: _Writer, clause: SpecClause) -> None:
    w.tag(clause.kind, len(clause.exprs))
    for e in clause.exprs:
        _write_expr(w, e)


def _write_signature(w: _Writer, decl: FunctionDecl | MethodDecl) -> None:
    w.tag("params", len(decl.params))
    for p in decl.params:
        w.string(p.name)
        w.string(p.type.value)
    if isinstance(decl, FunctionDecl):
        w.tag("returntype", 0)
        w.string(decl.return_type.value)
    else:
        w.tag("outs", len(decl.outs))
        for p in decl.outs:
            w.string(p.name)
            w.string(p.type.value)
    w.tag("attrs", len(decl.attributes))
    for a in decl.attributes:
        w.string(a.name)
        w.int64(a.value if a.value is not None else -1)


def canonicalize(entity: Entity) -> bytes:
    """Deterministic byte form of an entity: kind, name, signature, payload."""
    w = _Writer()
    w.string(entity.id.kind.value)
    w.string(entity.id.name)
    decl = entity.decl
    if entity.id.kind == EntityKind.FUNCTION_DEF:
        assert isinstance(decl, FunctionDecl)
        _write_signature(w, decl)
        for dec in decl.decreases:
            _write_clause(w, dec)
        _write_expr(w, decl.body)
    elif entity.id.kind == EntityKind.METHOD_SPEC:
        assert isinstance(decl, MethodDecl)
        _write_signature(w, decl)
        for c in decl.requires:
            _write_clause(w, c)
        for c in decl.ensures:
            _write_clause(w, c)
        for c in decl.decreases:
            _write_clause(w, c)
    else:
        assert isinstance(decl, MethodDecl)
        _write_signature(w, decl)
        _write_block(w, decl.body)
    return bytes(w.buf)


def entity_checksum(entity: Entity) -> int:
    return fnv1a(canonicalize(entity))


# ── dependency graph condensation ────────────────────────────────

@dataclass(frozen=True)
class DepGraph:
    nodes: frozenset[EntityId]
    edges: dict[EntityId, frozenset[EntityId]]
    sccs: tuple[tuple[EntityId, ...], ...]  # dependencies-first order


def condense(call_graph: dict[EntityId, frozenset[EntityId]]) -> DepGraph:
    """Tarjan condensation; components come out dependencies-first."""
    nodes = sorted(call_graph, key=lambda e: e.sort_key)
    index: dict[EntityId, int] = {}
    lowlink: dict[EntityId, int] = {}
    on_stack: set[EntityId] = set()
    stack: list[EntityId] = []
    sccs: list[tuple[EntityId, ...]] = []
    counter = 0

    def neighbors(node: EntityId) -> list[EntityId]:
        return sorted((d for d in call_graph.get(node, frozenset()) if d in call_graph),
                      key=lambda e: e.sort_key)

    for root in nodes:
        if root in index:
            continue
        # iterative Tarjan: (node, iterator state)
        work: list[tuple[EntityId, int]] = [(root, 0)]
        while work:
            node, child_i = work.pop()
            if child_i == 0:
                index[node] = lowlink[node] = counter
                counter += 1
                stack.append(node)
                on_stack.add(node)
            advanced = False
            succ = neighbors(node)
            for i in range(child_i, len(succ)):
                child = succ[i]
                if child not in index:
                    work.append((node, i + 1))
                    work.append((child, 0))
                    advanced = True
                    break
                if child in on_stack:
                    lowlink[node] = min(lowlink[node], index[child])
            if advanced:
                continue
            if lowlink[node] == index[node]:
                component: list[EntityId] = []
                while True:
                    top = stack.pop()
                    on_stack.remove(top)
                    component.append(top)
                    if top == node:
                        break
                sccs.append(tuple(sorted(component, key=lambda e: e.sort_key)))
            if work:
                parent = work[-1][0]
                lowlink[parent] = min(lowlink[parent], lowlink[node])

    return DepGraph(frozenset(call_graph), dict(call_graph), tuple(sccs))


def dependency_checksums(graph: DepGraph,
                         entity_checksums: dict[EntityId, int]) -> dict[EntityId, int]:
    """Fold entity checksums along the condensation, dependencies first.

    Singleton, non-self-recursive nodes hash their own checksum followed by
    their dependencies' checksums in entity-id order. A cyclic component
    first gets a group checksum over its members and external dependencies,
    then each member hashes its own checksum against the group's.
    """
    result: dict[EntityId, int] = {}
    for component in graph.sccs:
        members = set(component)
        if len(component) == 1:
            node = component[0]
            self_loop = node in graph.edges.get(node, frozenset())
            if not self_loop:
                deps = sorted((d for d in graph.edges.get(node, frozenset())
                               if d in result), key=lambda e: e.sort_key)
                result[node] = combine(
                    [entity_checksums[node]] + [result[d] for d in deps])
                continue
        external: set[EntityId] = set()
        for node in component:
            external |= {d for d in graph.edges.get(node, frozenset())
                         if d not in members and d in result}
        group = combine(
            sorted(entity_checksums[n] for n in component)
            + sorted(result[d] for d in external))
        for node in component:
            result[node] = combine([entity_checksums[node], group])
    return result


@dataclass(frozen=True)
class EntityFingerprint:
    entity_id: EntityId
    entity_checksum: int
    dependency_checksum: int


def fingerprint_program(entities: tuple[Entity, ...],
                        call_graph: dict[EntityId, frozenset[EntityId]],
                        ) -> dict[EntityId, EntityFingerprint]:
    ecs = {e.id: entity_checksum(e) for e in entities}
    graph = condense(call_graph)
    dcs = dependency_checksums(graph, ecs)
    return {e.id: EntityFingerprint(e.id, ecs[e.id], dcs[e.id]) for e in entities}
