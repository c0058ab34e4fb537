"""Resolver and type checker.

Splits declarations into entities, builds the direct-dependency graph,
type-checks every expression, and collects the hover map.

Dependency rules:
  MethodBody(M) -> MethodSpec(M), MethodSpec(C) per called method C, and
                   FunctionDef(F) per function F mentioned in the body
  MethodSpec(M) -> every declared FunctionDef (specification obligations are
                   checked in a context where all function definitions are in
                   scope, so any function edit invalidates them)
  FunctionDef(F) -> FunctionDef(G) per function G mentioned in F's body or
                   decreases clauses
"""

from __future__ import annotations

from dataclasses import replace
from typing import Optional

from .ast import (
    ArrayAssignStmt, AssertStmt, AssignStmt, AssumeStmt, BinaryOp, Block,
    BoolLit, CallExpr, CallStmt, Decl, Diagnostic, Entity, EntityId,
    EntityKind, Expr, ForallExpr, FunctionDecl, HoverInfo, IfStmt, IndexExpr,
    IntLit, LengthExpr, MethodDecl, OldExpr, Program, ReturnStmt, SpecClause,
    Stmt, Type, UnaryOp, VarDeclStmt, VarRef, WhileStmt, signature_text,
)
from .tokens import Span

_KNOWN_ATTRIBUTES = {"timeLimit"}


class _Scope:
    """Lexically nested variable environment; inner blocks may not shadow."""

    def __init__(self) -> None:
        self.frames: list[dict[str, tuple[str, Type]]] = [{}]

    def push(self) -> None:
        self.frames.append({})

    def pop(self) -> None:
        self.frames.pop()

    def declare(self, name: str, kind: str, ty: Type) -> bool:
        if self.lookup(name) is not None:
            return False
        self.frames[-1][name] = (kind, ty)
        return True

    def lookup(self, name: str) -> Optional[tuple[str, Type]]:
        for frame in reversed(self.frames):
            if name in frame:
                return frame[name]
        return None


class _Resolver:
    def __init__(self, program: Program) -> None:
        self.program = program
        self.diagnostics: list[Diagnostic] = list(program.diagnostics)
        self.hover: dict[Span, HoverInfo] = {}
        self.functions: dict[str, FunctionDecl] = {}
        self.methods: dict[str, MethodDecl] = {}
        # per-entity collection, filled while walking
        self.mentioned_functions: set[str] = set()
        self.called_methods: set[str] = set()
        self.current_decl: Optional[Decl] = None
        self.tail_calls: set[int] = set()  # id() of CallStmt nodes in tail position

    # ── diagnostics ──────────────────────────────────────────────

    def error(self, message: str, span: Span, category: str = "type") -> None:
        self.diagnostics.append(Diagnostic("error", message, span, category))

    # ── entry point ──────────────────────────────────────────────

    def run(self) -> Program:
        decls = self._collect_decls()
        decls = tuple(self._rewrite_method_assigns(d) for d in decls)
        self.functions = {d.name: d for d in decls if isinstance(d, FunctionDecl)}
        self.methods = {d.name: d for d in decls if isinstance(d, MethodDecl)}

        entities: list[Entity] = []
        call_graph: dict[EntityId, frozenset[EntityId]] = {}
        all_function_ids = frozenset(
            EntityId(n, EntityKind.FUNCTION_DEF) for n in self.functions)

        for decl in decls:
            self.current_decl = decl
            self._check_attributes(decl)
            if isinstance(decl, FunctionDecl):
                deps = self._resolve_function(decl)
                fid = EntityId(decl.name, EntityKind.FUNCTION_DEF)
                entities.append(Entity(fid, decl, decl.span))
                call_graph[fid] = frozenset(
                    EntityId(g, EntityKind.FUNCTION_DEF) for g in deps)
            else:
                spec_id = EntityId(decl.name, EntityKind.METHOD_SPEC)
                body_id = EntityId(decl.name, EntityKind.METHOD_BODY)
                body_fns, body_calls = self._resolve_method(decl)
                entities.append(Entity(spec_id, decl, decl.span))
                entities.append(Entity(body_id, decl, decl.span))
                call_graph[spec_id] = all_function_ids
                body_deps = {spec_id}
                body_deps |= {EntityId(c, EntityKind.METHOD_SPEC)
                              for c in body_calls if c in self.methods}
                body_deps |= {EntityId(f, EntityKind.FUNCTION_DEF)
                              for f in body_fns}
                call_graph[body_id] = frozenset(body_deps)

        return Program(
            text=self.program.text,
            decls=decls,
            diagnostics=self.diagnostics,
            entities=tuple(entities),
            call_graph=call_graph,
            hover_map=self.hover,
            resolved=True,
        )

    def _collect_decls(self) -> tuple[Decl, ...]:
        seen_fn: set[str] = set()
        seen_m: set[str] = set()
        kept: list[Decl] = []
        for decl in self.program.decls:
            if isinstance(decl, FunctionDecl):
                if decl.name in seen_fn:
                    self.error(f"function {decl.name} is already declared",
                               decl.name_span, "name")
                    continue
                seen_fn.add(decl.name)
            else:
                if decl.name in seen_m:
                    self.error(f"method {decl.name} is already declared",
                               decl.name_span, "name")
                    continue
                seen_m.add(decl.name)
            kept.append(decl)
        return tuple(kept)

    def _check_attributes(self, decl: Decl) -> None:
        for attr in decl.attributes:
            if attr.name not in _KNOWN_ATTRIBUTES:
                self.error(f"unknown attribute {attr.name}", attr.span)
            elif attr.name == "timeLimit" and (attr.value is None or attr.value <= 0):
                self.error("timeLimit expects a positive number of seconds", attr.span)

    # ── statement rewrite: `x := M(...)` with method M is a call ──

    def _rewrite_method_assigns(self, decl: Decl) -> Decl:
        method_names = {d.name for d in self.program.decls if isinstance(d, MethodDecl)}
        if not isinstance(decl, MethodDecl) or not method_names:
            return decl

        def rewrite_block(block: Block) -> Block:
            out: list[Stmt] = []
            for stmt in block.stmts:
                if (isinstance(stmt, AssignStmt)
                        and isinstance(stmt.value, CallExpr)
                        and stmt.value.name in method_names):
                    call = stmt.value
                    out.append(CallStmt((stmt.target,), call.name, call.args,
                                        stmt.span, call.name_span, (stmt.target_span,)))
                elif isinstance(stmt, IfStmt):
                    out.append(replace(
                        stmt, then_block=rewrite_block(stmt.then_block),
                        else_block=rewrite_block(stmt.else_block)
                        if stmt.else_block is not None else None))
                elif isinstance(stmt, WhileStmt):
                    out.append(replace(stmt, body=rewrite_block(stmt.body)))
                else:
                    out.append(stmt)
            return replace(block, stmts=tuple(out))

        return replace(decl, body=rewrite_block(decl.body))

    # ── functions ────────────────────────────────────────────────

    def _resolve_function(self, decl: FunctionDecl) -> set[str]:
        self.mentioned_functions = set()
        scope = _Scope()
        for p in decl.params:
            if not scope.declare(p.name, "parameter", p.type):
                self.error(f"{p.name} is already declared", p.name_span, "name")
            self.hover[p.name_span] = HoverInfo(f"(parameter) {p.name}: {p.type}", p.name)
        for clause in decl.decreases:
            for e in clause.exprs:
                self._check_expr(e, scope, ctx="decreases")
                self._require_int(e, scope, "decreases expects int components")
        body_ty = self._check_expr(decl.body, scope, ctx="function-body")
        if body_ty is not None and body_ty != decl.return_type:
            self.error(
                f"function body has type {body_ty}, expected {decl.return_type}",
                decl.body.span if hasattr(decl.body, "span") else decl.span)
        if decl.return_type == Type.ARRAY_INT:
            self.error("array return types are not supported", decl.sig_span)
        deps = set(self.mentioned_functions)
        self.hover[decl.name_span] = HoverInfo(
            self._decl_hover_text(decl, recursive=decl.name in deps))
        return deps

    # ── methods ──────────────────────────────────────────────────

    def _resolve_method(self, decl: MethodDecl) -> tuple[set[str], set[str]]:
        self.called_methods = set()
        self.tail_calls = _tail_call_ids(decl)

        scope = _Scope()
        for p in decl.params:
            if not scope.declare(p.name, "parameter", p.type):
                self.error(f"{p.name} is already declared", p.name_span, "name")
            self.hover[p.name_span] = HoverInfo(f"(parameter) {p.name}: {p.type}", p.name)
        for p in decl.outs:
            if p.type == Type.ARRAY_INT:
                self.error("array-typed out-parameters are not supported", p.span)
            if not scope.declare(p.name, "out-parameter", p.type):
                self.error(f"{p.name} is already declared", p.name_span, "name")
            self.hover[p.name_span] = HoverInfo(f"(out-parameter) {p.name}: {p.type}", p.name)

        # specification: requires/decreases see parameters only
        self.mentioned_functions = set()
        param_scope = _Scope()
        for p in decl.params:
            param_scope.declare(p.name, "parameter", p.type)
        for clause in decl.requires:
            ty = self._check_expr(clause.expr, param_scope, ctx="requires")
            self._require_bool(ty, clause, "requires")
        for clause in decl.decreases:
            for e in clause.exprs:
                self._check_expr(e, param_scope, ctx="decreases")
                self._require_int(e, param_scope, "decreases expects int components")
        for clause in decl.ensures:
            ty = self._check_expr(clause.expr, scope, ctx="ensures")
            self._require_bool(ty, clause, "ensures")

        # body: full scope
        self.mentioned_functions = set(self.mentioned_functions)
        spec_mentions = set(self.mentioned_functions)
        self.mentioned_functions = set()
        self._check_block(decl.body, scope, decl)
        body_mentions = set(self.mentioned_functions)
        self.mentioned_functions = spec_mentions | body_mentions

        recursive = decl.name in self.called_methods
        tail = recursive and all(
            id(c) in self.tail_calls for c in _self_calls(decl))
        self.hover[decl.name_span] = HoverInfo(
            self._decl_hover_text(decl, recursive=recursive, tail_recursive=tail))
        return body_mentions, set(self.called_methods)

    def _decl_hover_text(self, decl: Decl, recursive: bool,
                         tail_recursive: bool = False) -> str:
        kind = "function" if isinstance(decl, FunctionDecl) else "method"
        lines = [f"({kind}) {signature_text(decl)}"]
        if recursive and not decl.decreases:
            ints = ", ".join(p.name for p in decl.params if p.type == Type.INT)
            lines.append(f"decreases (default): {ints if ints else '()'}")
        if tail_recursive:
            lines.append("tail recursive")
        return "\n".join(lines)

    # ── statements ───────────────────────────────────────────────

    def _check_block(self, block: Block, scope: _Scope, decl: MethodDecl) -> None:
        scope.push()
        for stmt in block.stmts:
            self._check_stmt(stmt, scope, decl)
        scope.pop()

    def _check_stmt(self, stmt: Stmt, scope: _Scope, decl: MethodDecl) -> None:
        if isinstance(stmt, VarDeclStmt):
            ty = self._check_expr(stmt.value, scope, ctx="body")
            if ty == Type.ARRAY_INT:
                self.error("array-typed local variables are not supported", stmt.span)
                ty = Type.INT
            if not scope.declare(stmt.name, "local variable", ty or Type.INT):
                self.error(f"{stmt.name} is already declared", stmt.name_span, "name")
            else:
                self.hover[stmt.name_span] = HoverInfo(
                    f"(local variable) {stmt.name}: {ty or Type.INT}", stmt.name)
        elif isinstance(stmt, AssignStmt):
            ty = self._check_expr(stmt.value, scope, ctx="body")
            entry = scope.lookup(stmt.target)
            if entry is None:
                self.error(f"{stmt.target} is not declared", stmt.target_span, "name")
                return
            kind, target_ty = entry
            self.hover[stmt.target_span] = HoverInfo(
                f"({kind}) {stmt.target}: {target_ty}", stmt.target)
            if kind == "parameter":
                self.error(f"cannot assign to parameter {stmt.target}", stmt.target_span)
            elif target_ty == Type.ARRAY_INT:
                self.error("array variables cannot be reassigned", stmt.target_span)
            elif ty is not None and ty != target_ty:
                self.error(f"cannot assign {ty} to {stmt.target}: {target_ty}", stmt.span)
        elif isinstance(stmt, ArrayAssignStmt):
            entry = scope.lookup(stmt.target)
            if entry is None:
                self.error(f"{stmt.target} is not declared", stmt.target_span, "name")
            else:
                kind, target_ty = entry
                self.hover[stmt.target_span] = HoverInfo(
                    f"({kind}) {stmt.target}: {target_ty}", stmt.target)
                if target_ty != Type.ARRAY_INT:
                    self.error(f"{stmt.target} is not an array", stmt.target_span)
            idx_ty = self._check_expr(stmt.index, scope, ctx="body")
            if idx_ty is not None and idx_ty != Type.INT:
                self.error("array index must be int", stmt.index.span)
            val_ty = self._check_expr(stmt.value, scope, ctx="body")
            if val_ty is not None and val_ty != Type.INT:
                self.error("array elements are int", stmt.value.span)
        elif isinstance(stmt, CallStmt):
            self._check_call_stmt(stmt, scope, decl)
        elif isinstance(stmt, IfStmt):
            ty = self._check_expr(stmt.cond, scope, ctx="body")
            if ty is not None and ty != Type.BOOL:
                self.error("if condition must be bool", stmt.cond.span)
            self._check_block(stmt.then_block, scope, decl)
            if stmt.else_block is not None:
                self._check_block(stmt.else_block, scope, decl)
        elif isinstance(stmt, WhileStmt):
            ty = self._check_expr(stmt.cond, scope, ctx="body")
            if ty is not None and ty != Type.BOOL:
                self.error("while condition must be bool", stmt.cond.span)
            for inv in stmt.invariants:
                ity = self._check_expr(inv.expr, scope, ctx="invariant")
                self._require_bool(ity, inv, "invariant")
            for dec in stmt.decreases:
                for e in dec.exprs:
                    self._check_expr(e, scope, ctx="body")
                    self._require_int(e, scope, "decreases expects int components")
            self._check_block(stmt.body, scope, decl)
        elif isinstance(stmt, (AssertStmt, AssumeStmt)):
            ty = self._check_expr(stmt.cond, scope, ctx="body")
            if ty is not None and ty != Type.BOOL:
                kw = "assert" if isinstance(stmt, AssertStmt) else "assume"
                self.error(f"{kw} expects a bool condition", stmt.cond.span)
        elif isinstance(stmt, ReturnStmt):
            pass
        else:
            raise TypeError(f"unknown statement node: {stmt!r}")

    def _check_call_stmt(self, stmt: CallStmt, scope: _Scope, decl: MethodDecl) -> None:
        callee = self.methods.get(stmt.method)
        if callee is None:
            if stmt.method in self.functions:
                self.error(f"{stmt.method} is a function, not a method", stmt.name_span)
            else:
                self.error(f"method {stmt.method} is not declared", stmt.name_span, "name")
            for arg in stmt.args:
                self._check_expr(arg, scope, ctx="body")
            return
        self.called_methods.add(stmt.method)
        lines = [f"(method) {signature_text(callee)}"]
        if callee.name == decl.name:
            lines.append("tail-recursive call" if id(stmt) in self.tail_calls
                         else "recursive call")
        self.hover[stmt.name_span] = HoverInfo("\n".join(lines))

        if len(stmt.args) != len(callee.params):
            self.error(
                f"{stmt.method} expects {len(callee.params)} arguments, got {len(stmt.args)}",
                stmt.span)
        for arg, param in zip(stmt.args, callee.params):
            ty = self._check_expr(arg, scope, ctx="body")
            if ty is not None and ty != param.type:
                self.error(f"argument for {param.name} must be {param.type}", arg.span)
        if len(stmt.targets) != len(callee.outs):
            self.error(
                f"{stmt.method} returns {len(callee.outs)} values, got {len(stmt.targets)} targets",
                stmt.span)
        if len(set(stmt.targets)) != len(stmt.targets):
            self.error("call targets must be distinct", stmt.span)
        for i, target in enumerate(stmt.targets):
            entry = scope.lookup(target)
            tspan = stmt.target_spans[i] if i < len(stmt.target_spans) else stmt.span
            if entry is None:
                self.error(f"{target} is not declared", tspan, "name")
                continue
            kind, target_ty = entry
            self.hover[tspan] = HoverInfo(f"({kind}) {target}: {target_ty}", target)
            if kind == "parameter":
                self.error(f"cannot assign to parameter {target}", tspan)
            elif i < len(callee.outs) and target_ty != callee.outs[i].type:
                self.error(f"target {target} must be {callee.outs[i].type}", tspan)

    # ── expressions ──────────────────────────────────────────────

    def _check_expr(self, expr: Expr, scope: _Scope, ctx: str,
                    in_old: bool = False) -> Optional[Type]:
        if isinstance(expr, IntLit):
            return Type.INT
        if isinstance(expr, BoolLit):
            return Type.BOOL
        if isinstance(expr, VarRef):
            entry = scope.lookup(expr.name)
            if entry is None:
                self.error(f"{expr.name} is not declared", expr.span, "name")
                return None
            kind, ty = entry
            if in_old and kind == "out-parameter":
                self.error(f"out-parameter {expr.name} cannot appear under old",
                           expr.span)
            self.hover[expr.span] = HoverInfo(f"({kind}) {expr.name}: {ty}", expr.name)
            return ty
        if isinstance(expr, UnaryOp):
            ty = self._check_expr(expr.operand, scope, ctx, in_old)
            want = Type.BOOL if expr.op == "!" else Type.INT
            if ty is not None and ty != want:
                self.error(f"operator {expr.op} expects {want}", expr.span)
            return want
        if isinstance(expr, BinaryOp):
            lt = self._check_expr(expr.left, scope, ctx, in_old)
            rt = self._check_expr(expr.right, scope, ctx, in_old)
            return self._binary_type(expr, lt, rt)
        if isinstance(expr, IndexExpr):
            base_ty = self._check_expr(expr.base, scope, ctx, in_old)
            if base_ty is not None and base_ty != Type.ARRAY_INT:
                self.error("indexing expects an array", expr.span)
            idx_ty = self._check_expr(expr.index, scope, ctx, in_old)
            if idx_ty is not None and idx_ty != Type.INT:
                self.error("array index must be int", expr.index.span)
            return Type.INT
        if isinstance(expr, LengthExpr):
            base_ty = self._check_expr(expr.base, scope, ctx, in_old)
            if base_ty is not None and base_ty != Type.ARRAY_INT:
                self.error(".Length expects an array", expr.span)
            self.hover[expr.name_span] = HoverInfo("(array length): int")
            return Type.INT
        if isinstance(expr, CallExpr):
            return self._check_call_expr(expr, scope, ctx, in_old)
        if isinstance(expr, OldExpr):
            if ctx != "ensures":
                self.error("old() may only appear in ensures clauses", expr.span)
            if in_old:
                self.error("old() cannot be nested", expr.span)
            return self._check_expr(expr.operand, scope, ctx, in_old=True)
        if isinstance(expr, ForallExpr):
            lo_ty = self._check_expr(expr.lo, scope, ctx, in_old)
            if lo_ty is not None and lo_ty != Type.INT:
                self.error("forall bounds must be int", expr.lo.span)
            hi_ty = self._check_expr(expr.hi, scope, ctx, in_old)
            if hi_ty is not None and hi_ty != Type.INT:
                self.error("forall bounds must be int", expr.hi.span)
            scope.push()
            if not scope.declare(expr.var, "bound variable", Type.INT):
                self.error(f"{expr.var} is already declared", expr.var_span, "name")
            self.hover[expr.var_span] = HoverInfo(
                f"(bound variable) {expr.var}: int", expr.var)
            body_ty = self._check_expr(expr.body, scope, ctx, in_old)
            scope.pop()
            if body_ty is not None and body_ty != Type.BOOL:
                self.error("forall body must be bool", expr.body.span)
            return Type.BOOL
        raise TypeError(f"unknown expression node: {expr!r}")

    def _check_call_expr(self, expr: CallExpr, scope: _Scope, ctx: str,
                         in_old: bool) -> Optional[Type]:
        fn = self.functions.get(expr.name)
        if fn is None:
            if expr.name in self.methods:
                self.error(f"method {expr.name} cannot be used in an expression",
                           expr.name_span)
            else:
                self.error(f"function {expr.name} is not declared",
                           expr.name_span, "name")
            for arg in expr.args:
                self._check_expr(arg, scope, ctx, in_old)
            return None
        self.mentioned_functions.add(fn.name)
        lines = [f"(function) {signature_text(fn)}"]
        if (isinstance(self.current_decl, FunctionDecl)
                and fn.name == self.current_decl.name):
            lines.append("recursive call")
        self.hover[expr.name_span] = HoverInfo("\n".join(lines))
        if len(expr.args) != len(fn.params):
            self.error(
                f"{expr.name} expects {len(fn.params)} arguments, got {len(expr.args)}",
                expr.span)
        for arg, param in zip(expr.args, fn.params):
            ty = self._check_expr(arg, scope, ctx, in_old)
            if ty is not None and ty != param.type:
                self.error(f"argument for {param.name} must be {param.type}", arg.span)
        return fn.return_type

    def _binary_type(self, expr: BinaryOp, lt: Optional[Type],
                     rt: Optional[Type]) -> Optional[Type]:
        op = expr.op
        if op in ("+", "-", "*", "/", "%"):
            for ty, side in ((lt, expr.left), (rt, expr.right)):
                if ty is not None and ty != Type.INT:
                    self.error(f"operator {op} expects int operands", side.span)
            return Type.INT
        if op in ("&&", "||", "==>"):
            for ty, side in ((lt, expr.left), (rt, expr.right)):
                if ty is not None and ty != Type.BOOL:
                    self.error(f"operator {op} expects bool operands", side.span)
            return Type.BOOL
        if op in ("==", "!="):
            if lt is not None and rt is not None and lt != rt:
                self.error(f"operator {op} expects operands of the same type", expr.span)
            elif lt == Type.ARRAY_INT:
                self.error(f"operator {op} does not apply to arrays", expr.span)
            return Type.BOOL
        # < <= > >=
        for ty, side in ((lt, expr.left), (rt, expr.right)):
            if ty is not None and ty != Type.INT:
                self.error(f"operator {op} expects int operands", side.span)
        return Type.BOOL

    def _require_bool(self, ty: Optional[Type], clause: SpecClause, kw: str) -> None:
        if ty is not None and ty != Type.BOOL:
            self.error(f"{kw} expects a bool condition", clause.span)

    def _require_int(self, expr: Expr, scope: _Scope, message: str) -> None:
        # decreases components were already type-checked; re-derive cheaply
        ty = _quiet_type(expr, scope, self.functions)
        if ty is not None and ty != Type.INT:
            self.error(message, expr.span)


def _quiet_type(expr: Expr, scope: _Scope,
                functions: dict[str, FunctionDecl]) -> Optional[Type]:
    if isinstance(expr, IntLit):
        return Type.INT
    if isinstance(expr, BoolLit):
        return Type.BOOL
    if isinstance(expr, VarRef):
        entry = scope.lookup(expr.name)
        return entry[1] if entry else None
    if isinstance(expr, UnaryOp):
        return Type.BOOL if expr.op == "!" else Type.INT
    if isinstance(expr, BinaryOp):
        return Type.INT if expr.op in ("+", "-", "*", "/", "%") else Type.BOOL
    if isinstance(expr, (IndexExpr, LengthExpr)):
        return Type.INT
    if isinstance(expr, CallExpr):
        fn = functions.get(expr.name)
        return fn.return_type if fn else None
    if isinstance(expr, OldExpr):
        return _quiet_type(expr.operand, scope, functions)
    if isinstance(expr, ForallExpr):
        return Type.BOOL
    return None


# ── tail-call analysis ───────────────────────────────────────────

def _self_calls(decl: MethodDecl) -> list[CallStmt]:
    calls: list[CallStmt] = []

    def walk(block: Block) -> None:
        for stmt in block.stmts:
            if isinstance(stmt, CallStmt) and stmt.method == decl.name:
                calls.append(stmt)
            elif isinstance(stmt, IfStmt):
                walk(stmt.then_block)
                if stmt.else_block is not None:
                    walk(stmt.else_block)
            elif isinstance(stmt, WhileStmt):
                walk(stmt.body)

    walk(decl.body)
    return calls


def _tail_call_ids(decl: MethodDecl) -> set[int]:
    """ids of CallStmt nodes after which the method can only exit.

    A statement is in tail position when the rest of its path consists of
    nothing or a single ``return;``. Loop bodies are never tail positions.
    """
    tails: set[int] = set()

    def mark(block: Block, block_is_tail: bool) -> None:
        stmts = block.stmts
        for i, stmt in enumerate(stmts):
            rest = stmts[i + 1:]
            stmt_is_tail = block_is_tail and (
                not rest or (len(rest) == 1 and isinstance(rest[0], ReturnStmt)))
            if isinstance(stmt, CallStmt):
                if stmt_is_tail:
                    tails.add(id(stmt))
            elif isinstance(stmt, IfStmt):
                mark(stmt.then_block, stmt_is_tail)
                if stmt.else_block is not None:
                    mark(stmt.else_block, stmt_is_tail)
            elif isinstance(stmt, WhileStmt):
                mark(stmt.body, False)

    mark(decl.body, True)
    return tails


def resolve(program: Program) -> Program:
    """Resolve and type-check a parsed program.

    Always returns a Program; resolution problems are reported through its
    diagnostics rather than raised.
    """
    return _Resolver(program).run()
