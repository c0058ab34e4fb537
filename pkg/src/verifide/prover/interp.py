"""Expression and statement compilation for the bounded interpreter.

Expressions compile once into Python closures taking ``(env, ctx)``; the
statement layer keeps the tree shape and is executed by the checker's path
machine and by the concrete executor. Division and modulo are Euclidean:
the remainder is always non-negative.
"""

from __future__ import annotations

import sys
import time
import weakref
from dataclasses import dataclass
from typing import Callable, Optional

from ..lang.ast import (
    ArrayAssignStmt, AssertStmt, AssignStmt, AssumeStmt, BinaryOp, Block,
    BoolLit, CallExpr, CallStmt, Expr, ForallExpr, FunctionDecl, IfStmt,
    IndexExpr, IntLit, LengthExpr, MethodDecl, OldExpr, Program, ReturnStmt,
    Stmt, Type, UnaryOp, VarDeclStmt, VarRef, WhileStmt,
)
from ..lang.tokens import Span
from .bounds import ArrayValue, default_decreases_values

# Deeply recursive MiniSpec programs nest Python frames; keep headroom.
if sys.getrecursionlimit() < 10_000:
    sys.setrecursionlimit(10_000)

CALL_DEPTH_LIMIT = 128

OLD_KEY = "$old"

EvalFn = Callable[[dict, "Ctx"], object]


class Fault(Exception):
    """A runtime fault at a source location (div by zero, bad index, ...)."""

    def __init__(self, span: Span, message: str) -> None:
        super().__init__(message)
        self.span = span
        self.message = message


class TimeoutSignal(Exception):
    pass


class CancelSignal(Exception):
    pass


class Ctx:
    """Per-execution budget and environment shared by compiled closures."""

    __slots__ = ("functions", "steps", "deadline", "cancel", "depth",
                 "dec_watch", "tick")

    def __init__(self, functions: dict[str, "CompiledFunction"],
                 max_steps: int,
                 deadline: Optional[float] = None,
                 cancel: Optional[Callable[[], bool]] = None) -> None:
        self.functions = functions
        self.steps = max_steps
        self.deadline = deadline
        self.cancel = cancel
        self.depth = 0
        # function name -> current decreases tuple; set during FunctionWF
        self.dec_watch: Optional[dict[str, tuple]] = None
        self.tick = 0

    def charge(self, span: Span) -> None:
        self.steps -= 1
        if self.steps < 0:
            raise Fault(span, "step budget exceeded")
        self.tick += 1
        if (self.tick & 0xFF) == 0:
            self.poll()

    def poll(self) -> None:
        if self.deadline is not None and time.monotonic() > self.deadline:
            raise TimeoutSignal()
        if self.cancel is not None and self.cancel():
            raise CancelSignal()

    def fork_budget(self) -> "Ctx":
        child = Ctx(self.functions, self.steps, self.deadline, self.cancel)
        child.depth = self.depth
        child.dec_watch = self.dec_watch
        return child


def ediv(a: int, b: int) -> int:
    r = a % abs(b)
    return (a - r) // b


def emod(a: int, b: int) -> int:
    return a % abs(b)


# ── expression compilation ───────────────────────────────────────

def compile_expr(expr: Expr, in_old: bool = False,
                 binders: frozenset[str] = frozenset()) -> EvalFn:
    if isinstance(expr, IntLit):
        v = expr.value
        return lambda env, ctx: v
    if isinstance(expr, BoolLit):
        v = expr.value
        return lambda env, ctx: v
    if isinstance(expr, VarRef):
        name = expr.name
        if in_old and name not in binders:
            return lambda env, ctx: env[OLD_KEY][name]
        return lambda env, ctx: env[name]
    if isinstance(expr, UnaryOp):
        sub = compile_expr(expr.operand, in_old, binders)
        if expr.op == "!":
            return lambda env, ctx: not sub(env, ctx)
        return lambda env, ctx: -sub(env, ctx)
    if isinstance(expr, BinaryOp):
        return _compile_binary(expr, in_old, binders)
    if isinstance(expr, IndexExpr):
        base = compile_expr(expr.base, in_old, binders)
        index = compile_expr(expr.index, in_old, binders)
        span = expr.span

        def do_index(env: dict, ctx: Ctx) -> int:
            elems = base(env, ctx).elems
            i = index(env, ctx)
            if i < 0 or i >= len(elems):
                raise Fault(span, "index out of range")
            return elems[i]

        return do_index
    if isinstance(expr, LengthExpr):
        base = compile_expr(expr.base, in_old, binders)
        return lambda env, ctx: len(base(env, ctx).elems)
    if isinstance(expr, CallExpr):
        arg_fns = tuple(compile_expr(a, in_old, binders) for a in expr.args)
        name = expr.name
        span = expr.span

        def do_apply(env: dict, ctx: Ctx) -> object:
            args = tuple(fn(env, ctx) for fn in arg_fns)
            return apply_function(name, args, span, ctx)

        return do_apply
    if isinstance(expr, OldExpr):
        return compile_expr(expr.operand, in_old=True, binders=binders)
    if isinstance(expr, ForallExpr):
        lo = compile_expr(expr.lo, in_old, binders)
        hi = compile_expr(expr.hi, in_old, binders)
        body = compile_expr(expr.body, in_old, binders | {expr.var})
        var = expr.var

        def do_forall(env: dict, ctx: Ctx) -> bool:
            lo_v = lo(env, ctx)
            hi_v = hi(env, ctx)
            try:
                for i in range(lo_v, hi_v):
                    env[var] = i
                    if not body(env, ctx):
                        return False
                return True
            finally:
                env.pop(var, None)

        return do_forall
    raise TypeError(f"unknown expression node: {expr!r}")


def _compile_binary(expr: BinaryOp, in_old: bool, binders: frozenset[str]) -> EvalFn:
    left = compile_expr(expr.left, in_old, binders)
    right = compile_expr(expr.right, in_old, binders)
    op = expr.op
    if op == "+":
        return lambda env, ctx: left(env, ctx) + right(env, ctx)
    if op == "-":
        return lambda env, ctx: left(env, ctx) - right(env, ctx)
    if op == "*":
        return lambda env, ctx: left(env, ctx) * right(env, ctx)
    if op in ("/", "%"):
        span = expr.span
        fn = ediv if op == "/" else emod
        kind = "divide by zero" if op == "/" else "modulo by zero"

        def do_div(env: dict, ctx: Ctx) -> int:
            b = right(env, ctx)
            if b == 0:
                raise Fault(span, kind)
            return fn(left(env, ctx), b)

        return do_div
    if op == "==":
        return lambda env, ctx: left(env, ctx) == right(env, ctx)
    if op == "!=":
        return lambda env, ctx: left(env, ctx) != right(env, ctx)
    if op == "<":
        return lambda env, ctx: left(env, ctx) < right(env, ctx)
    if op == "<=":
        return lambda env, ctx: left(env, ctx) <= right(env, ctx)
    if op == ">":
        return lambda env, ctx: left(env, ctx) > right(env, ctx)
    if op == ">=":
        return lambda env, ctx: left(env, ctx) >= right(env, ctx)
    if op == "&&":
        return lambda env, ctx: left(env, ctx) and right(env, ctx)
    if op == "||":
        return lambda env, ctx: left(env, ctx) or right(env, ctx)
    if op == "==>":
        return lambda env, ctx: (not left(env, ctx)) or right(env, ctx)
    raise ValueError(f"unknown operator {op}")


# ── functions ────────────────────────────────────────────────────

@dataclass
class CompiledFunction:
    name: str
    param_names: tuple[str, ...]
    body: EvalFn
    decreases: Optional[tuple[EvalFn, ...]]  # None when defaulted
    decl: FunctionDecl

    def decreases_tuple(self, env: dict, ctx: Ctx, args: tuple) -> tuple:
        if self.decreases is None:
            return default_decreases_values(self.decl.params, args)
        return tuple(fn(env, ctx) for fn in self.decreases)


def apply_function(name: str, args: tuple, span: Span, ctx: Ctx) -> object:
    fn = ctx.functions[name]
    ctx.charge(span)
    ctx.depth += 1
    watch = ctx.dec_watch
    watching = watch is not None and name in watch
    prior: object = None
    try:
        if ctx.depth > CALL_DEPTH_LIMIT:
            raise Fault(span, "step budget exceeded")
        env = dict(zip(fn.param_names, args))
        if watching:
            new_tuple = fn.decreases_tuple(env, ctx, args)
            prior = watch[name]
            if not check_decrease(new_tuple, prior):
                watching = False  # nothing to restore
                raise Fault(span, "decreases clause might not decrease")
            watch[name] = new_tuple
        return fn.body(env, ctx)
    finally:
        ctx.depth -= 1
        if watching:
            watch[name] = prior


def compile_functions(program: Program) -> dict[str, CompiledFunction]:
    out: dict[str, CompiledFunction] = {}
    for name, decl in program.functions().items():
        dec_exprs = [e for clause in decl.decreases for e in clause.exprs]
        out[name] = CompiledFunction(
            name=name,
            param_names=tuple(p.name for p in decl.params),
            body=compile_expr(decl.body),
            decreases=tuple(compile_expr(e) for e in dec_exprs) if dec_exprs else None,
            decl=decl,
        )
    return out


# ── statements ───────────────────────────────────────────────────

@dataclass
class CompiledClause:
    test: EvalFn
    span: Span  # whole clause, including the keyword


@dataclass
class CompiledCall:
    targets: tuple[str, ...]
    method: str
    arg_fns: tuple[EvalFn, ...]
    span: Span


@dataclass
class CStmt:
    kind: str
    span: Span
    # statement payloads; unused fields stay None
    name: Optional[str] = None
    value: Optional[EvalFn] = None
    index: Optional[EvalFn] = None
    cond: Optional[EvalFn] = None
    then_block: Optional["CBlock"] = None
    else_block: Optional["CBlock"] = None
    body: Optional["CBlock"] = None
    invariants: tuple[CompiledClause, ...] = ()
    decreases: tuple[EvalFn, ...] = ()
    has_decreases: bool = False
    dec_span: Optional[Span] = None
    call: Optional[CompiledCall] = None
    header_span: Optional[Span] = None


@dataclass
class CBlock:
    stmts: tuple[CStmt, ...]
    close_span: Span


def compile_block(block: Block) -> CBlock:
    return CBlock(tuple(_compile_stmt(s) for s in block.stmts), block.close_span)


def _compile_stmt(stmt: Stmt) -> CStmt:
    if isinstance(stmt, VarDeclStmt):
        return CStmt("vardecl", stmt.span, name=stmt.name,
                     value=compile_expr(stmt.value))
    if isinstance(stmt, AssignStmt):
        return CStmt("assign", stmt.span, name=stmt.target,
                     value=compile_expr(stmt.value))
    if isinstance(stmt, ArrayAssignStmt):
        return CStmt("arrayassign", stmt.span, name=stmt.target,
                     index=compile_expr(stmt.index),
                     value=compile_expr(stmt.value))
    if isinstance(stmt, CallStmt):
        call = CompiledCall(stmt.targets, stmt.method,
                            tuple(compile_expr(a) for a in stmt.args), stmt.span)
        return CStmt("call", stmt.span, call=call)
    if isinstance(stmt, IfStmt):
        return CStmt("if", stmt.span, cond=compile_expr(stmt.cond),
                     then_block=compile_block(stmt.then_block),
                     else_block=compile_block(stmt.else_block)
                     if stmt.else_block is not None else None,
                     header_span=stmt.header_span)
    if isinstance(stmt, WhileStmt):
        dec_exprs = [e for clause in stmt.decreases for e in clause.exprs]
        dec_span = stmt.decreases[0].span if stmt.decreases else None
        return CStmt("while", stmt.span, cond=compile_expr(stmt.cond),
                     invariants=tuple(CompiledClause(compile_expr(c.expr), c.span)
                                      for c in stmt.invariants),
                     decreases=tuple(compile_expr(e) for e in dec_exprs),
                     has_decreases=bool(dec_exprs), dec_span=dec_span,
                     body=compile_block(stmt.body),
                     header_span=stmt.header_span)
    if isinstance(stmt, AssertStmt):
        return CStmt("assert", stmt.span, cond=compile_expr(stmt.cond))
    if isinstance(stmt, AssumeStmt):
        return CStmt("assume", stmt.span, cond=compile_expr(stmt.cond))
    if isinstance(stmt, ReturnStmt):
        return CStmt("return", stmt.span)
    raise TypeError(f"unknown statement node: {stmt!r}")


@dataclass
class CompiledMethod:
    name: str
    decl: MethodDecl
    requires: tuple[CompiledClause, ...]
    ensures: tuple[CompiledClause, ...]  # old() resolves against env[OLD_KEY]
    decreases: Optional[tuple[EvalFn, ...]]  # None when defaulted
    body: CBlock

    def decreases_tuple(self, env: dict, ctx: Ctx, args: tuple) -> tuple:
        if self.decreases is None:
            return default_decreases_values(self.decl.params, args)
        return tuple(fn(env, ctx) for fn in self.decreases)


def compile_method(decl: MethodDecl) -> CompiledMethod:
    dec_exprs = [e for clause in decl.decreases for e in clause.exprs]
    return CompiledMethod(
        name=decl.name,
        decl=decl,
        requires=tuple(CompiledClause(compile_expr(c.expr), c.span)
                       for c in decl.requires),
        ensures=tuple(CompiledClause(compile_expr(c.expr), c.span)
                      for c in decl.ensures),
        decreases=tuple(compile_expr(e) for e in dec_exprs) if dec_exprs else None,
        body=compile_block(decl.body),
    )


@dataclass
class CompiledProgram:
    program: Program
    functions: dict[str, CompiledFunction]
    methods: dict[str, CompiledMethod]


_COMPILE_CACHE: "weakref.WeakKeyDictionary[Program, CompiledProgram]" = (
    weakref.WeakKeyDictionary())


def compile_program(program: Program) -> CompiledProgram:
    cached = _COMPILE_CACHE.get(program)
    if cached is not None:
        return cached
    compiled = CompiledProgram(
        program=program,
        functions=compile_functions(program),
        methods={name: compile_method(d) for name, d in program.methods().items()},
    )
    _COMPILE_CACHE[program] = compiled
    return compiled


def snapshot_env(params: tuple, env: dict) -> dict:
    """Old-state view: scalars as-is, arrays as content copies."""
    old: dict[str, object] = {}
    for p in params:
        v = env[p.name]
        old[p.name] = v.snapshot() if isinstance(v, ArrayValue) else v
    return old


def initial_out_value(ty: Type) -> object:
    return False if ty == Type.BOOL else 0


def check_decrease(new: tuple, old: tuple) -> bool:
    """Strict lexicographic decrease with the new tuple non-negative."""
    return new < old and all(c >= 0 for c in new)
