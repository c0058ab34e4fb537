"""Bounded exhaustive checker.

Each unit is checked over every input tuple inside the configured bounds.
Method bodies are checked modularly: a call to another method does not run
its body; instead every combination of callee results and array post-states
that satisfies the callee's ensures becomes a branch, and all branches must
reach the end of the caller successfully. Zero satisfying combinations make
the call vacuous and end the path.

Failures are deduplicated by error span (first input to fail at a span
wins, up to ``error_cap``) and each reported error carries a concrete
counterexample trace obtained by re-running its input with tracing on.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from typing import Callable, Optional

from ..lang.ast import FunctionDecl, MethodDecl, Program
from ..lang.tokens import Span
from .bounds import ArrayValue, Bounds, input_tuples, scalar_domain
from .interp import (
    OLD_KEY, CancelSignal, CBlock, CompiledMethod, CompiledProgram, CStmt,
    Ctx, Fault, TimeoutSignal, check_decrease, compile_program,
    initial_out_value, snapshot_env,
)
from .units import Obligation, VerificationUnit
from .verdict import (
    TIMEOUT, VERIFIED, CounterexampleTrace, TraceState, Verdict,
    VerificationError, failed, render_value,
)

DEFAULT_ERROR_CAP = 8

CancelFn = Callable[[], bool]


class _Pruned(Exception):
    """assume evaluated to false: the current path ends successfully."""


class _Failure(Exception):
    def __init__(self, message: str, error_span: Span,
                 related: tuple[Span, ...],
                 trace: Optional[list[TraceState]]) -> None:
        super().__init__(message)
        self.message = message
        self.error_span = error_span
        self.related = related
        self.trace = trace


# ── path machine for method bodies ───────────────────────────────

@dataclass
class _Frame:
    block: CBlock
    index: int
    declared: list[str] = field(default_factory=list)


@dataclass
class _LoopFrame:
    stmt: CStmt
    dec_prev: Optional[tuple] = None
    in_body: bool = False


class _ForkPoint:
    """Lazy havoc fork: branches materialize only when explored."""

    __slots__ = ("template", "branches", "index", "targets", "array_names", "span")

    def __init__(self, template: "_Path", branches: tuple,
                 targets: tuple[str, ...], array_names: list[str],
                 span: Span) -> None:
        self.template = template
        self.branches = branches
        self.index = 0
        self.targets = targets
        self.array_names = array_names
        self.span = span

    def next_path(self) -> Optional["_Path"]:
        if self.index >= len(self.branches):
            return None
        out_values, array_contents = self.branches[self.index]
        self.index += 1
        last = self.index >= len(self.branches)
        target = self.template if last else self.template.fork()
        env = target.env
        for name, contents in zip(self.array_names, array_contents):
            env[name].elems[:] = contents
        for name, value in zip(self.targets, out_values):
            env[name] = value
        target.record(self.span)
        return target


@dataclass
class _Path:
    env: dict
    frames: list  # _Frame | _LoopFrame, innermost last
    ctx: Ctx
    trace: Optional[list[TraceState]]

    def snapshot_bindings(self) -> tuple:
        return tuple((name, render_value(v)) for name, v in self.env.items()
                     if not name.startswith("$"))

    def record(self, location: Span) -> None:
        if self.trace is not None:
            self.trace.append(TraceState(location, self.snapshot_bindings()))

    def fork(self) -> "_Path":
        new_env: dict = {}
        remap: dict[int, ArrayValue] = {}
        for name, v in self.env.items():
            if isinstance(v, ArrayValue):
                copy = remap.get(id(v))
                if copy is None:
                    copy = v.snapshot()
                    remap[id(v)] = copy
                new_env[name] = copy
            elif name == OLD_KEY:
                new_env[name] = v  # old state is immutable from here on
            else:
                new_env[name] = v
        frames = [
            _Frame(f.block, f.index, list(f.declared)) if isinstance(f, _Frame)
            else _LoopFrame(f.stmt, f.dec_prev, f.in_body)
            for f in self.frames
        ]
        return _Path(new_env, frames,  self.ctx.fork_budget(),
                     list(self.trace) if self.trace is not None else None)


class _BodyChecker:
    def __init__(self, compiled: CompiledProgram, method: CompiledMethod,
                 bounds: Bounds, ctx_factory: Callable[[], Ctx]) -> None:
        self.compiled = compiled
        self.method = method
        self.bounds = bounds
        self.ctx_factory = ctx_factory
        # (callee, args key) -> tuple of (out values, per-array contents)
        self.havoc_cache: dict[tuple, tuple] = {}

    def check_input(self, args: tuple, record_trace: bool) -> Optional[_Failure]:
        """Run one input through every branch; first failure wins."""
        method = self.method
        decl = method.decl
        ctx = self.ctx_factory()
        env: dict = {}
        for p, v in zip(decl.params, args):
            env[p.name] = v
        for p in decl.outs:
            env[p.name] = initial_out_value(p.type)
        env[OLD_KEY] = snapshot_env(decl.params, env)

        trace: Optional[list[TraceState]] = [] if record_trace else None
        path = _Path(env, [_Frame(method.body, 0)], ctx, trace)
        path.record(decl.name_span)

        # evaluate the termination measure once, at entry state (parameters
        # are immutable, so self-calls compare against this tuple)
        try:
            entry_dec = method.decreases_tuple(env, ctx, args)
        except Fault as fault:
            return self._fail(path, fault.message, fault.span, ())

        # depth-first over havoc branches, in enumeration order
        pending: list = [path]
        while pending:
            top = pending[-1]
            if isinstance(top, _ForkPoint):
                current = top.next_path()
                if current is None:
                    pending.pop()
                    continue
            else:
                current = pending.pop()
            try:
                fork_point = self._run_path(current, entry_dec)
            except _Pruned:
                continue
            except _Failure as failure:
                return failure
            if fork_point is not None:
                pending.append(fork_point)
        return None

    # Returns a fork point when the path reached a multi-branch call, or
    # None when it completed.
    def _run_path(self, path: _Path, entry_dec: tuple) -> Optional[_ForkPoint]:
        try:
            return self._run_path_inner(path, entry_dec)
        except Fault as fault:
            # runtime fault anywhere on the path (division, indexing, budget)
            raise self._fail(path, fault.message, fault.span, ()) from None

    def _run_path_inner(self, path: _Path, entry_dec: tuple) -> Optional[_ForkPoint]:
        env = path.env
        ctx = path.ctx
        while True:
            frame = path.frames[-1] if path.frames else None
            if frame is None:
                self._check_exit(path, self.method.body.close_span)
                return None
            if isinstance(frame, _LoopFrame):
                self._loop_turn(path, frame)
                continue
            if frame.index >= len(frame.block.stmts):
                for name in frame.declared:
                    env.pop(name, None)
                path.frames.pop()
                continue
            stmt = frame.block.stmts[frame.index]
            frame.index += 1
            ctx.charge(stmt.span)
            kind = stmt.kind
            if kind == "vardecl":
                env[stmt.name] = stmt.value(env, ctx)
                frame.declared.append(stmt.name)
                path.record(stmt.span)
            elif kind == "assign":
                env[stmt.name] = stmt.value(env, ctx)
                path.record(stmt.span)
            elif kind == "arrayassign":
                arr = env[stmt.name]
                i = stmt.index(env, ctx)
                if i < 0 or i >= len(arr.elems):
                    raise self._fail(path, "index out of range", stmt.span, ())
                arr.elems[i] = stmt.value(env, ctx)
                path.record(stmt.span)
            elif kind == "assert":
                ok = self._eval_cond(path, stmt)
                if not ok:
                    raise self._fail(path, "assertion might not hold", stmt.span, ())
                path.record(stmt.span)
            elif kind == "assume":
                if not self._eval_cond(path, stmt):
                    raise _Pruned()
                path.record(stmt.span)
            elif kind == "return":
                self._check_exit(path, stmt.span)
                return None
            elif kind == "if":
                cond = stmt.cond(env, ctx)
                path.record(stmt.header_span)
                block = stmt.then_block if cond else stmt.else_block
                if block is not None:
                    path.frames.append(_Frame(block, 0))
            elif kind == "while":
                self._check_invariants(path, stmt, on_entry=True)
                path.frames.append(_LoopFrame(stmt))
            elif kind == "call":
                fork_point = self._do_call(path, stmt, entry_dec)
                if fork_point is not None:
                    return fork_point
            else:
                raise AssertionError(kind)

    def _eval_cond(self, path: _Path, stmt: CStmt) -> bool:
        try:
            return bool(stmt.cond(path.env, path.ctx))
        except Fault as fault:
            raise self._fail(path, fault.message, fault.span, ()) from None

    def _fail(self, path: _Path, message: str, span: Span,
              related: tuple[Span, ...]) -> _Failure:
        if path.trace is not None:
            path.trace.append(TraceState(span, path.snapshot_bindings()))
        return _Failure(message, span, related, path.trace)

    def _check_exit(self, path: _Path, exit_span: Span) -> None:
        env = path.env
        for clause in self.method.ensures:
            try:
                holds = clause.test(env, path.ctx)
            except Fault as fault:
                raise self._fail(path, fault.message, fault.span, (clause.span,))
            if not holds:
                raise self._fail(path, "ensures clause might not hold",
                                 exit_span, (clause.span,))

    def _check_invariants(self, path: _Path, stmt: CStmt, on_entry: bool) -> None:
        message = ("loop invariant might not hold on entry" if on_entry
                   else "loop invariant might not be maintained")
        for clause in stmt.invariants:
            try:
                holds = clause.test(path.env, path.ctx)
            except Fault as fault:
                raise self._fail(path, fault.message, fault.span, (clause.span,))
            if not holds:
                raise self._fail(path, message, clause.span, ())

    def _loop_turn(self, path: _Path, frame: _LoopFrame) -> None:
        stmt = frame.stmt
        ctx = path.ctx
        if frame.in_body:
            # back edge: body finished one iteration
            frame.in_body = False
            self._check_invariants(path, stmt, on_entry=False)
            if stmt.has_decreases:
                new = self._dec_tuple(path, stmt)
                if not check_decrease(new, frame.dec_prev):
                    raise self._fail(path, "decreases clause might not decrease",
                                     stmt.dec_span, ())
        ctx.charge(stmt.span)
        ctx.poll()
        cond = self._eval_loop_cond(path, stmt)
        path.record(stmt.header_span)
        if not cond:
            path.frames.pop()
            return
        if stmt.has_decreases:
            frame.dec_prev = self._dec_tuple(path, stmt)
        frame.in_body = True
        path.frames.append(_Frame(stmt.body, 0))

    def _eval_loop_cond(self, path: _Path, stmt: CStmt) -> bool:
        try:
            return bool(stmt.cond(path.env, path.ctx))
        except Fault as fault:
            raise self._fail(path, fault.message, fault.span, ()) from None

    def _dec_tuple(self, path: _Path, stmt: CStmt) -> tuple:
        try:
            return tuple(fn(path.env, path.ctx) for fn in stmt.decreases)
        except Fault as fault:
            raise self._fail(path, fault.message, fault.span, ()) from None

    # ── calls ────────────────────────────────────────────────────

    def _do_call(self, path: _Path, stmt: CStmt,
                 entry_dec: tuple) -> Optional[_ForkPoint]:
        call = stmt.call
        env, ctx = path.env, path.ctx
        callee = self.compiled.methods[call.method]
        try:
            args = tuple(fn(env, ctx) for fn in call.arg_fns)
        except Fault as fault:
            raise self._fail(path, fault.message, fault.span, ()) from None

        callee_env = {p.name: v for p, v in zip(callee.decl.params, args)}
        for clause in callee.requires:
            try:
                holds = clause.test(callee_env, ctx)
            except Fault:
                holds = False
            if not holds:
                raise self._fail(path, "requires clause might not hold",
                                 call.span, (clause.span,))

        if callee.name == self.method.name:
            try:
                new_dec = callee.decreases_tuple(callee_env, ctx, args)
            except Fault as fault:
                raise self._fail(path, fault.message, fault.span, ()) from None
            if not check_decrease(new_dec, entry_dec):
                related = (callee.decl.decreases[0].span,) if callee.decl.decreases else ()
                raise self._fail(path, "decreases clause might not decrease",
                                 call.span, related)

        branches = self._viable_branches(callee, args)
        if not branches:
            raise _Pruned()

        if len(branches) == 1:
            # continue the current path in place
            out_values, array_contents = branches[0]
            for arr, contents in zip(_distinct_arrays(args), array_contents):
                arr.elems[:] = contents
            for name, value in zip(call.targets, out_values):
                env[name] = value
            path.record(stmt.span)
            return None

        # arrays reaching a call are always caller parameters, so forked
        # copies can be recovered from the forked env by name
        array_names = [next(name for name, v in env.items() if v is arr)
                       for arr in _distinct_arrays(args)]
        return _ForkPoint(path, branches, call.targets, array_names, stmt.span)

    def _viable_branches(self, callee: CompiledMethod, args: tuple) -> tuple:
        key_parts: list = [callee.name]
        alias: dict[int, int] = {}
        arrays: list[ArrayValue] = []
        for v in args:
            if isinstance(v, ArrayValue):
                if id(v) not in alias:
                    alias[id(v)] = len(arrays)
                    arrays.append(v)
                key_parts.append(("a", alias[id(v)], tuple(v.elems)))
            else:
                key_parts.append(v)
        key = tuple(key_parts)
        cached = self.havoc_cache.get(key)
        if cached is not None:
            return cached

        bounds = self.bounds
        ctx = self.ctx_factory()
        decl = callee.decl
        out_domains = [scalar_domain(p.type, bounds) for p in decl.outs]
        array_domains = [tuple(itertools.product(bounds.int_range,
                                                 repeat=len(a.elems)))
                         for a in arrays]

        # evaluation env with temp arrays so enumeration never touches the
        # caller's state
        temp_arrays = [ArrayValue(list(a.elems)) for a in arrays]
        eval_env: dict = {}
        for p, v in zip(decl.params, args):
            if isinstance(v, ArrayValue):
                eval_env[p.name] = temp_arrays[alias[id(v)]]
            else:
                eval_env[p.name] = v
        eval_env[OLD_KEY] = {
            p.name: (ArrayValue(list(args[i].elems))
                     if isinstance(args[i], ArrayValue) else args[i])
            for i, p in enumerate(decl.params)
        }

        viable: list[tuple] = []
        ensures = callee.ensures
        out_names = [p.name for p in decl.outs]
        for combo in itertools.product(*out_domains, *array_domains):
            ctx.poll()
            outs = combo[:len(out_names)]
            contents = combo[len(out_names):]
            for name, value in zip(out_names, outs):
                eval_env[name] = value
            for arr, cont in zip(temp_arrays, contents):
                arr.elems[:] = cont
            ok = True
            for clause in ensures:
                try:
                    if not clause.test(eval_env, ctx):
                        ok = False
                        break
                except Fault:
                    ok = False  # the callee's spec unit reports this
                    break
            if ok:
                viable.append((outs, contents))
        result = tuple(viable)
        self.havoc_cache[key] = result
        return result


def _distinct_arrays(args: tuple) -> list[ArrayValue]:
    seen: dict[int, ArrayValue] = {}
    for v in args:
        if isinstance(v, ArrayValue) and id(v) not in seen:
            seen[id(v)] = v
    return list(seen.values())


# ── prover front door ────────────────────────────────────────────

class BoundedProver:
    """Checks one verification unit exhaustively over bounded inputs."""

    def __init__(self, error_cap: int = DEFAULT_ERROR_CAP) -> None:
        self.error_cap = error_cap

    def verify_unit(self, unit: VerificationUnit, bounds: Bounds,
                    timeout_ms: int,
                    cancel: Optional[CancelFn] = None) -> Optional[Verdict]:
        """Verdict for the unit, or None when cancelled mid-check."""
        compiled = compile_program(unit.program)
        deadline = time.monotonic() + timeout_ms / 1000.0

        def ctx_factory() -> Ctx:
            return Ctx(compiled.functions, bounds.max_steps, deadline, cancel)

        try:
            if unit.obligation == Obligation.FUNCTION_WF:
                return self._check_function_wf(compiled, unit, bounds, ctx_factory)
            if unit.obligation == Obligation.METHOD_SPEC_WF:
                return self._check_spec_wf(compiled, unit, bounds, ctx_factory)
            return self._check_body(compiled, unit, bounds, ctx_factory)
        except TimeoutSignal:
            return TIMEOUT
        except CancelSignal:
            return None

    # FunctionWF: the body evaluates without faults on every input, and
    # every self-application strictly shrinks the termination measure.
    def _check_function_wf(self, compiled: CompiledProgram,
                           unit: VerificationUnit, bounds: Bounds,
                           ctx_factory: Callable[[], Ctx]) -> Verdict:
        decl = unit.decl
        assert isinstance(decl, FunctionDecl)
        fn = compiled.functions[decl.name]
        errors: dict[Span, VerificationError] = {}
        for args in input_tuples(decl.params, bounds):
            ctx = ctx_factory()
            ctx.poll()
            env = dict(zip(fn.param_names, args))
            bindings = tuple((p.name, render_value(v))
                             for p, v in zip(decl.params, args))
            try:
                entry_dec = fn.decreases_tuple(env, ctx, args)
                ctx.dec_watch = {decl.name: entry_dec}
                fn.body(env, ctx)
            except Fault as fault:
                if fault.span not in errors:
                    trace = CounterexampleTrace((
                        TraceState(decl.name_span, bindings),
                        TraceState(fault.span, bindings)))
                    errors[fault.span] = VerificationError(
                        fault.message, fault.span, (), trace)
                    if len(errors) >= self.error_cap:
                        break
        return failed(list(errors.values())) if errors else VERIFIED

    # MethodSpecWF: requires clauses evaluate without faults (each under the
    # previous ones), and ensures evaluates without faults whenever all
    # requires hold, for every argument and result tuple.
    def _check_spec_wf(self, compiled: CompiledProgram, unit: VerificationUnit,
                       bounds: Bounds,
                       ctx_factory: Callable[[], Ctx]) -> Verdict:
        decl = unit.decl
        assert isinstance(decl, MethodDecl)
        method = compiled.methods[decl.name]
        errors: dict[Span, VerificationError] = {}

        def report(fault: Fault, env: dict) -> bool:
            if fault.span in errors:
                return len(errors) >= self.error_cap
            bindings = tuple((name, render_value(v)) for name, v in env.items()
                             if not name.startswith("$"))
            trace = CounterexampleTrace((
                TraceState(decl.name_span, bindings),
                TraceState(fault.span, bindings)))
            errors[fault.span] = VerificationError(fault.message, fault.span, (), trace)
            return len(errors) >= self.error_cap

        out_domains = [scalar_domain(p.type, bounds) for p in decl.outs]
        for args in input_tuples(decl.params, bounds):
            ctx = ctx_factory()
            ctx.poll()
            env = {p.name: v for p, v in zip(decl.params, args)}
            requires_hold = True
            for clause in method.requires:
                try:
                    if not clause.test(env, ctx):
                        requires_hold = False
                        break
                except Fault as fault:
                    requires_hold = False
                    if report(fault, env):
                        return failed(list(errors.values()))
                    break
            if not requires_hold or not method.ensures:
                continue
            env[OLD_KEY] = snapshot_env(decl.params, env)
            for outs in itertools.product(*out_domains):
                for p, v in zip(decl.outs, outs):
                    env[p.name] = v
                for clause in method.ensures:
                    try:
                        clause.test(env, ctx)
                    except Fault as fault:
                        if report(fault, env):
                            return failed(list(errors.values()))
                        break
        return failed(list(errors.values())) if errors else VERIFIED

    def _check_body(self, compiled: CompiledProgram, unit: VerificationUnit,
                    bounds: Bounds,
                    ctx_factory: Callable[[], Ctx]) -> Verdict:
        decl = unit.decl
        assert isinstance(decl, MethodDecl)
        method = compiled.methods[decl.name]
        body_checker = _BodyChecker(compiled, method, bounds, ctx_factory)
        errors: dict[Span, VerificationError] = {}
        for args in input_tuples(decl.params, bounds):
            ctx = ctx_factory()
            ctx.poll()
            pristine = tuple(v.snapshot() if isinstance(v, ArrayValue) else v
                             for v in args)
            if not _requires_satisfied(method, decl, args, ctx):
                continue
            failure = body_checker.check_input(args, record_trace=False)
            if failure is None or failure.error_span in errors:
                continue
            traced = body_checker.check_input(pristine, record_trace=True)
            trace_states = tuple(traced.trace) if traced and traced.trace else ()
            errors[failure.error_span] = VerificationError(
                failure.message, failure.error_span, failure.related,
                CounterexampleTrace(trace_states))
            if len(errors) >= self.error_cap:
                break
        return failed(list(errors.values())) if errors else VERIFIED


def _requires_satisfied(method: CompiledMethod, decl: MethodDecl,
                        args: tuple, ctx: Ctx) -> bool:
    env = {p.name: v for p, v in zip(decl.params, args)}
    for clause in method.requires:
        try:
            if not clause.test(env, ctx):
                return False
        except Fault:
            return False  # the spec unit reports ill-formed preconditions
    return True
