"""Whole-program concrete execution.

Unlike the modular checker, calls here run the callee's body, so this is
the ground-truth oracle: if every unit of a program verifies, concrete
execution must not fault for any bounded, precondition-satisfying input.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Optional

from ..lang.ast import Program
from ..lang.tokens import Span
from .bounds import Bounds
from .interp import (
    CALL_DEPTH_LIMIT, OLD_KEY, CBlock, CompiledMethod, CompiledProgram,
    CStmt, Ctx, Fault, check_decrease, compile_program, initial_out_value,
    snapshot_env,
)


@dataclass(frozen=True)
class Outcome:
    ok: bool
    fault_span: Optional[Span] = None
    fault_message: Optional[str] = None


OK = Outcome(True)


class _PrunedAll(Exception):
    """assume evaluated to false: the whole execution is vacuous."""


class _ReturnSignal(Exception):
    pass


class _Runner:
    def __init__(self, compiled: CompiledProgram, ctx: Ctx) -> None:
        self.compiled = compiled
        self.ctx = ctx

    def run_method(self, name: str, args: tuple, call_span: Span) -> tuple:
        method = self.compiled.methods[name]
        decl = method.decl
        ctx = self.ctx
        ctx.depth += 1
        if ctx.depth > CALL_DEPTH_LIMIT:
            ctx.depth -= 1
            raise Fault(call_span, "step budget exceeded")
        try:
            env: dict = {p.name: v for p, v in zip(decl.params, args)}
            for clause in method.requires:
                if not clause.test(env, ctx):
                    raise Fault(call_span, "requires clause might not hold")
            for p in decl.outs:
                env[p.name] = initial_out_value(p.type)
            env[OLD_KEY] = snapshot_env(decl.params, env)
            entry_dec = method.decreases_tuple(env, ctx, args)
            try:
                self._run_block(method.body, env, method, entry_dec)
                exit_span = method.body.close_span
            except _ReturnSignal as sig:
                exit_span = sig.args[0]
            for clause in method.ensures:
                if not clause.test(env, ctx):
                    raise Fault(exit_span, "ensures clause might not hold")
            return tuple(env[p.name] for p in decl.outs)
        finally:
            ctx.depth -= 1

    def _run_block(self, block: CBlock, env: dict, method: CompiledMethod,
                   entry_dec: tuple) -> None:
        ctx = self.ctx
        declared: list[str] = []
        try:
            for stmt in block.stmts:
                ctx.charge(stmt.span)
                kind = stmt.kind
                if kind == "vardecl":
                    env[stmt.name] = stmt.value(env, ctx)
                    declared.append(stmt.name)
                elif kind == "assign":
                    env[stmt.name] = stmt.value(env, ctx)
                elif kind == "arrayassign":
                    arr = env[stmt.name]
                    i = stmt.index(env, ctx)
                    if i < 0 or i >= len(arr.elems):
                        raise Fault(stmt.span, "index out of range")
                    arr.elems[i] = stmt.value(env, ctx)
                elif kind == "assert":
                    if not stmt.cond(env, ctx):
                        raise Fault(stmt.span, "assertion might not hold")
                elif kind == "assume":
                    if not stmt.cond(env, ctx):
                        raise _PrunedAll()
                elif kind == "return":
                    raise _ReturnSignal(stmt.span)
                elif kind == "if":
                    block_ = stmt.then_block if stmt.cond(env, ctx) else stmt.else_block
                    if block_ is not None:
                        self._run_block(block_, env, method, entry_dec)
                elif kind == "while":
                    self._run_loop(stmt, env, method, entry_dec)
                elif kind == "call":
                    self._run_call(stmt, env, method, entry_dec)
                else:
                    raise AssertionError(kind)
        finally:
            for name in declared:
                env.pop(name, None)

    def _run_loop(self, stmt: CStmt, env: dict, method: CompiledMethod,
                  entry_dec: tuple) -> None:
        ctx = self.ctx
        for clause in stmt.invariants:
            if not clause.test(env, ctx):
                raise Fault(clause.span, "loop invariant might not hold on entry")
        while True:
            ctx.charge(stmt.span)
            if not stmt.cond(env, ctx):
                return
            dec_prev = (tuple(fn(env, ctx) for fn in stmt.decreases)
                        if stmt.has_decreases else None)
            self._run_block(stmt.body, env, method, entry_dec)
            for clause in stmt.invariants:
                if not clause.test(env, ctx):
                    raise Fault(clause.span, "loop invariant might not be maintained")
            if stmt.has_decreases:
                dec_new = tuple(fn(env, ctx) for fn in stmt.decreases)
                if not check_decrease(dec_new, dec_prev):
                    raise Fault(stmt.dec_span, "decreases clause might not decrease")

    def _run_call(self, stmt: CStmt, env: dict, method: CompiledMethod,
                  entry_dec: tuple) -> None:
        call = stmt.call
        ctx = self.ctx
        args = tuple(fn(env, ctx) for fn in call.arg_fns)
        if call.method == method.name:
            callee_env = {p.name: v
                          for p, v in zip(method.decl.params, args)}
            new_dec = method.decreases_tuple(callee_env, ctx, args)
            if not check_decrease(new_dec, entry_dec):
                raise Fault(call.span, "decreases clause might not decrease")
        outs = self.run_method(call.method, args, call.span)
        for name, value in zip(call.targets, outs):
            env[name] = value


def satisfies_requires(program: Program, method_name: str, inputs: tuple,
                       bounds: Bounds) -> bool:
    """True when the method's requires clauses all hold for these inputs."""
    compiled = compile_program(program)
    method = compiled.methods[method_name]
    ctx = Ctx(compiled.functions, bounds.max_steps)
    env = {p.name: v for p, v in zip(method.decl.params, inputs)}
    for clause in method.requires:
        try:
            if not clause.test(env, ctx):
                return False
        except Fault:
            return False
    return True


def execute_concrete(program: Program, entry: str, inputs: list,
                     bounds: Bounds,
                     timeout_ms: Optional[int] = None) -> Outcome:
    """Big-step execution of ``entry`` on concrete inputs.

    Returns the first assertion, specification, or runtime fault, or Ok.
    Inputs are used as given; arrays are mutated in place.
    """
    compiled = compile_program(program)
    if entry not in compiled.methods:
        raise KeyError(f"no method named {entry}")
    deadline = (time.monotonic() + timeout_ms / 1000.0
                if timeout_ms is not None else None)
    ctx = Ctx(compiled.functions, bounds.max_steps, deadline)
    decl = compiled.methods[entry].decl
    runner = _Runner(compiled, ctx)
    try:
        runner.run_method(entry, tuple(inputs), decl.name_span)
    except Fault as fault:
        return Outcome(False, fault.span, fault.message)
    except _PrunedAll:
        return OK
    return OK
