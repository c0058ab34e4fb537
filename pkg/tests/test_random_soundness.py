"""Randomized soundness harness.

Generates small well-typed programs and checks the central property: when
every unit of a program verifies, whole-program concrete execution cannot
fault for any bounded input that satisfies the entry's preconditions.

Generated callees keep their results inside the enumeration bounds (out
contracts come from a closed catalog), so modular branch enumeration covers
every value concrete execution can produce; see the soundness notes in the
prover package.
"""

import random

import pytest

from verifide.lang import parse, resolve
from verifide.prover import (
    BoundedProver, Bounds, execute_concrete, extract_units, input_tuples,
    satisfies_requires,
)

BOUNDS = Bounds(int_low=-2, int_high=2, max_array_len=2, max_steps=4000)


class ProgramGen:
    """Emits resolver-clean MiniSpec programs from a seeded RNG."""

    def __init__(self, seed: int) -> None:
        self.rng = random.Random(seed)
        self.functions: list[str] = []   # names, int params only
        self.fn_arity: dict[str, int] = {}
        self.callables: list[tuple[str, list[str], str]] = []  # name, params, out

    # ── expressions (over int variables in scope) ────────────────

    def int_expr(self, vars_: list[str], depth: int = 0) -> str:
        roll = self.rng.random()
        if depth >= 2 or roll < 0.35 or not vars_:
            if vars_ and self.rng.random() < 0.6:
                return self.rng.choice(vars_)
            return str(self.rng.randint(-2, 2))
        if roll < 0.8:
            op = self.rng.choice(["+", "-", "*"])
            return (f"({self.int_expr(vars_, depth + 1)} {op} "
                    f"{self.int_expr(vars_, depth + 1)})")
        if self.functions and self.rng.random() < 0.5:
            name = self.rng.choice(self.functions)
            args = ", ".join(self.int_expr(vars_, 2)
                             for _ in range(self.fn_arity[name]))
            return f"{name}({args})"
        # division keeps a constant positive denominator: always defined
        return f"({self.int_expr(vars_, depth + 1)} / {self.rng.randint(1, 2)})"

    def bool_expr(self, vars_: list[str], depth: int = 0) -> str:
        roll = self.rng.random()
        if depth >= 2 or roll < 0.4:
            cmp_op = self.rng.choice(["==", "!=", "<", "<=", ">", ">="])
            return f"{self.int_expr(vars_, 1)} {cmp_op} {self.int_expr(vars_, 1)}"
        op = self.rng.choice(["&&", "||", "==>"])
        return (f"({self.bool_expr(vars_, depth + 1)} {op} "
                f"{self.bool_expr(vars_, depth + 1)})")

    # ── declarations ─────────────────────────────────────────────

    def gen_function(self, index: int) -> str:
        name = f"F{index}"
        arity = self.rng.randint(0, 2)
        params = [f"p{i}" for i in range(arity)]
        header = ", ".join(f"{p}: int" for p in params)
        body = self.int_expr(params)
        self.functions.append(name)
        self.fn_arity[name] = arity
        return f"function {name}({header}): int {{ {body} }}"

    def gen_method(self, index: int, callable_ok: bool) -> str:
        name = f"M{index}"
        params = [f"x{i}" for i in range(self.rng.randint(0, 2))]
        use_array = not callable_ok and self.rng.random() < 0.4
        sig_params = [f"{p}: int" for p in params]
        if use_array:
            sig_params.append("a: array<int>")
        out = None
        ensures: list[str] = []
        if callable_ok and self.rng.random() < 0.7:
            out = "r"
            ensures.append(self._out_contract(out, params))
        requires = [self.bool_expr(params)] if params and self.rng.random() < 0.5 else []

        lines = [f"method {name}({', '.join(sig_params)})"
                 + (f" returns ({out}: int)" if out else "")]
        for clause in requires:
            lines.append(f"  requires {clause}")
        for clause in ensures:
            lines.append(f"  ensures {clause}")
        lines.append("{")
        scope = list(params)
        lines += self._statements(scope, out, use_array, budget=self.rng.randint(1, 4))
        if out:
            lines.append(f"  {out} := {self._out_body(ensures[0], out, params)};")
        lines.append("}")
        if callable_ok:
            self.callables.append((name, params, out or ""))
        return "\n".join(lines)

    def _out_contract(self, out: str, params: list[str]) -> str:
        # closed catalog: concrete results always land inside the bounds
        choices = [f"{out} == {self.rng.randint(-2, 2)}",
                   f"0 - 2 <= {out} && {out} <= 2"]
        if params:
            choices.append(f"{out} == {self.rng.choice(params)}")
        return self.rng.choice(choices)

    def _out_body(self, contract: str, out: str, params: list[str]) -> str:
        if contract.startswith(f"{out} =="):
            return contract.split("==", 1)[1].strip()
        return "0"  # satisfies the range contract

    def _statements(self, scope: list[str], out, use_array: bool,
                    budget: int) -> list[str]:
        lines: list[str] = []
        local_count = 0
        for _ in range(budget):
            kind = self.rng.random()
            if kind < 0.3:
                local = f"t{local_count}"
                local_count += 1
                lines.append(f"  var {local} := {self.int_expr(scope)};")
                scope.append(local)
            elif kind < 0.45 and any(v.startswith("t") for v in scope):
                target = self.rng.choice([v for v in scope if v.startswith("t")])
                lines.append(f"  {target} := {self.int_expr(scope)};")
            elif kind < 0.6:
                lines.append(f"  if {self.bool_expr(scope)} {{")
                lines.append(f"    assert {self.bool_expr(scope)};")
                lines.append("  }")
            elif kind < 0.7:
                lines.append(f"  assume {self.bool_expr(scope)};")
            elif kind < 0.8 and use_array:
                # guarded element write: indices come from parameters
                idx = self.rng.choice([v for v in scope] or ["0"])
                lines.append(f"  if 0 <= {idx} && {idx} < a.Length {{")
                lines.append(f"    a[{idx}] := {self.int_expr(scope)};")
                lines.append("  }")
            elif kind < 0.9 and self.callables:
                callee, cparams, cout = self.rng.choice(self.callables)
                args = ", ".join(self._call_arg(scope) for _ in cparams)
                if cout:
                    local = f"t{local_count}"
                    local_count += 1
                    lines.append(f"  var {local} := 0;")
                    lines.append(f"  {local} := {callee}({args});")
                    scope.append(local)
                else:
                    lines.append(f"  {callee}({args});")
            else:
                lines.append(f"  assert {self.bool_expr(scope)};")
        if self.rng.random() < 0.25:
            k = self.rng.randint(1, 3)
            lines.append("  var i := 0;")
            lines.append(f"  while i < {k}")
            lines.append("    invariant 0 <= i")
            lines.append(f"    invariant i <= {k}")
            lines.append(f"    decreases {k} - i")
            lines.append("  {")
            lines.append("    i := i + 1;")
            lines.append("  }")
        return lines

    def _call_arg(self, scope: list[str]) -> str:
        # plain references or in-bounds literals, so call-site values stay
        # inside the enumerated domain
        candidates = [v for v in scope]
        if candidates and self.rng.random() < 0.7:
            return self.rng.choice(candidates)
        return str(self.rng.randint(-2, 2))

    def generate(self) -> str:
        decls: list[str] = []
        for i in range(self.rng.randint(0, 2)):
            decls.append(self.gen_function(i))
        n_callable = self.rng.randint(1, 2)
        for i in range(n_callable):
            decls.append(self.gen_method(i, callable_ok=True))
        for i in range(n_callable, n_callable + self.rng.randint(1, 2)):
            decls.append(self.gen_method(i, callable_ok=False))
        return "\n\n".join(decls) + "\n"


@pytest.mark.parametrize("seed", range(40))
def test_generated_programs_respect_modular_soundness(seed):
    text = ProgramGen(seed).generate()
    program = resolve(parse(text))
    assert not program.has_errors, (text, [d.message for d in program.diagnostics])
    prover = BoundedProver()
    verdicts = {u.unit_id: prover.verify_unit(u, BOUNDS, 30_000)
                for u in extract_units(program)}
    again = {u.unit_id: prover.verify_unit(u, BOUNDS, 30_000)
             for u in extract_units(program)}
    assert verdicts == again, "verdicts must be deterministic"
    if not all(v.kind == "Verified" for v in verdicts.values()):
        return  # failing programs are a valid outcome; nothing to sweep
    for name, decl in program.methods().items():
        for args in input_tuples(decl.params, BOUNDS):
            if not satisfies_requires(program, name, args, BOUNDS):
                continue
            outcome = execute_concrete(program, name, list(args), BOUNDS)
            assert outcome.ok, (text, name, args, outcome.fault_message,
                                outcome.fault_span)


def test_generator_yields_a_mixed_population():
    verified = failing = 0
    prover = BoundedProver()
    for seed in range(40):
        program = resolve(parse(ProgramGen(seed).generate()))
        verdicts = [prover.verify_unit(u, BOUNDS, 30_000)
                    for u in extract_units(program)]
        if all(v.kind == "Verified" for v in verdicts):
            verified += 1
        else:
            failing += 1
    assert verified >= 5, "the harness should exercise the concrete sweep"
    assert failing >= 5, "the harness should also cover failing programs"
