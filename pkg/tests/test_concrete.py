import pytest

from verifide.prover import (
    ArrayValue, BoundedProver, Bounds, execute_concrete, extract_units,
    input_tuples, satisfies_requires,
)

from conftest import FILL_FRAME, corpus_paths, resolve_text

BOUNDS = Bounds()


def test_identity_ok():
    program = resolve_text(
        "method Id(x: int) returns (y: int) ensures y == x { y := x; }")
    assert execute_concrete(program, "Id", [2], BOUNDS).ok


def test_assert_false_faults_at_the_assert():
    program = resolve_text("method B() { assert false; }")
    outcome = execute_concrete(program, "B", [], BOUNDS)
    assert not outcome.ok
    assert outcome.fault_message == "assertion might not hold"
    assert outcome.fault_span.start_line == 0


def test_calls_execute_callee_bodies():
    text = ("method Inc(x: int) returns (y: int)\n"
            "  requires x < 3\n"
            "  ensures y == x + 1\n"
            "{ y := x + 1; }\n"
            "method Twice(x: int) returns (z: int)\n"
            "  requires x <= 1\n"
            "  ensures z == x + 2\n"
            "{ var m := 0; m := Inc(x); z := Inc(m); }\n")
    program = resolve_text(text)
    assert execute_concrete(program, "Twice", [1], BOUNDS).ok


def test_callee_ensures_violation_detected_concretely():
    text = ("method Lie() returns (y: int) ensures y == 1 { y := 2; }\n"
            "method C() { var t := 0; t := Lie(); }\n")
    program = resolve_text(text)
    outcome = execute_concrete(program, "C", [], BOUNDS)
    assert not outcome.ok
    assert outcome.fault_message == "ensures clause might not hold"


def test_arrays_mutate_through_calls():
    program = resolve_text(FILL_FRAME)
    array = ArrayValue([9, 9, 9])
    outcome = execute_concrete(program, "Fill", [array, 0, 2], BOUNDS)
    assert outcome.ok
    assert array.elems == [2, 2, 2]


def test_assume_false_is_vacuously_ok():
    program = resolve_text("method A(x: int) { assume x == 99; assert false; }")
    assert execute_concrete(program, "A", [0], BOUNDS).ok


def test_step_budget_fault():
    program = resolve_text("method Spin() { while true { } }")
    outcome = execute_concrete(program, "Spin", [], Bounds(max_steps=100))
    assert not outcome.ok
    assert outcome.fault_message == "step budget exceeded"


def test_unknown_entry_raises():
    program = resolve_text("method M() { }")
    with pytest.raises(KeyError):
        execute_concrete(program, "Nope", [], BOUNDS)


def test_satisfies_requires_filters():
    program = resolve_text("method P(x: int) requires x > 0 { }")
    assert satisfies_requires(program, "P", (1,), BOUNDS)
    assert not satisfies_requires(program, "P", (0,), BOUNDS)


# modular soundness on the corpus: proved programs never fault concretely
@pytest.mark.parametrize(
    "path", [p for p in corpus_paths() if p.name.startswith("v_")],
    ids=lambda p: p.name)
def test_soundness_oracle(path):
    program = resolve_text(path.read_text(encoding="utf-8"))
    prover = BoundedProver()
    for unit in extract_units(program):
        verdict = prover.verify_unit(unit, BOUNDS, 60_000)
        assert verdict.kind == "Verified", (unit.unit_id, verdict)
    for name, decl in program.methods().items():
        for args in input_tuples(decl.params, BOUNDS):
            if not satisfies_requires(program, name, args, BOUNDS):
                continue
            outcome = execute_concrete(program, name, list(args), BOUNDS)
            assert outcome.ok, (name, args, outcome.fault_message)
