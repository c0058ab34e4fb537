"""Acceptance criteria, one test per criterion.

Each test appends a PASS/FAIL line to RESULTS; the conftest terminal-summary
hook prints them after the run.
"""

import functools
import time

from verifide.orchestrator import Config, Engine, INLINE, VirtualClock
from verifide.prover import (
    BoundedProver, Bounds, ScriptedProver, execute_concrete, extract_units,
    input_tuples, satisfies_requires,
)
from verifide.replay import ReplayOptions, parse_script, run_session

from conftest import (
    FIG3_SNAP0, FIG3_SNAP1, FIG3_SNAP2, FILL_FRAME, FILL_WEAK, corpus_paths,
    resolve_text,
)

RESULTS: list[str] = []


def criterion(name):
    def deco(fn):
        @functools.wraps(fn)
        def wrapper(*args, **kwargs):
            try:
                fn(*args, **kwargs)
            except BaseException:
                RESULTS.append(f"FAIL  {name}")
                raise
            RESULTS.append(f"PASS  {name}")
        return wrapper
    return deco


def fig3_script(**config):
    return parse_script({
        "file": "fig3.msp",
        "snapshots": [
            {"atMs": 0, "text": FIG3_SNAP0},
            {"atMs": 1000, "text": FIG3_SNAP1},
            {"atMs": 2000, "text": FIG3_SNAP2},
        ],
        "config": config,
    })


@criterion("Fig. 3 replay: invocations [5,1,5], hits [0,4,0], one Failed")
def test_fig3_replay_exact():
    started = time.perf_counter()
    report, code = run_session(fig3_script(), ReplayOptions(workers=1))
    elapsed = time.perf_counter() - started
    assert code == 0
    per_snapshot = [
        ([u for u in s["units"] if u["action"] == "Proved"],
         [u for u in s["units"] if u["action"] == "CacheHit"])
        for s in report["snapshots"]]
    assert [len(p) for p, _ in per_snapshot] == [5, 1, 5]
    assert [len(h) for _, h in per_snapshot] == [0, 4, 0]
    snap1_proved = per_snapshot[1][0]
    assert [(u["entity"]["name"], u["obligation"]) for u in snap1_proved] == \
        [("Bar", "MethodBody")]
    failed = [u for s in report["snapshots"] for u in s["units"]
              if u["verdict"] and u["verdict"]["kind"] == "Failed"]
    assert len(failed) == 1
    assert failed[0]["entity"] == {"name": "Foo", "kind": "MethodBody"}
    assert failed[0]["verdict"]["errors"][0]["message"] == \
        "ensures clause might not hold"
    assert elapsed < 5.0


@criterion("Comment insensitivity: 0 invocations, identical checksums")
def test_comment_insensitivity_exact():
    noisy = ("// header comment\n"
             + FIG3_SNAP0.replace("method Bar() { }", "method  Bar( )  { }")
             + "\n/* trailing\n   block */\n")
    script = parse_script({
        "file": "comments.msp",
        "snapshots": [{"atMs": 0, "text": FIG3_SNAP0},
                      {"atMs": 1000, "text": noisy}],
    })
    report, code = run_session(script, ReplayOptions(workers=1))
    assert code == 0
    second = report["snapshots"][1]
    assert all(u["action"] == "CacheHit" for u in second["units"])
    assert sum(u["action"] == "Proved" for u in second["units"]) == 0
    first_sums = {(u["entity"]["name"], u["entity"]["kind"]):
                  (u["entityChecksum"], u["dependencyChecksum"])
                  for u in report["snapshots"][0]["units"]}
    second_sums = {(u["entity"]["name"], u["entity"]["kind"]):
                   (u["entityChecksum"], u["dependencyChecksum"])
                   for u in second["units"]}
    assert first_sums == second_sums


CACHING_BASE = "\n".join(
    f"method M{k}() {{ }}" for k in range(5)) + "\n"


def _caching_snapshots():
    # cumulative edits: each snapshot changes exactly one entity
    snapshots = [{"atMs": 0, "text": CACHING_BASE}]
    text = CACHING_BASE
    for k in range(1, 5):
        text = text.replace(f"method M{k}() {{ }}",
                            f"method M{k}() {{ assert true; }}")
        snapshots.append({"atMs": k * 1000, "text": text})
    return snapshots


@criterion("Caching speedup: 5 edited snapshots <= 1.5x one full run")
def test_caching_speedup_property():
    started = time.perf_counter()
    config = {"prover": {"kind": "scripted", "defaultDelayMs": 100}}
    single = parse_script({"file": "cache.msp",
                           "snapshots": [{"atMs": 0, "text": CACHING_BASE}],
                           "config": config})
    full = parse_script({"file": "cache.msp",
                         "snapshots": _caching_snapshots(),
                         "config": config})
    opts = ReplayOptions(workers=1, real_time=True)
    single_report, _ = run_session(single, opts)
    cached_report, _ = run_session(full, opts)
    nocache_report, _ = run_session(
        full, ReplayOptions(workers=1, real_time=True, no_cache=True))
    single_wall = single_report["totals"]["wallMs"]
    cached_wall = cached_report["totals"]["wallMs"]
    nocache_wall = nocache_report["totals"]["wallMs"]
    assert single_report["totals"]["proverInvocations"] == 10
    assert cached_report["totals"]["proverInvocations"] == 14
    assert nocache_report["totals"]["proverInvocations"] == 50
    assert cached_wall <= 1.5 * single_wall, (cached_wall, single_wall)
    assert nocache_wall >= 3.0 * single_wall, (nocache_wall, single_wall)
    assert time.perf_counter() - started < 15.0


PARALLEL_TEXT = "\n".join(f"method P{k}() {{ }}" for k in range(6)) + "\n"


@criterion("Parallel speedup: 3 workers <= 0.5x wall time of 1 worker")
def test_parallel_speedup_property():
    started = time.perf_counter()
    config = {"prover": {"kind": "scripted", "defaultDelayMs": 200}}
    script = parse_script({"file": "par.msp",
                           "snapshots": [{"atMs": 0, "text": PARALLEL_TEXT}],
                           "config": config})
    slow, _ = run_session(script, ReplayOptions(workers=1, real_time=True))
    fast, _ = run_session(script, ReplayOptions(workers=3, real_time=True))
    assert slow["totals"]["proverInvocations"] == 12
    assert fast["totals"]["proverInvocations"] == 12
    wall_1, wall_3 = slow["totals"]["wallMs"], fast["totals"]["wallMs"]
    assert wall_3 <= 0.5 * wall_1, (wall_3, wall_1)
    assert time.perf_counter() - started < 10.0


PRIORITY_SNAP0 = ("method M() ensures true { }\n"
                  "method Caller() { M(); }\n"
                  "method Z() { }\n")
PRIORITY_SNAP1 = ("method M() ensures 1 == 1 { }\n"
                  "method Caller() { M(); }\n"
                  "method Z() { }\n"
                  "method W() { }\n")
_LEVELS = {"Low": 0, "Medium": 1, "High": 2, "Highest": 3}


@criterion("Priority order: non-increasing; Highest never proved")
def test_priority_order_exact():
    script = parse_script({
        "file": "prio.msp",
        "snapshots": [{"atMs": 0, "text": PRIORITY_SNAP0},
                      {"atMs": 1000, "text": PRIORITY_SNAP1}],
    })
    report, code = run_session(script, ReplayOptions(workers=1))
    assert code == 0
    second = report["snapshots"][1]
    proved = [u for u in second["units"] if u["action"] == "Proved"]
    levels = [_LEVELS[u["priority"]] for u in proved]
    assert levels and levels == sorted(levels, reverse=True)
    assert all(u["priority"] != "Highest" for u in proved)
    assert {"Low", "Medium", "High"} <= {u["priority"] for u in proved}
    hits = [u for u in second["units"] if u["action"] == "CacheHit"]
    assert all(u["priority"] == "Highest" for u in hits)


@criterion("Fill walkthrough: failing trace, then the frame fix verifies")
def test_fill_walkthrough_exact():
    started = time.perf_counter()
    bounds = Bounds()
    weak_program = resolve_text(FILL_WEAK)
    prover = BoundedProver()
    weak = {u.unit_id: prover.verify_unit(u, bounds, 60_000)
            for u in extract_units(weak_program)}
    assert weak["MethodBody Fill"].kind == "Failed"
    error = weak["MethodBody Fill"].errors[0]
    lines = FILL_WEAK.split("\n")
    touched = {s.location.start_line for s in error.trace.states}
    assignment_line = next(i for i, l in enumerate(lines) if "a[end] := v;" in l)
    call_line = next(i for i, l in enumerate(lines) if "Fill(a, end + 1, v);" in l)
    assert assignment_line in touched
    assert call_line in touched
    fixed_program = resolve_text(FILL_FRAME)
    assert ("ensures forall i :: 0 <= i < start ==> a[i] == old(a[i])"
            in FILL_FRAME)
    fixed = {u.unit_id: prover.verify_unit(u, bounds, 60_000)
             for u in extract_units(fixed_program)}
    assert all(v.kind == "Verified" for v in fixed.values()), fixed
    assert time.perf_counter() - started < 10.0


@criterion("Debounce: updates at 0/300/600 ms parse once at 1100 ms")
def test_debounce_exact():
    engine = Engine(Config(execution=INLINE, max_workers=1),
                    prover=ScriptedProver())
    clock = VirtualClock()
    ids = []
    for t in (0, 300, 600):
        clock.advance_to(t)
        ids.append(engine.submit_text(FIG3_SNAP0, set(), at_ms=t))
    assert engine.debounce_deadline() == 1100
    clock.advance_to(1100)
    engine.on_debounce_expired()
    assert engine.parse_log() == [(1100, ids[-1])]


@criterion("Timeout: 200 ms unit under 50 ms times out and is re-attempted")
def test_timeout_handling_exact():
    script = parse_script({
        "file": "slow.msp",
        "snapshots": [{"atMs": 0, "text": "method Slow() { }"},
                      {"atMs": 1000, "text": "method Slow() { }"}],
        "config": {"timeoutMs": 50,
                   "prover": {"kind": "scripted",
                              "units": {"MethodBody Slow": {"delayMs": 200}}}},
    })
    report, code = run_session(script, ReplayOptions(workers=1))
    assert code == 0
    bodies = [
        next(u for u in s["units"] if u["entity"]["kind"] == "MethodBody")
        for s in report["snapshots"]]
    assert bodies[0]["action"] == "Proved"
    assert bodies[0]["verdict"]["kind"] == "Timeout"
    assert bodies[1]["action"] == "Proved", "timeout must not be cache-skipped"
    assert bodies[1]["verdict"]["kind"] == "Timeout"
    specs = [
        next(u for u in s["units"] if u["entity"]["kind"] == "MethodSpec")
        for s in report["snapshots"]]
    assert specs[1]["action"] == "CacheHit"


@criterion("Modular soundness: verified corpus programs never fault concretely")
def test_modular_soundness_oracle():
    started = time.perf_counter()
    paths = corpus_paths()
    assert len(paths) >= 20
    bounds = Bounds()
    prover = BoundedProver()
    verified_programs = 0
    failing_programs = 0
    for path in paths:
        program = resolve_text(path.read_text(encoding="utf-8"))
        verdicts = [prover.verify_unit(u, bounds, 60_000)
                    for u in extract_units(program)]
        if not all(v.kind == "Verified" for v in verdicts):
            failing_programs += 1
            continue
        verified_programs += 1
        for name, decl in program.methods().items():
            for args in input_tuples(decl.params, bounds):
                if not satisfies_requires(program, name, args, bounds):
                    continue
                outcome = execute_concrete(program, name, list(args), bounds)
                assert outcome.ok, (path.name, name, args,
                                    outcome.fault_message)
    assert verified_programs >= 10 and failing_programs >= 5  # mixed corpus
    assert time.perf_counter() - started < 60.0


@criterion("Cache transparency: cached and uncached verdicts agree")
def test_cache_transparency_property():
    small = {"intLow": -2, "intHigh": 2, "maxArrayLen": 2}
    for path in corpus_paths():
        base = path.read_text(encoding="utf-8")
        edited = (base.replace("{", "{ assert true;", 1)
                  if path.name.startswith("v_")
                  else base + "\nmethod Extra() { }\n")
        script = parse_script({
            "file": path.name,
            "snapshots": [{"atMs": 0, "text": base},
                          {"atMs": 1000, "text": edited},
                          {"atMs": 2000, "text": base}],
            "config": {"bounds": small},
        })
        cached, _ = run_session(script)
        plain, _ = run_session(script, ReplayOptions(no_cache=True))
        for s_cached, s_plain in zip(cached["snapshots"], plain["snapshots"]):
            def final(units):
                return {(u["entity"]["name"], u["entity"]["kind"]):
                        u["verdict"]["kind"] for u in units
                        if u["verdict"] and u["verdict"]["kind"] != "Timeout"}
            assert final(s_cached["units"]) == final(s_plain["units"]), path.name
