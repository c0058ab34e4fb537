"""Replays an edit-session script through the engine.

Debounce intervals are simulated instantly: each snapshot is submitted at
its scripted time and the debounce fires as soon as it would have expired.
With ``real_time`` the scripted prover actually sleeps and units run on the
worker pool, so report wall times are real; otherwise everything executes
inline and reports are bit-identical across runs.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Any, Optional

from ..cache import CacheEntry, Priority, ResultCache, load_cache, save_cache
from ..orchestrator.config import Config, INLINE, THREADED
from ..orchestrator.engine import Engine
from ..prover.checker import BoundedProver
from .diff import diff_lines
from .report import build_report
from .script import SessionScript


class NullCache:
    """Cache-disabled mode: every lookup misses, nothing is stored."""

    def lookup(self, entity_id, dependency_checksum):
        return None

    def store(self, entry: CacheEntry) -> None:
        pass

    def peek(self, entity_id):
        return None

    def priority_of(self, entity_id, entity_checksum, dependency_checksum):
        return Priority.HIGH

    def entries(self) -> list:
        return []


@dataclass
class ReplayOptions:
    workers: Optional[int] = None
    debounce_ms: Optional[int] = None
    timeout_ms: Optional[int] = None
    bounds: Optional[object] = None
    cache_file: Optional[str] = None
    no_cache: bool = False
    real_time: bool = False


def _pick(*values):
    for v in values:
        if v is not None:
            return v
    return None


def run_session(script: SessionScript,
                options: Optional[ReplayOptions] = None) -> tuple[dict[str, Any], int]:
    """Returns (report, exit_code); exit code 2 flags resolution errors."""
    options = options or ReplayOptions()
    config = Config(
        debounce_ms=_pick(options.debounce_ms, script.debounce_ms, 500),
        max_workers=_pick(options.workers, script.workers, 1),
        timeout_ms=_pick(options.timeout_ms, script.timeout_ms, 10_000),
        bounds=_pick(options.bounds, script.bounds) or Config().bounds,
        cache_capacity=_pick(script.cache_capacity, 4096),
        prover_kind=script.prover_kind,
        execution=THREADED if options.real_time else INLINE,
    )
    if script.prover_kind == "scripted":
        prover = script.make_scripted_prover(real_sleep=options.real_time)
    else:
        prover = BoundedProver()

    if options.no_cache:
        cache = NullCache()
    else:
        cache = ResultCache(config.cache_capacity)
        if options.cache_file and Path(options.cache_file).exists():
            for entry in load_cache(options.cache_file):
                cache.store(entry)

    engine = Engine(config, prover=prover, cache=cache)
    snapshots = script.snapshots
    previous_text = ""
    for i, snapshot in enumerate(snapshots):
        deadline = engine.debounce_deadline()
        if deadline is not None and deadline <= snapshot.at_ms:
            engine.on_debounce_expired()
            engine.wait_idle()
        edited = diff_lines(previous_text, snapshot.text)
        engine.submit_text(snapshot.text, edited, snapshot.at_ms)
        previous_text = snapshot.text
    if engine.debounce_deadline() is not None:
        engine.on_debounce_expired()
    engine.wait_idle()

    if options.cache_file and not options.no_cache:
        save_cache(options.cache_file, cache.entries())

    # scripted virtual replays report scripted durations so output is
    # bit-identical across runs; everything else reports measured time
    simulated = script.prover_kind == "scripted" and not options.real_time
    report = build_report(engine, simulated_time=simulated)
    has_resolution_errors = any(
        d.severity == "error"
        for record in engine.snapshot_records.values()
        for d in record.diagnostics)
    return report, (2 if has_resolution_errors else 0)
