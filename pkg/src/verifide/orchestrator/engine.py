"""Continuous verification engine.

Snapshot intake is serialized: submit_text records the buffer and re-arms
the debounce; when the debounce expires the latest snapshot is parsed and
resolved, and, if clean, verified - immediately when the verifier is idle,
otherwise remembered and started right after the in-flight run finishes
(unless that run already covered it). Units are served from cache when
their dependency checksum is unchanged and otherwise proved in priority
order on up to ``pool_size(max_workers, pending)`` workers.

All externally visible progress goes through one totally ordered event
stream; margin colors follow the edited-line bookkeeping.
"""

from __future__ import annotations

import heapq
import threading
import time
from dataclasses import dataclass, field
from typing import Callable, Optional

from ..cache import CacheEntry, Priority, ResultCache
from ..fingerprint import EntityFingerprint, fingerprint_program
from ..lang.ast import EntityId, Program
from ..lang.parser import parse
from ..lang.resolver import resolve
from ..lang.tokens import Token, lex_scan
from ..prover.checker import BoundedProver
from ..prover.units import (
    Obligation, VerificationUnit, effective_timeout_ms, extract_units,
)
from ..prover.verdict import Verdict
from .config import Config, INLINE, MANUAL, THREADED, pool_size
from .events import (
    EventLog, MarginsChanged, ResolutionDiagnostics, SnapshotAccepted,
    SnapshotVerified, UnitCompleted, UnitScheduled,
)
from .margins import MarginTracker

PipelineFn = Callable[[str], Program]


def default_pipeline(text: str) -> Program:
    return resolve(parse(text))


@dataclass
class UnitRecord:
    entity_id: EntityId
    obligation: Obligation
    priority: Priority
    action: str  # "Proved" | "CacheHit" | "Skipped"
    verdict: Optional[Verdict]
    duration_ms: int
    entity_checksum: int
    dependency_checksum: int


@dataclass
class SnapshotRecord:
    snapshot_id: int
    resolution_ms: int
    resolved_at_ms: int
    diagnostics: tuple
    units: list[UnitRecord] = field(default_factory=list)
    run_started: bool = False
    run_wall_ms: float = 0.0


@dataclass
class _QueuedUnit:
    unit: VerificationUnit
    priority: Priority
    fingerprint: EntityFingerprint
    order: int


class _Run:
    def __init__(self, snapshot_id: int, program: Program,
                 fingerprints: dict[EntityId, EntityFingerprint]) -> None:
        self.snapshot_id = snapshot_id
        self.program = program
        self.fingerprints = fingerprints
        self.queue: list[tuple[int, int, _QueuedUnit]] = []
        self.outstanding = 0  # queued + running units
        self.started_at = time.perf_counter()


class Engine:
    def __init__(self, config: Optional[Config] = None, prover=None,
                 cache: Optional[ResultCache] = None,
                 pipeline: Optional[PipelineFn] = None) -> None:
        self.config = config or Config()
        self.prover = prover if prover is not None else BoundedProver(
            error_cap=self.config.error_cap)
        self.cache = cache if cache is not None else ResultCache(
            self.config.cache_capacity)
        self.pipeline = pipeline or default_pipeline
        self.events = EventLog()

        self._lock = threading.RLock()
        self._idle = threading.Condition(self._lock)
        self._margins = MarginTracker()
        self._closed = threading.Event()

        self._next_snapshot_id = 0
        self._last_at_ms: Optional[int] = None
        self._latest_submit: Optional[tuple[int, str, int]] = None  # id, text, at
        self._deadline_ms: Optional[int] = None
        self._tokens: list[Token] = []
        self._latest_text: str = ""

        self._resolved: dict[int, Program] = {}
        self._published: Optional[Program] = None  # latest clean program
        self._published_id: Optional[int] = None
        self._current_run: Optional[_Run] = None
        self._pending_latest: Optional[int] = None
        self._parse_log: list[tuple[int, int]] = []  # (at_ms, snapshot_id)

        self.snapshot_records: dict[int, SnapshotRecord] = {}

    # ── intake ───────────────────────────────────────────────────

    def submit_text(self, text: str, edited_lines: set[int],
                    at_ms: int) -> int:
        """Record a buffer snapshot; marks lines edited and re-arms debounce."""
        with self._lock:
            if self._last_at_ms is not None and at_ms < self._last_at_ms:
                raise ValueError("submit times must be non-decreasing")
            self._last_at_ms = at_ms
            snapshot_id = self._next_snapshot_id
            self._next_snapshot_id += 1
            self._latest_submit = (snapshot_id, text, at_ms)
            self._latest_text = text
            self._tokens = lex_scan(text)
            self._deadline_ms = at_ms + self.config.debounce_ms
            self.events.emit(SnapshotAccepted(snapshot_id))
            if self._margins.edit(snapshot_id, set(edited_lines)):
                self._emit_margins()
            return snapshot_id

    def debounce_deadline(self) -> Optional[int]:
        with self._lock:
            return self._deadline_ms

    @property
    def last_submit_ms(self) -> Optional[int]:
        with self._lock:
            return self._last_at_ms

    def on_debounce_expired(self) -> None:
        """Parse and resolve the latest snapshot; start or queue verification."""
        with self._lock:
            if self._deadline_ms is None or self._latest_submit is None:
                return
            snapshot_id, text, at_ms = self._latest_submit
            deadline = self._deadline_ms
            self._deadline_ms = None

            t0 = time.perf_counter()
            program = self.pipeline(text)
            resolution_ms = int((time.perf_counter() - t0) * 1000)
            self._parse_log.append((deadline, snapshot_id))
            record = SnapshotRecord(snapshot_id, resolution_ms, deadline,
                                    tuple(program.diagnostics))
            self.snapshot_records[snapshot_id] = record
            self.events.emit(ResolutionDiagnostics(
                snapshot_id, tuple(program.diagnostics)))
            if program.has_errors:
                return
            self._resolved[snapshot_id] = program
            self._published = program
            self._published_id = snapshot_id
            if self._current_run is not None:
                self._pending_latest = snapshot_id
                self._abandon_stale(program)
            else:
                self._start_run(snapshot_id)

    # ── verification runs ────────────────────────────────────────

    def _start_run(self, snapshot_id: int) -> None:
        program = self._resolved[snapshot_id]
        fingerprints = fingerprint_program(program.entities, program.call_graph)
        run = _Run(snapshot_id, program, fingerprints)
        self._current_run = run
        record = self.snapshot_records[snapshot_id]
        record.run_started = True

        if self._margins.start_run(snapshot_id):
            self._emit_margins()

        for order, unit in enumerate(extract_units(program)):
            fp = fingerprints[unit.entity_id]
            priority = self.cache.priority_of(
                unit.entity_id, fp.entity_checksum, fp.dependency_checksum)
            if priority == Priority.HIGHEST:
                verdict = self.cache.lookup(unit.entity_id, fp.dependency_checksum)
                if verdict is not None:
                    record.units.append(UnitRecord(
                        unit.entity_id, unit.obligation, priority, "CacheHit",
                        verdict, 0, fp.entity_checksum, fp.dependency_checksum))
                    self.events.emit(UnitCompleted(
                        snapshot_id, unit.entity_id, unit.obligation, verdict,
                        from_cache=True, duration_ms=0))
                    continue
                # cached verdict was a timeout: prove again, first in line
            queued = _QueuedUnit(unit, priority, fp, order)
            heapq.heappush(run.queue, (-int(priority), order, queued))
            run.outstanding += 1
            self.events.emit(UnitScheduled(
                snapshot_id, unit.entity_id, unit.obligation, priority))

        if run.outstanding == 0:
            self._finish_run(run)
            return
        if self.config.execution == INLINE:
            while self._run_one_queued(run):
                pass
        elif self.config.execution == THREADED:
            self._spawn_workers(run)
        # MANUAL: the caller pumps run_pending_unit()

    def _spawn_workers(self, run: _Run) -> None:
        for i in range(pool_size(self.config.max_workers, len(run.queue))):
            thread = threading.Thread(
                target=self._worker_loop, args=(run,),
                name=f"verifide-worker-{run.snapshot_id}-{i}", daemon=True)
            thread.start()

    def _worker_loop(self, run: _Run) -> None:
        while not self._closed.is_set():
            if not self._run_one_queued(run):
                return

    def _run_one_queued(self, run: _Run) -> bool:
        with self._lock:
            if run is not self._current_run or not run.queue:
                return False
            _, _, queued = heapq.heappop(run.queue)
        self._prove(run, queued)
        return True

    def run_pending_unit(self) -> bool:
        """Manual-execution pump: prove one queued unit, if any."""
        with self._lock:
            run = self._current_run
        if run is None:
            return False
        return self._run_one_queued(run)

    def _prove(self, run: _Run, queued: _QueuedUnit) -> None:
        unit = queued.unit
        timeout_ms = effective_timeout_ms(unit.decl, self.config.timeout_ms)
        started = time.perf_counter()
        verdict = self.prover.verify_unit(
            unit, self.config.bounds, timeout_ms, cancel=self._closed.is_set)
        duration_ms = int((time.perf_counter() - started) * 1000)
        simulated = getattr(self.prover, "simulated_duration_ms", None)
        if simulated is not None:
            sim = simulated(unit, timeout_ms)
            if sim is not None:
                duration_ms = sim
        with self._lock:
            fp = queued.fingerprint
            if verdict is None:  # cancelled; the orchestrator discards it
                record = self.snapshot_records[run.snapshot_id]
                record.units.append(UnitRecord(
                    unit.entity_id, unit.obligation, queued.priority, "Skipped",
                    None, 0, fp.entity_checksum, fp.dependency_checksum))
            else:
                self.cache.store(CacheEntry(
                    unit.entity_id, fp.entity_checksum, fp.dependency_checksum,
                    verdict, run.snapshot_id, duration_ms))
                record = self.snapshot_records[run.snapshot_id]
                record.units.append(UnitRecord(
                    unit.entity_id, unit.obligation, queued.priority, "Proved",
                    verdict, duration_ms, fp.entity_checksum,
                    fp.dependency_checksum))
                self.events.emit(UnitCompleted(
                    run.snapshot_id, unit.entity_id, unit.obligation, verdict,
                    from_cache=False, duration_ms=duration_ms))
            run.outstanding -= 1
            if run.outstanding == 0:
                self._finish_run(run)

    def _finish_run(self, run: _Run) -> None:
        record = self.snapshot_records[run.snapshot_id]
        record.run_wall_ms = (time.perf_counter() - run.started_at) * 1000
        self._current_run = None
        self.events.emit(SnapshotVerified(run.snapshot_id))
        if self._margins.finish_run():
            self._emit_margins()
        self._idle.notify_all()
        if self._pending_latest is not None:
            next_id = self._pending_latest
            self._pending_latest = None
            if next_id != run.snapshot_id:
                self._start_run(next_id)

    def _abandon_stale(self, new_program: Program) -> None:
        """Drop queued units whose dependency checksum changed in the newer
        snapshot; their results would be stale and uncacheable for it."""
        run = self._current_run
        if run is None or not run.queue:
            return
        new_fps = fingerprint_program(new_program.entities, new_program.call_graph)
        keep: list[tuple[int, int, _QueuedUnit]] = []
        record = self.snapshot_records[run.snapshot_id]
        for item in run.queue:
            queued = item[2]
            new_fp = new_fps.get(queued.unit.entity_id)
            if (new_fp is None
                    or new_fp.dependency_checksum
                    != queued.fingerprint.dependency_checksum):
                fp = queued.fingerprint
                record.units.append(UnitRecord(
                    queued.unit.entity_id, queued.unit.obligation,
                    queued.priority, "Skipped", None, 0,
                    fp.entity_checksum, fp.dependency_checksum))
                run.outstanding -= 1
            else:
                keep.append(item)
        if len(keep) != len(run.queue):
            run.queue = keep
            heapq.heapify(run.queue)
            if run.outstanding == 0:
                self._finish_run(run)

    # ── observers ────────────────────────────────────────────────

    def poll_events(self, since_seq: int = 0) -> list:
        return self.events.since(since_seq)

    def margin_states(self) -> dict[int, str]:
        with self._lock:
            return self._margins.states()

    def current_tokens(self) -> list[Token]:
        with self._lock:
            return list(self._tokens)

    def latest_program(self) -> Optional[Program]:
        with self._lock:
            return self._published

    def latest_program_id(self) -> Optional[int]:
        with self._lock:
            return self._published_id

    def parse_log(self) -> list[tuple[int, int]]:
        """(time fired, snapshot id) per resolution; timing tests read this."""
        with self._lock:
            return list(self._parse_log)

    def is_idle(self) -> bool:
        with self._lock:
            return self._current_run is None and self._pending_latest is None

    def wait_idle(self, timeout_s: Optional[float] = None) -> bool:
        deadline = None if timeout_s is None else time.monotonic() + timeout_s
        with self._idle:
            while not (self._current_run is None and self._pending_latest is None):
                remaining = None if deadline is None else deadline - time.monotonic()
                if remaining is not None and remaining <= 0:
                    return False
                self._idle.wait(timeout=remaining)
            return True

    def close(self) -> None:
        self._closed.set()

    def _emit_margins(self) -> None:
        self.events.emit(MarginsChanged(self._margins.states()))
