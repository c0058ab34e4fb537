"""Totally ordered event stream with a bounded ring buffer.

Observers poll with their last seen sequence number. When the buffer has
dropped events an observer has not seen yet, it receives a single Resync
event and must refetch full state.
"""

from __future__ import annotations

import threading
from collections import deque
from dataclasses import dataclass, field
from typing import Optional, Union

from ..cache import Priority
from ..lang.ast import Diagnostic, EntityId
from ..prover.units import Obligation
from ..prover.verdict import Verdict

DEFAULT_EVENT_CAPACITY = 65536


@dataclass
class SnapshotAccepted:
    snapshot_id: int
    seq: int = 0


@dataclass
class ResolutionDiagnostics:
    snapshot_id: int
    items: tuple[Diagnostic, ...]
    seq: int = 0


@dataclass
class UnitScheduled:
    snapshot_id: int
    entity_id: EntityId
    obligation: Obligation
    priority: Priority
    seq: int = 0


@dataclass
class UnitCompleted:
    snapshot_id: int
    entity_id: EntityId
    obligation: Obligation
    verdict: Verdict
    from_cache: bool
    duration_ms: int
    seq: int = 0


@dataclass
class SnapshotVerified:
    snapshot_id: int
    seq: int = 0


@dataclass
class MarginsChanged:
    lines: dict[int, str] = field(default_factory=dict)  # line -> edited|verifying
    seq: int = 0


@dataclass
class Resync:
    latest_seq: int
    seq: int = 0


Event = Union[SnapshotAccepted, ResolutionDiagnostics, UnitScheduled,
              UnitCompleted, SnapshotVerified, MarginsChanged, Resync]


class EventLog:
    def __init__(self, capacity: int = DEFAULT_EVENT_CAPACITY) -> None:
        self._events: deque[Event] = deque(maxlen=capacity)
        self._next_seq = 1
        self._cond = threading.Condition()

    def emit(self, event: Event) -> Event:
        with self._cond:
            event.seq = self._next_seq
            self._next_seq += 1
            self._events.append(event)
            self._cond.notify_all()
        return event

    @property
    def latest_seq(self) -> int:
        with self._cond:
            return self._next_seq - 1

    def since(self, since_seq: int) -> list[Event]:
        with self._cond:
            return self._since_locked(since_seq)

    def _since_locked(self, since_seq: int) -> list[Event]:
        if not self._events:
            return []
        first = self._events[0].seq
        if since_seq + 1 < first:
            resync = Resync(latest_seq=self._next_seq - 1)
            resync.seq = self._next_seq - 1
            return [resync]
        return [e for e in self._events if e.seq > since_seq]

    def wait_since(self, since_seq: int, timeout_s: Optional[float] = None) -> list[Event]:
        """Block until events past since_seq exist (or timeout); then return them."""
        with self._cond:
            if self._next_seq - 1 <= since_seq:
                self._cond.wait(timeout=timeout_s)
            return self._since_locked(since_seq)
