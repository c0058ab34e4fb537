"""Verification result cache and re-verification priorities.

One entry per entity, latest wins, least-recently-used eviction beyond
capacity. A lookup hit requires an equal dependency checksum; Timeout
verdicts are stored (so clients can re-display them) but never satisfy a
lookup, which forces a fresh attempt on the next snapshot.

Priorities, checked in this order:
  Highest - dependency checksum matches the cached one (pure lookup)
  High    - no cache entry (the entity is new)
  Medium  - entity checksum differs (the entity was edited directly)
  Low     - entity unchanged but a dependency changed
"""

from __future__ import annotations

import struct
import threading
from collections import OrderedDict
from dataclasses import dataclass
from enum import IntEnum
from pathlib import Path
from typing import Optional

from .lang.ast import EntityId, EntityKind
from .lang.tokens import Span
from .prover.verdict import (
    TIMEOUT, VERIFIED, CounterexampleTrace, TraceState, Verdict,
    VerificationError,
)

DEFAULT_CAPACITY = 4096


class Priority(IntEnum):
    LOW = 0
    MEDIUM = 1
    HIGH = 2
    HIGHEST = 3

    @property
    def label(self) -> str:
        return {0: "Low", 1: "Medium", 2: "High", 3: "Highest"}[int(self)]


@dataclass(frozen=True)
class CacheEntry:
    entity_id: EntityId
    entity_checksum: int
    dependency_checksum: int
    verdict: Verdict
    verified_at_snapshot: int
    duration_ms: int


def priority_of(entry: Optional[CacheEntry], entity_checksum: int,
                dependency_checksum: int) -> Priority:
    if entry is not None and entry.dependency_checksum == dependency_checksum:
        return Priority.HIGHEST
    if entry is None:
        return Priority.HIGH
    if entry.entity_checksum != entity_checksum:
        return Priority.MEDIUM
    return Priority.LOW


class ResultCache:
    """Thread-safe per-entity verdict cache with LRU eviction."""

    def __init__(self, capacity: int = DEFAULT_CAPACITY) -> None:
        if capacity < 1:
            raise ValueError("capacity must be positive")
        self.capacity = capacity
        self._entries: OrderedDict[EntityId, CacheEntry] = OrderedDict()
        self._lock = threading.Lock()

    def __len__(self) -> int:
        with self._lock:
            return len(self._entries)

    def lookup(self, entity_id: EntityId,
               dependency_checksum: int) -> Optional[Verdict]:
        with self._lock:
            entry = self._entries.get(entity_id)
            if entry is None or entry.dependency_checksum != dependency_checksum:
                return None
            if entry.verdict.kind == "Timeout":
                return None
            self._entries.move_to_end(entity_id)
            return entry.verdict

    def store(self, entry: CacheEntry) -> None:
        with self._lock:
            self._entries[entry.entity_id] = entry
            self._entries.move_to_end(entry.entity_id)
            while len(self._entries) > self.capacity:
                self._entries.popitem(last=False)

    def peek(self, entity_id: EntityId) -> Optional[CacheEntry]:
        """Entry without touching recency; used for priority computation."""
        with self._lock:
            return self._entries.get(entity_id)

    def priority_of(self, entity_id: EntityId, entity_checksum: int,
                    dependency_checksum: int) -> Priority:
        return priority_of(self.peek(entity_id), entity_checksum,
                           dependency_checksum)

    def entries(self) -> list[CacheEntry]:
        """Snapshot in least-recently-used-first order."""
        with self._lock:
            return list(self._entries.values())

    def clear(self) -> None:
        with self._lock:
            self._entries.clear()


# ── persistence ──────────────────────────────────────────────────
# magic "MSPC", version u16, count u32, then per entry:
#   name u16+utf8, kind u8, entity checksum u64, dependency checksum u64,
#   verdict tag u8 (+ errors for Failed), duration u32. Little-endian.

_MAGIC = b"MSPC"
_VERSION = 1
_KIND_CODES = {EntityKind.FUNCTION_DEF: 0, EntityKind.METHOD_SPEC: 1,
               EntityKind.METHOD_BODY: 2}
_KINDS_BY_CODE = {v: k for k, v in _KIND_CODES.items()}
_VERDICT_CODES = {"Verified": 0, "Failed": 1, "Timeout": 2}


class CacheFileError(Exception):
    pass


def _pack_str(buf: bytearray, s: str) -> None:
    raw = s.encode("utf-8")
    buf += struct.pack("<H", len(raw))
    buf += raw


def _pack_span(buf: bytearray, span: Span) -> None:
    buf += struct.pack("<IIII", span.start_line, span.start_col,
                       span.end_line, span.end_col)


def _pack_error(buf: bytearray, error: VerificationError) -> None:
    _pack_str(buf, error.message)
    _pack_span(buf, error.error_span)
    buf += struct.pack("<H", len(error.related_spans))
    for span in error.related_spans:
        _pack_span(buf, span)
    states = error.trace.states
    buf += struct.pack("<I", len(states))
    for state in states:
        _pack_span(buf, state.location)
        buf += struct.pack("<H", len(state.bindings))
        for name, value in state.bindings:
            _pack_str(buf, name)
            if isinstance(value, bool):
                buf += struct.pack("<BB", 1, 1 if value else 0)
            elif isinstance(value, int):
                buf += struct.pack("<B", 0)
                buf += struct.pack("<q", value)
            else:
                buf += struct.pack("<BH", 2, len(value))
                for elem in value:
                    buf += struct.pack("<q", elem)


def save_cache(path: str | Path, entries: list[CacheEntry]) -> None:
    buf = bytearray()
    buf += _MAGIC
    buf += struct.pack("<H", _VERSION)
    buf += struct.pack("<I", len(entries))
    for entry in entries:
        _pack_str(buf, entry.entity_id.name)
        buf += struct.pack("<B", _KIND_CODES[entry.entity_id.kind])
        buf += struct.pack("<QQ", entry.entity_checksum, entry.dependency_checksum)
        buf += struct.pack("<B", _VERDICT_CODES[entry.verdict.kind])
        if entry.verdict.kind == "Failed":
            buf += struct.pack("<H", len(entry.verdict.errors))
            for error in entry.verdict.errors:
                _pack_error(buf, error)
        buf += struct.pack("<I", entry.duration_ms)
    Path(path).write_bytes(bytes(buf))


class _Reader:
    def __init__(self, data: bytes) -> None:
        self.data = data
        self.pos = 0

    def take(self, fmt: str) -> tuple:
        size = struct.calcsize(fmt)
        if self.pos + size > len(self.data):
            raise CacheFileError("truncated cache file")
        out = struct.unpack_from(fmt, self.data, self.pos)
        self.pos += size
        return out

    def string(self) -> str:
        (n,) = self.take("<H")
        raw = self.data[self.pos:self.pos + n]
        if len(raw) != n:
            raise CacheFileError("truncated cache file")
        self.pos += n
        return raw.decode("utf-8")

    def span(self) -> Span:
        a, b, c, d = self.take("<IIII")
        return Span(a, b, c, d)


def _read_error(r: _Reader) -> VerificationError:
    message = r.string()
    error_span = r.span()
    (n_related,) = r.take("<H")
    related = tuple(r.span() for _ in range(n_related))
    (n_states,) = r.take("<I")
    states = []
    for _ in range(n_states):
        location = r.span()
        (n_bind,) = r.take("<H")
        bindings = []
        for _ in range(n_bind):
            name = r.string()
            (tag,) = r.take("<B")
            if tag == 0:
                (value,) = r.take("<q")
            elif tag == 1:
                (raw,) = r.take("<B")
                value = bool(raw)
            elif tag == 2:
                (n_elems,) = r.take("<H")
                value = tuple(r.take("<q")[0] for _ in range(n_elems))
            else:
                raise CacheFileError(f"unknown value tag {tag}")
            bindings.append((name, value))
        states.append(TraceState(location, tuple(bindings)))
    return VerificationError(message, error_span, related,
                             CounterexampleTrace(tuple(states)))


def load_cache(path: str | Path) -> list[CacheEntry]:
    data = Path(path).read_bytes()
    r = _Reader(data)
    if data[:4] != _MAGIC:
        raise CacheFileError("not a cache file (bad magic)")
    r.pos = 4
    (version,) = r.take("<H")
    if version != _VERSION:
        raise CacheFileError(f"unsupported cache version {version}")
    (count,) = r.take("<I")
    entries: list[CacheEntry] = []
    for _ in range(count):
        name = r.string()
        (kind_code,) = r.take("<B")
        kind = _KINDS_BY_CODE.get(kind_code)
        if kind is None:
            raise CacheFileError(f"unknown entity kind {kind_code}")
        ec, dc = r.take("<QQ")
        (verdict_code,) = r.take("<B")
        if verdict_code == 0:
            verdict = VERIFIED
        elif verdict_code == 1:
            (n_errors,) = r.take("<H")
            verdict = Verdict("Failed", tuple(_read_error(r) for _ in range(n_errors)))
        elif verdict_code == 2:
            verdict = TIMEOUT
        else:
            raise CacheFileError(f"unknown verdict tag {verdict_code}")
        (duration_ms,) = r.take("<I")
        entries.append(CacheEntry(EntityId(name, kind), ec, dc, verdict,
                                  verified_at_snapshot=0,
                                  duration_ms=duration_ms))
    return entries
