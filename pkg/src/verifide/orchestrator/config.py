"""Engine configuration."""

from __future__ import annotations

import os
from dataclasses import dataclass, field

from ..prover.bounds import Bounds
from ..prover.checker import DEFAULT_ERROR_CAP

DEFAULT_DEBOUNCE_MS = 500
DEFAULT_TIMEOUT_MS = 10_000

INLINE = "inline"      # units run synchronously inside the intake call
MANUAL = "manual"      # units wait until the caller pumps them (tests)
THREADED = "threaded"  # units run on a dynamically sized worker pool


def detected_workers() -> int:
    return os.cpu_count() or 1


@dataclass
class Config:
    debounce_ms: int = DEFAULT_DEBOUNCE_MS
    max_workers: int = field(default_factory=detected_workers)
    timeout_ms: int = DEFAULT_TIMEOUT_MS
    bounds: Bounds = field(default_factory=Bounds)
    cache_capacity: int = 4096
    prover_kind: str = "bounded"  # "bounded" | "scripted"
    execution: str = THREADED
    error_cap: int = DEFAULT_ERROR_CAP

    def __post_init__(self) -> None:
        if self.debounce_ms < 0:
            raise ValueError("debounce_ms must be non-negative")
        if self.max_workers < 1:
            raise ValueError("max_workers must be at least 1")
        if self.execution not in (INLINE, MANUAL, THREADED):
            raise ValueError(f"unknown execution mode {self.execution}")


def pool_size(max_workers: int, pending_units: int) -> int:
    """Workers to keep alive for this many pending units."""
    if pending_units < 0:
        raise ValueError("pending_units must be non-negative")
    return min(max_workers, pending_units)
