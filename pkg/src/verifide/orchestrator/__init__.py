"""Continuous-processing engine: debounce, prioritized runs, events, margins."""

from .clock import Clock, SystemClock, VirtualClock
from .config import Config, INLINE, MANUAL, THREADED, pool_size
from .engine import Engine, SnapshotRecord, UnitRecord, default_pipeline
from .events import (
    Event, EventLog, MarginsChanged, ResolutionDiagnostics, Resync,
    SnapshotAccepted, SnapshotVerified, UnitCompleted, UnitScheduled,
)
from .live import LiveDriver
from .margins import EDITED, IDLE, VERIFYING, MarginTracker

__all__ = [
    "Clock", "SystemClock", "VirtualClock",
    "Config", "INLINE", "MANUAL", "THREADED", "pool_size",
    "Engine", "SnapshotRecord", "UnitRecord", "default_pipeline",
    "Event", "EventLog", "MarginsChanged", "ResolutionDiagnostics", "Resync",
    "SnapshotAccepted", "SnapshotVerified", "UnitCompleted", "UnitScheduled",
    "LiveDriver",
    "EDITED", "IDLE", "VERIFYING", "MarginTracker",
]
