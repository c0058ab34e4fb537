"""Millisecond clocks; the virtual one makes timing tests deterministic."""

from __future__ import annotations

import time
from typing import Protocol


class Clock(Protocol):
    def now_ms(self) -> int: ...


class SystemClock:
    def __init__(self) -> None:
        self._origin = time.monotonic()

    def now_ms(self) -> int:
        return int((time.monotonic() - self._origin) * 1000)


class VirtualClock:
    """Manually advanced clock (never moves on its own)."""

    def __init__(self, start_ms: int = 0) -> None:
        self._now = start_ms

    def now_ms(self) -> int:
        return self._now

    def advance(self, delta_ms: int) -> int:
        if delta_ms < 0:
            raise ValueError("the clock is monotonic")
        self._now += delta_ms
        return self._now

    def advance_to(self, now_ms: int) -> int:
        if now_ms < self._now:
            raise ValueError("the clock is monotonic")
        self._now = now_ms
        return self._now
