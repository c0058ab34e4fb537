"""Real-time driver: fires the engine's debounce from a timer thread."""

from __future__ import annotations

import threading
from typing import Optional

from .clock import Clock, SystemClock
from .engine import Engine


class LiveDriver:
    """Owns the debounce timer for an engine fed by live edits."""

    def __init__(self, engine: Engine, clock: Optional[Clock] = None) -> None:
        self.engine = engine
        self.clock = clock or SystemClock()
        self._timer: Optional[threading.Timer] = None
        self._lock = threading.Lock()

    def submit(self, text: str, edited_lines: set[int],
               at_ms: Optional[int] = None) -> int:
        # live edits are clocked at receipt: client timestamps may be on a
        # different clock (wall time vs the server's monotonic origin), and
        # the debounce must fire debounce_ms from NOW either way
        del at_ms
        now = max(self.clock.now_ms(), self.engine.last_submit_ms or 0)
        snapshot_id = self.engine.submit_text(text, edited_lines, now)
        self._arm(float(self.engine.config.debounce_ms))
        return snapshot_id

    def _arm(self, delay_ms: float) -> None:
        with self._lock:
            if self._timer is not None:
                self._timer.cancel()
            self._timer = threading.Timer(max(0.0, delay_ms) / 1000.0, self._fire)
            self._timer.daemon = True
            self._timer.start()

    def _fire(self) -> None:
        with self._lock:
            self._timer = None
        self.engine.on_debounce_expired()

    def close(self) -> None:
        with self._lock:
            if self._timer is not None:
                self._timer.cancel()
                self._timer = None
        self.engine.close()
