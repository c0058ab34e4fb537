"""Per-line progress margins.

A line is "edited" (dark orange) while its snapshot has not been handed to
the verifier, and "verifying" (violet) while the snapshot being processed
contains its edit. Lines go idle when their run's snapshot is verified.
A line edited again while an older edit is being verified shows as
"edited": the newer pending change wins.
"""

from __future__ import annotations

EDITED = "edited"
VERIFYING = "verifying"
IDLE = "idle"


class MarginTracker:
    def __init__(self) -> None:
        self._pending: dict[int, set[int]] = {}  # snapshot id -> edited lines
        self._verifying: set[int] = set()

    def edit(self, snapshot_id: int, lines: set[int]) -> bool:
        if not lines:
            return False
        self._pending.setdefault(snapshot_id, set()).update(lines)
        return True

    def start_run(self, snapshot_id: int) -> bool:
        """Edits up to and including this snapshot are now being verified."""
        moved = False
        for sid in sorted(self._pending):
            if sid > snapshot_id:
                break
            self._verifying |= self._pending.pop(sid)
            moved = True
        return moved

    def finish_run(self) -> bool:
        had = bool(self._verifying)
        self._verifying.clear()
        return had

    def states(self) -> dict[int, str]:
        """Non-idle lines only; every unlisted line is idle."""
        out: dict[int, str] = {line: VERIFYING for line in self._verifying}
        for lines in self._pending.values():
            for line in lines:
                out[line] = EDITED
        return out
