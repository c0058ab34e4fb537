"""Scripted prover for timing and scheduling tests.

Verdicts and delays come from a script keyed by unit id (for example
``"MethodBody Foo"``). With ``real_sleep`` the prover actually sleeps, so
wall-clock measurements reflect the scripted workload; otherwise it returns
immediately and reports the scripted delay as a simulated duration, which
keeps replay reports bit-identical across runs.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Optional

from .bounds import Bounds
from .checker import CancelFn
from .units import VerificationUnit
from .verdict import (
    TIMEOUT, VERIFIED, CounterexampleTrace, TraceState, Verdict,
    VerificationError, failed,
)

_SLEEP_SLICE_S = 0.005


@dataclass(frozen=True)
class ScriptedUnit:
    delay_ms: int = 0
    verdict: str = "Verified"  # "Verified" | "Failed"


@dataclass
class ScriptedProver:
    units: dict[str, ScriptedUnit] = field(default_factory=dict)
    default: ScriptedUnit = ScriptedUnit()
    real_sleep: bool = False

    def entry_for(self, unit: VerificationUnit) -> ScriptedUnit:
        return self.units.get(unit.unit_id, self.default)

    def simulated_duration_ms(self, unit: VerificationUnit,
                              timeout_ms: int) -> Optional[int]:
        if self.real_sleep:
            return None
        return min(self.entry_for(unit).delay_ms, timeout_ms)

    def verify_unit(self, unit: VerificationUnit, bounds: Bounds,
                    timeout_ms: int,
                    cancel: Optional[CancelFn] = None) -> Optional[Verdict]:
        entry = self.entry_for(unit)
        timed_out = entry.delay_ms > timeout_ms
        wait_ms = min(entry.delay_ms, timeout_ms)
        if self.real_sleep:
            end = time.monotonic() + wait_ms / 1000.0
            while True:
                if cancel is not None and cancel():
                    return None
                remaining = end - time.monotonic()
                if remaining <= 0:
                    break
                time.sleep(min(_SLEEP_SLICE_S, remaining))
        elif cancel is not None and cancel():
            return None
        if timed_out:
            return TIMEOUT
        if entry.verdict == "Failed":
            span = unit.decl.name_span
            state = TraceState(span, ())
            return failed([VerificationError(
                "scripted failure", span, (), CounterexampleTrace((state,)))])
        return VERIFIED
