"""Bounded modular verifier and the whole-program concrete oracle."""

from .bounds import ArrayValue, Bounds, DEFAULT_BOUNDS, input_tuples
from .checker import BoundedProver, DEFAULT_ERROR_CAP
from .concrete import Outcome, execute_concrete, satisfies_requires
from .scripted import ScriptedProver, ScriptedUnit
from .units import (
    Obligation, VerificationUnit, effective_timeout_ms, extract_units,
    obligation_for,
)
from .verdict import (
    TIMEOUT, VERIFIED, CounterexampleTrace, TraceState, Value, Verdict,
    VerificationError, failed, render_value,
)

__all__ = [
    "ArrayValue", "Bounds", "DEFAULT_BOUNDS", "input_tuples",
    "BoundedProver", "DEFAULT_ERROR_CAP",
    "Outcome", "execute_concrete", "satisfies_requires",
    "ScriptedProver", "ScriptedUnit",
    "Obligation", "VerificationUnit", "effective_timeout_ms",
    "extract_units", "obligation_for",
    "TIMEOUT", "VERIFIED", "CounterexampleTrace", "TraceState", "Value",
    "Verdict", "VerificationError", "failed", "render_value",
]
