"""Verdicts, verification errors, and counterexample traces."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

from ..lang.tokens import Span

# Concrete runtime values as recorded in traces: ints, bools, or arrays
# rendered as element tuples.
Value = Union[int, bool, tuple[int, ...]]


@dataclass(frozen=True)
class TraceState:
    """One blue dot: a control-path location plus all in-scope bindings."""

    location: Span
    bindings: tuple[tuple[str, Value], ...]


@dataclass(frozen=True)
class CounterexampleTrace:
    """Path from routine entry to the failure; the last state is the error."""

    states: tuple[TraceState, ...]


@dataclass(frozen=True)
class VerificationError:
    message: str
    error_span: Span
    related_spans: tuple[Span, ...]
    trace: CounterexampleTrace


@dataclass(frozen=True)
class Verdict:
    kind: str  # "Verified" | "Failed" | "Timeout"
    errors: tuple[VerificationError, ...] = field(default=())

    def __post_init__(self) -> None:
        if self.kind == "Failed" and not self.errors:
            raise ValueError("a Failed verdict carries at least one error")

    @property
    def is_verified(self) -> bool:
        return self.kind == "Verified"


VERIFIED = Verdict("Verified")
TIMEOUT = Verdict("Timeout")


def failed(errors: list[VerificationError]) -> Verdict:
    return Verdict("Failed", tuple(errors))


def render_value(value: object) -> Value:
    """Snapshot a runtime value for a trace binding."""
    if isinstance(value, bool):
        return value
    if isinstance(value, int):
        return value
    elems = getattr(value, "elems", None)
    if elems is not None:
        return tuple(elems)
    raise TypeError(f"not a runtime value: {value!r}")
