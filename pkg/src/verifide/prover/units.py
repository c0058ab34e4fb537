"""Verification units: one checkable obligation per entity."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from ..lang.ast import Decl, EntityId, EntityKind, Program


class Obligation(Enum):
    FUNCTION_WF = "FunctionWF"
    METHOD_SPEC_WF = "MethodSpecWF"
    METHOD_BODY = "MethodBody"


_OBLIGATION_FOR_KIND = {
    EntityKind.FUNCTION_DEF: Obligation.FUNCTION_WF,
    EntityKind.METHOD_SPEC: Obligation.METHOD_SPEC_WF,
    EntityKind.METHOD_BODY: Obligation.METHOD_BODY,
}


@dataclass(frozen=True)
class VerificationUnit:
    entity_id: EntityId
    obligation: Obligation
    decl: Decl
    program: Program

    @property
    def unit_id(self) -> str:
        return f"{self.obligation.value} {self.entity_id.name}"


def obligation_for(kind: EntityKind) -> Obligation:
    return _OBLIGATION_FOR_KIND[kind]


def extract_units(program: Program) -> list[VerificationUnit]:
    """One unit per entity, in source order."""
    if not program.resolved:
        raise ValueError("extract_units expects a resolved program")
    units: list[VerificationUnit] = []
    for entity in program.entities:
        units.append(VerificationUnit(
            entity.id, obligation_for(entity.id.kind), entity.decl, program))
    return units


def effective_timeout_ms(decl: Decl, default_ms: int) -> int:
    """Per-entity timeout: a ``{:timeLimit n}`` attribute overrides, in seconds."""
    for attr in decl.attributes:
        if attr.name == "timeLimit" and attr.value is not None:
            return attr.value * 1000
    return default_ms
