"""Finite input domains for bounded exhaustive checking."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator

from ..lang.ast import Param, Type


@dataclass(frozen=True)
class Bounds:
    int_low: int = -3
    int_high: int = 3
    max_array_len: int = 3
    max_steps: int = 10_000

    def __post_init__(self) -> None:
        if self.int_low > self.int_high:
            raise ValueError("int_low must not exceed int_high")
        if self.max_array_len < 0:
            raise ValueError("max_array_len must be non-negative")
        if self.max_steps <= 0:
            raise ValueError("max_steps must be positive")

    @property
    def int_range(self) -> range:
        return range(self.int_low, self.int_high + 1)


DEFAULT_BOUNDS = Bounds()


class ArrayValue:
    """Mutable int array; identity matters (aliasing at call sites)."""

    __slots__ = ("elems",)

    def __init__(self, elems: list[int]) -> None:
        self.elems = elems

    def snapshot(self) -> "ArrayValue":
        return ArrayValue(list(self.elems))

    def __repr__(self) -> str:
        return f"ArrayValue({self.elems!r})"


def scalar_domain(ty: Type, bounds: Bounds) -> tuple:
    if ty == Type.INT:
        return tuple(bounds.int_range)
    if ty == Type.BOOL:
        return (False, True)
    raise ValueError(f"{ty} is not a scalar type")


def array_contents_domain(length: int, bounds: Bounds) -> Iterator[tuple[int, ...]]:
    return itertools.product(bounds.int_range, repeat=length)


def input_tuples(params: tuple[Param, ...], bounds: Bounds) -> Iterator[tuple]:
    """All argument tuples over the bounded domains, ascending.

    Array-typed arguments are freshly allocated per tuple so callers may
    mutate them freely.
    """
    specs: list[tuple] = []
    for p in params:
        if p.type == Type.ARRAY_INT:
            shapes = [("array", contents)
                      for length in range(bounds.max_array_len + 1)
                      for contents in array_contents_domain(length, bounds)]
            specs.append(tuple(shapes))
        else:
            specs.append(tuple(("scalar", v) for v in scalar_domain(p.type, bounds)))
    for combo in itertools.product(*specs):
        yield tuple(ArrayValue(list(payload)) if tag == "array" else payload
                    for tag, payload in combo)


def default_decreases_values(params: tuple[Param, ...], args: tuple) -> tuple[int, ...]:
    """The implicit termination measure: int parameters in declaration order."""
    return tuple(v for p, v in zip(params, args) if p.type == Type.INT)
