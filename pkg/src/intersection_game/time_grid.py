"""Exact time arithmetic on the reporting grid.

Every time in the package is an integer count of half-ticks.  One tick (the
reporting resolution) is two half-ticks, so offsets such as half a crossing
duration or half a tick stay exact.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator


class GridTime(int):
    """A signed time measured in half-ticks.

    Behaves like an ``int`` (hashing, ordering, ``min``/``max``), but sums and
    differences stay ``GridTime`` and the repr shows ticks.
    """

    __slots__ = ()

    @classmethod
    def ticks(cls, n: int | Fraction) -> GridTime:
        doubled = Fraction(n) * 2
        if doubled.denominator != 1:
            raise ValueError(f"{n} ticks is not a multiple of half a tick")
        return cls(int(doubled))

    @property
    def half_ticks(self) -> int:
        return int(self)

    @property
    def in_ticks(self) -> Fraction:
        return Fraction(int(self), 2)

    @property
    def is_whole_tick(self) -> bool:
        return int(self) % 2 == 0

    def __add__(self, other: int) -> GridTime:
        return GridTime(int(self) + int(other))

    __radd__ = __add__

    def __sub__(self, other: int) -> GridTime:
        return GridTime(int(self) - int(other))

    def __rsub__(self, other: int) -> GridTime:
        return GridTime(int(other) - int(self))

    def __neg__(self) -> GridTime:
        return GridTime(-int(self))

    def __abs__(self) -> GridTime:
        return GridTime(abs(int(self)))

    def __repr__(self) -> str:
        return f"GridTime({format_ticks(self)})"

    __str__ = __repr__


def tick(n: int | Fraction) -> GridTime:
    """Shorthand for :meth:`GridTime.ticks`."""
    return GridTime.ticks(n)


def format_ticks(t: int) -> str:
    """Render a half-tick count in ticks, e.g. ``7``, ``-3``, ``7+1/2``."""
    whole, rem = divmod(int(t), 2)
    if rem == 0:
        return str(whole)
    # divmod floors, so -3 half-ticks is -2 ticks plus one half
    return f"{whole}+1/2"


def midpoint(a: int, b: int) -> GridTime:
    """Exact midpoint of two grid-aligned times; may land on a half-tick.

    Both inputs must be whole ticks (even half-tick counts), which is always the
    case for reports and profile times.
    """
    total = int(a) + int(b)
    if total % 2:
        raise ValueError("midpoint of a half-tick is not representable")
    return GridTime(total // 2)


@dataclass(frozen=True)
class TimeGrid:
    """The finite, totally ordered set of reportable times.

    ``delta`` is the duration of one tick in abstract time units; it only scales
    costs.  ``lower`` and ``upper`` are whole-tick bounds.
    """

    delta: Fraction
    lower: GridTime
    upper: GridTime

    def __post_init__(self) -> None:
        object.__setattr__(self, "delta", Fraction(self.delta))
        object.__setattr__(self, "lower", GridTime(self.lower))
        object.__setattr__(self, "upper", GridTime(self.upper))
        if self.delta <= 0:
            raise ValueError("tick duration must be positive")
        if not (self.lower.is_whole_tick and self.upper.is_whole_tick):
            raise ValueError("grid bounds must lie on whole ticks")
        if self.lower > self.upper:
            raise ValueError("grid lower bound exceeds upper bound")

    @classmethod
    def from_ticks(cls, lower: int, upper: int, delta: int | Fraction = 1) -> TimeGrid:
        return cls(Fraction(delta), GridTime.ticks(lower), GridTime.ticks(upper))

    @classmethod
    def from_values(cls, delta: int | Fraction, lower: int | Fraction,
                    upper: int | Fraction) -> TimeGrid:
        """Build a grid from bounds in abstract time units (multiples of delta)."""
        delta = Fraction(delta)
        return cls(delta, GridTime.ticks(Fraction(lower) / delta),
                   GridTime.ticks(Fraction(upper) / delta))

    def contains(self, t: int) -> bool:
        return int(t) % 2 == 0 and self.lower <= t <= self.upper

    def __contains__(self, t: int) -> bool:
        return self.contains(t)

    def enumerate(self) -> list[GridTime]:
        return [GridTime(h) for h in range(self.lower, self.upper + 1, 2)]

    def __iter__(self) -> Iterator[GridTime]:
        return iter(self.enumerate())

    def __len__(self) -> int:
        return (self.upper - self.lower) // 2 + 1

    def index(self, t: int) -> int:
        if not self.contains(t):
            raise ValueError(f"{format_ticks(t)} is not on the grid")
        return (int(t) - self.lower) // 2

    def value(self, t: int) -> Fraction:
        """Time ``t`` in abstract time units."""
        return Fraction(int(t), 2) * self.delta

    @property
    def tick_size(self) -> GridTime:
        return GridTime(2)


def contains(grid: TimeGrid, t: int) -> bool:
    return grid.contains(t)


def enumerate_grid(grid: TimeGrid) -> list[GridTime]:
    return grid.enumerate()
