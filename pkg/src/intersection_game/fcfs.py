"""First-come-first-serve allocation of the intersection."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

from .time_grid import GridTime, TimeGrid, format_ticks

HALF = Fraction(1, 2)


class MalformedReport(ValueError):
    """A report is not a member of the reporting grid."""


@dataclass(frozen=True)
class AgentProfile:
    earliest: GridTime
    desired: GridTime

    def __post_init__(self) -> None:
        object.__setattr__(self, "earliest", GridTime(self.earliest))
        object.__setattr__(self, "desired", GridTime(self.desired))
        if self.earliest > self.desired:
            raise ValueError("earliest passing time is after the desired time")


@dataclass(frozen=True)
class Scenario:
    """One two-agent game instance.  ``crossing`` is in half-ticks."""

    grid: TimeGrid
    crossing: GridTime
    agent1: AgentProfile
    agent2: AgentProfile

    def __post_init__(self) -> None:
        object.__setattr__(self, "crossing", GridTime(self.crossing))
        if self.crossing <= 0:
            raise ValueError("crossing duration must be positive")
        if self.crossing % 4:
            raise ValueError("half the crossing duration must be a whole tick")
        for k, prof in enumerate(self.profiles, start=1):
            if not (self.grid.contains(prof.earliest) and self.grid.contains(prof.desired)):
                raise ValueError(f"agent {k} profile is not on the grid")

    @classmethod
    def from_ticks(cls, dt: int, e: tuple[int, int], d: tuple[int, int],
                   lower: int = 0, upper: int = 20, delta: int | Fraction = 1) -> Scenario:
        """Convenience constructor with every time given in ticks."""
        return cls(
            TimeGrid.from_ticks(lower, upper, delta),
            GridTime.ticks(dt),
            AgentProfile(GridTime.ticks(e[0]), GridTime.ticks(d[0])),
            AgentProfile(GridTime.ticks(e[1]), GridTime.ticks(d[1])),
        )

    @property
    def profiles(self) -> tuple[AgentProfile, AgentProfile]:
        return (self.agent1, self.agent2)

    def profile(self, agent: int) -> AgentProfile:
        if agent not in (1, 2):
            raise ValueError("agent index must be 1 or 2")
        return self.agent1 if agent == 1 else self.agent2

    @property
    def gap(self) -> GridTime:
        """Minimum FCFS spacing between the two passes (crossing plus a tick)."""
        return self.crossing + 2

    @property
    def half_crossing(self) -> GridTime:
        return GridTime(self.crossing // 2)

    def swapped(self) -> Scenario:
        return Scenario(self.grid, self.crossing, self.agent2, self.agent1)

    def with_profile(self, agent: int, profile: AgentProfile) -> Scenario:
        if agent == 1:
            return Scenario(self.grid, self.crossing, profile, self.agent2)
        return Scenario(self.grid, self.crossing, self.agent1, profile)

    def describe(self) -> str:
        a, b = self.agent1, self.agent2
        g = self.grid
        return (f"grid=[{format_ticks(g.lower)},{format_ticks(g.upper)}] delta={g.delta} "
                f"dt={format_ticks(self.crossing)} e=({format_ticks(a.earliest)},"
                f"{format_ticks(b.earliest)}) d=({format_ticks(a.desired)},"
                f"{format_ticks(b.desired)})")


@dataclass(frozen=True, order=True)
class ReportPair:
    report1: GridTime
    report2: GridTime

    def __post_init__(self) -> None:
        object.__setattr__(self, "report1", GridTime(self.report1))
        object.__setattr__(self, "report2", GridTime(self.report2))

    def __iter__(self) -> Iterator[GridTime]:
        return iter((self.report1, self.report2))

    def __getitem__(self, agent: int) -> GridTime:
        return (self.report1, self.report2)[agent - 1]

    def __str__(self) -> str:
        return f"({format_ticks(self.report1)},{format_ticks(self.report2)})"


@dataclass(frozen=True, order=True)
class Allocation:
    t1: GridTime
    t2: GridTime

    def __post_init__(self) -> None:
        object.__setattr__(self, "t1", GridTime(self.t1))
        object.__setattr__(self, "t2", GridTime(self.t2))

    def __iter__(self) -> Iterator[GridTime]:
        return iter((self.t1, self.t2))

    def __getitem__(self, agent: int) -> GridTime:
        return (self.t1, self.t2)[agent - 1]

    @property
    def first(self) -> int:
        """Index of the agent passing first (1 on equal times)."""
        return 1 if self.t1 <= self.t2 else 2

    def mirrored(self) -> Allocation:
        return Allocation(self.t2, self.t1)

    def shifted(self, by: int) -> Allocation:
        return Allocation(self.t1 + by, self.t2 + by)

    def __str__(self) -> str:
        return f"({format_ticks(self.t1)},{format_ticks(self.t2)})"


@dataclass(frozen=True)
class AllocationLottery:
    """Probability-weighted allocations; one branch, or two fair-coin branches."""

    branches: tuple[tuple[Fraction, Allocation], ...]

    def __post_init__(self) -> None:
        branches = tuple(sorted((Fraction(p), a) for p, a in self.branches))
        merged: dict[Allocation, Fraction] = {}
        for p, a in branches:
            merged[a] = merged.get(a, Fraction(0)) + p
        branches = tuple(sorted(((p, a) for a, p in merged.items()), key=lambda b: b[1]))
        if sum(p for p, _ in branches) != 1:
            raise ValueError("lottery probabilities must sum to one")
        if any(p <= 0 for p, _ in branches):
            raise ValueError("lottery probabilities must be positive")
        object.__setattr__(self, "branches", branches)

    @classmethod
    def certain(cls, allocation: Allocation) -> AllocationLottery:
        return cls(((Fraction(1), allocation),))

    @classmethod
    def coin(cls, a: Allocation, b: Allocation) -> AllocationLottery:
        return cls(((HALF, a), (HALF, b)))

    @property
    def is_deterministic(self) -> bool:
        return len(self.branches) == 1

    @property
    def allocations(self) -> tuple[Allocation, ...]:
        return tuple(a for _, a in self.branches)

    def only(self) -> Allocation:
        if not self.is_deterministic:
            raise ValueError("lottery has more than one branch")
        return self.branches[0][1]

    def __iter__(self) -> Iterator[tuple[Fraction, Allocation]]:
        return iter(self.branches)

    def __str__(self) -> str:
        if self.is_deterministic:
            return str(self.branches[0][1])
        return "|".join(f"{p}:{a}" for p, a in self.branches)


def _check_report(grid: TimeGrid, t: int, agent: int) -> None:
    if not grid.contains(t):
        raise MalformedReport(f"agent {agent} report {format_ticks(t)} is not on the grid")


def fcfs_allocate(scenario: Scenario, reports: ReportPair) -> AllocationLottery:
    """Allocate passing times for a pair of reports.

    The earlier reporter passes exactly at its report; the other passes at its
    report or one crossing plus one tick later, whichever is later.  Equal
    reports are resolved by a fair coin.  Allocations may exceed the grid.
    """
    r1, r2 = reports
    _check_report(scenario.grid, r1, 1)
    _check_report(scenario.grid, r2, 2)
    gap = scenario.gap
    if r1 < r2:
        return AllocationLottery.certain(Allocation(r1, max(r2, r1 + gap)))
    if r2 < r1:
        return AllocationLottery.certain(Allocation(max(r1, r2 + gap), r2))
    return AllocationLottery.coin(Allocation(r1, r1 + gap), Allocation(r1 + gap, r1))


def is_feasible(scenario: Scenario, allocation: Allocation) -> bool:
    return (allocation.t1 >= scenario.agent1.earliest
            and allocation.t2 >= scenario.agent2.earliest)


def lottery_is_feasible(scenario: Scenario, lottery: AllocationLottery) -> bool:
    return all(is_feasible(scenario, a) for a in lottery.allocations)


def agent_can_meet(scenario: Scenario, lottery: AllocationLottery, agent: int) -> bool:
    """True when every branch schedules ``agent`` no earlier than its earliest time."""
    earliest = scenario.profile(agent).earliest
    return all(a[agent] >= earliest for a in lottery.allocations)
