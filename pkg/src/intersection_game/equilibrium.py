"""Pure Nash equilibria of the reporting game.

Two independent routes are provided: a brute-force oracle over all report
pairs, and closed-form equilibrium sets dispatched on the case classifier.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator, Optional

import numpy as np

from .fcfs import ReportPair, Scenario, agent_can_meet, fcfs_allocate
from .payoff import QUADRATIC, CostModel, CostValue, expected_agent_cost, social_cost
from .report import Discrepancy, DiscrepancyReport
from .time_grid import GridTime, TimeGrid, format_ticks


class OverConstrained(RuntimeError):
    """No admissible report exists for an agent."""


class CaseKind(enum.Enum):
    NO_CONFLICT = "NoConflict"
    LEMMA1 = "Lemma1"
    LEMMA2 = "Lemma2"
    LEMMA3 = "Lemma3"
    LEMMA4_FORMER = "Lemma4Former"
    LEMMA4_LATTER = "Lemma4Latter"
    LEMMA5 = "Lemma5"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class CaseLabel:
    """Case of a scenario, plus which physical agent plays the earlier role ``i``."""

    kind: CaseKind
    i: int
    predicates: tuple[str, ...] = field(default=(), compare=False)

    @property
    def j(self) -> int:
        return 3 - self.i

    def __str__(self) -> str:
        return self.kind.value


def roles(scenario: Scenario) -> tuple[int, int]:
    """Agent indices (i, j): i desires earlier; on equal desires, i is earlier-feasible.

    Full ties keep agent 1 in role i.
    """
    a, b = scenario.agent1, scenario.agent2
    if a.desired == b.desired:
        i = 1 if a.earliest <= b.earliest else 2
    else:
        i = 1 if a.desired < b.desired else 2
    return i, 3 - i


def classify(scenario: Scenario) -> CaseLabel:
    i, j = roles(scenario)
    pi, pj = scenario.profile(i), scenario.profile(j)
    ei, di, ej, dj = pi.earliest, pi.desired, pj.earliest, pj.desired
    dt, h = scenario.crossing, scenario.half_crossing

    if di + dt < dj:
        return CaseLabel(CaseKind.NO_CONFLICT, i, ("d_i + dt < d_j",))
    if di == dj:
        return CaseLabel(CaseKind.LEMMA1, i, ("d_i = d_j", "e_i <= e_j"))
    fired = ["d_i < d_j <= d_i + dt"]
    if ej > di:
        return CaseLabel(CaseKind.LEMMA5, i, (*fired, "e_i <= d_i < e_j <= d_j"))
    fired.append("e_i, e_j <= d_i")
    if di < dj - h:
        return CaseLabel(CaseKind.LEMMA2, i, (*fired, "d_j - dt <= d_i < d_j - dt/2"))
    fired.append("d_i >= d_j - dt/2")
    if ei <= ej:
        return CaseLabel(CaseKind.LEMMA3, i, (*fired, "e_i <= e_j"))
    fired.append("e_j < e_i")
    if ei <= dj - h:
        return CaseLabel(CaseKind.LEMMA4_FORMER, i, (*fired, "e_i <= d_j - dt/2"))
    return CaseLabel(CaseKind.LEMMA4_LATTER, i, (*fired, "d_j - dt/2 < e_i"))


@dataclass(frozen=True)
class EquilibriumSet:
    """Report pairs that are (claimed to be) pure equilibria.

    ``off_grid`` keeps raw pairs a closed form produced outside the report grid;
    they cannot be played and are never members.
    """

    pairs: frozenset[ReportPair]
    provenance: str
    off_grid: frozenset[tuple[int, int]] = frozenset()

    def __iter__(self) -> Iterator[ReportPair]:
        return iter(sorted(self.pairs))

    def __len__(self) -> int:
        return len(self.pairs)

    def __contains__(self, pair: object) -> bool:
        return pair in self.pairs

    def __str__(self) -> str:
        return "{" + ", ".join(str(p) for p in self) + "}"


# -- scalar route ------------------------------------------------------------

def admissible(scenario: Scenario, agent_index: int, own_report: int,
               opponent_report: int) -> bool:
    """Every FCFS branch schedules the acting agent no earlier than its earliest time."""
    pair = (ReportPair(own_report, opponent_report) if agent_index == 1
            else ReportPair(opponent_report, own_report))
    return agent_can_meet(scenario, fcfs_allocate(scenario, pair), agent_index)


def _own_cost(scenario: Scenario, model: CostModel, agent_index: int, own: int,
              opponent: int) -> Optional[CostValue]:
    pair = ReportPair(own, opponent) if agent_index == 1 else ReportPair(opponent, own)
    lottery = fcfs_allocate(scenario, pair)
    if not agent_can_meet(scenario, lottery, agent_index):
        return None
    return expected_agent_cost(model, lottery, scenario.profile(agent_index), agent_index,
                               scenario.grid.delta)


def best_responses(scenario: Scenario, model: CostModel, agent_index: int,
                   opponent_report: int) -> frozenset[GridTime]:
    costs = {}
    for own in scenario.grid:
        c = _own_cost(scenario, model, agent_index, own, opponent_report)
        if c is not None:
            costs[own] = c
    if not costs:
        raise OverConstrained(f"agent {agent_index} has no admissible report against "
                              f"{format_ticks(opponent_report)}")
    best = min(costs.values())
    return frozenset(t for t, c in costs.items() if c == best)


def deviation_witness(scenario: Scenario, model: CostModel,
                      pair: ReportPair) -> Optional[str]:
    """Why ``pair`` is not an equilibrium, or None if no agent can profit."""
    for k in (1, 2):
        own, opp = pair[k], pair[3 - k]
        current = _own_cost(scenario, model, k, own, opp)
        if current is None:
            return f"agent {k} cannot meet its allocation (before earliest time)"
        for alt in scenario.grid:
            c = _own_cost(scenario, model, k, alt, opp)
            if c is not None and c < current:
                return (f"agent {k} deviates {format_ticks(own)}->{format_ticks(alt)} "
                        f"cost {c} < {current}")
    return None


def is_equilibrium(scenario: Scenario, model: CostModel, pair: ReportPair) -> bool:
    return deviation_witness(scenario, model, pair) is None


# -- vectorised oracle -------------------------------------------------------

@lru_cache(maxsize=64)
def _branch_tables(grid: TimeGrid, gap: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """FCFS branches for every report pair: arrays t1[b, a1, a2], t2[b, a1, a2].

    Deterministic outcomes are stored twice so that the sum over both branches is
    twice the expected value.
    """
    r = np.arange(int(grid.lower), int(grid.upper) + 1, 2, dtype=np.int64)
    r1 = r[:, None] * np.ones_like(r)[None, :]
    r2 = r[None, :] * np.ones_like(r)[:, None]
    t1 = np.where(r1 < r2, r1, np.maximum(r1, r2 + gap))
    t2 = np.where(r2 < r1, r2, np.maximum(r2, r1 + gap))
    tie = r1 == r2
    t1_b = np.stack([np.where(tie, r1, t1), np.where(tie, r1 + gap, t1)])
    t2_b = np.stack([np.where(tie, r1 + gap, t2), np.where(tie, r1, t2)])
    for arr in (t1_b, t2_b):
        arr.setflags(write=False)
    return r, t1_b, t2_b


@dataclass(frozen=True)
class GameTable:
    """Doubled expected costs and admissibility masks over all report pairs."""

    reports: np.ndarray
    cost1: np.ndarray
    cost2: np.ndarray
    adm1: np.ndarray
    adm2: np.ndarray

    def equilibrium_mask(self) -> np.ndarray:
        big = np.iinfo(np.int64).max if self.cost1.dtype.kind == "i" else np.inf
        c1 = np.where(self.adm1, self.cost1, big)
        c2 = np.where(self.adm2, self.cost2, big)
        best1 = c1.min(axis=0, keepdims=True)
        best2 = c2.min(axis=1, keepdims=True)
        if not (np.all(self.adm1.any(axis=0)) and np.all(self.adm2.any(axis=1))):
            raise OverConstrained("some opponent report leaves an agent no admissible reply")
        return self.adm1 & self.adm2 & (c1 == best1) & (c2 == best2)


def game_table(scenario: Scenario, model: CostModel) -> GameTable:
    r, t1, t2 = _branch_tables(scenario.grid, int(scenario.gap))
    a, b = scenario.agent1, scenario.agent2
    cost1 = model.scaled(t1 - int(a.desired)).sum(axis=0)
    cost2 = model.scaled(t2 - int(b.desired)).sum(axis=0)
    adm1 = (t1 >= int(a.earliest)).all(axis=0)
    adm2 = (t2 >= int(b.earliest)).all(axis=0)
    return GameTable(r, cost1, cost2, adm1, adm2)


def nash_oracle(scenario: Scenario, model: CostModel = QUADRATIC) -> EquilibriumSet:
    """All pure equilibria by exhaustive search over the report grid."""
    table = game_table(scenario, model)
    idx1, idx2 = np.nonzero(table.equilibrium_mask())
    r = table.reports
    pairs = frozenset(ReportPair(GridTime(int(r[x])), GridTime(int(r[y])))
                      for x, y in zip(idx1, idx2))
    return EquilibriumSet(pairs, "oracle")


# -- closed forms ------------------------------------------------------------

def _ascending(lo: int, hi: int, shift: int, second_first: bool = False) -> list[tuple[int, int]]:
    """Pairs (theta, theta + shift) for whole-tick theta in [lo, hi)."""
    pairs = [(t, t + shift) for t in range(int(lo), int(hi), 2)]
    return [(b, a) for a, b in pairs] if second_first else pairs


def closed_form_equilibria(scenario: Scenario) -> EquilibriumSet:
    """Materialise the equilibrium set claimed for the scenario's case."""
    label = classify(scenario)
    pi, pj = scenario.profile(label.i), scenario.profile(label.j)
    ei, di, ej, dj = (int(pi.earliest), int(pi.desired), int(pj.earliest), int(pj.desired))
    dt, h, tk = int(scenario.crossing), int(scenario.half_crossing), 2
    kind = label.kind

    def interval_or_tie(lo: int, hi: int, tie: int) -> list[tuple[int, int]]:
        return _ascending(lo, hi, tk) or [(tie, tie)]

    # pairs are (report of i, report of j)
    if kind is CaseKind.NO_CONFLICT:
        raw = [(di, dj)]
    elif kind is CaseKind.LEMMA1:
        upper = max(ej, di - h)
        raw = interval_or_tie(max(ei, di - h), upper, upper)
    elif kind is CaseKind.LEMMA2:
        raw = _ascending(max(dj - dt, ei), di, tk)
        raw += [(di, r) for r in range(di + tk, di + dt + tk + 1, tk)]
    elif kind is CaseKind.LEMMA3:
        upper = max(dj - h, ej)
        raw = interval_or_tie(max(ei, di - h), upper, upper)
    elif kind is CaseKind.LEMMA4_FORMER:
        raw = interval_or_tie(max(ei, di - h), dj - h, dj - h)
    elif kind is CaseKind.LEMMA4_LATTER:
        # agent j passes first: pairs (theta + tick, theta)
        raw = _ascending(max(dj - h, ej), ei, tk, second_first=True) or [(ei, ei)]
    else:
        upper = min(dj - h, di)
        raw = interval_or_tie(max(dj - dt, di - h, ei), upper, upper)

    if label.i == 2:
        raw = [(b, a) for a, b in raw]
    grid = scenario.grid
    on = frozenset(ReportPair(GridTime(a), GridTime(b)) for a, b in raw
                   if grid.contains(a) and grid.contains(b))
    # families that run past a grid bound are truncated; a claim left with no
    # reportable pair at all is kept so it can be reported as unplayable
    off = frozenset() if on else frozenset(
        (a, b) for a, b in raw if not (grid.contains(a) and grid.contains(b)))
    return EquilibriumSet(on, "closed_form", off)


def verify_soundness(scenario: Scenario, model: CostModel = QUADRATIC,
                     oracle: Optional[EquilibriumSet] = None,
                     closed: Optional[EquilibriumSet] = None) -> DiscrepancyReport:
    """Diff the closed-form set against the oracle.

    Closed-form pairs missing from the oracle (or produced off the grid) are
    discrepancies; oracle pairs missing from the closed form are notes only.
    """
    label = classify(scenario)
    oracle = nash_oracle(scenario, model) if oracle is None else oracle
    closed = closed_form_equilibria(scenario) if closed is None else closed
    report = DiscrepancyReport(scenario, str(label), oracle_empty=len(oracle) == 0)

    def cost_of(pair: ReportPair) -> CostValue:
        return social_cost(model, fcfs_allocate(scenario, pair), scenario)

    for pair in closed:
        if pair not in oracle:
            report.rows.append(Discrepancy(
                "lemma-soundness", scenario, str(label), str(pair), "not an equilibrium",
                cost_of(pair), None,
                f"{model.name}: {deviation_witness(scenario, model, pair)}"))
    for a, b in sorted(closed.off_grid):
        report.rows.append(Discrepancy(
            "lemma-soundness", scenario, str(label),
            f"({format_ticks(a)},{format_ticks(b)})", "report off the grid",
            detail=f"{model.name}: claimed pair is not reportable"))
    for pair in oracle:
        if pair not in closed:
            report.notes.append(Discrepancy(
                "completeness", scenario, str(label), "absent", str(pair),
                None, cost_of(pair), model.name))
    return report
