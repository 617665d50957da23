"""The direct mechanism that reports on the agents' behalf, and a strategy-proofness checker.

The mechanism exists in two independent forms that are compared, never merged:
a row-by-row transcription of the published report table (``table1``) and a
search over the brute-force equilibrium set (``oracle``).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterator, Optional

from .equilibrium import CaseKind, CaseLabel, EquilibriumSet, classify, nash_oracle, roles
from .fcfs import (HALF, AgentProfile, AllocationLottery, ReportPair, Scenario,
                   agent_can_meet, fcfs_allocate)
from .payoff import QUADRATIC, CostModel, CostValue, expected_agent_cost, social_cost
from .report import Discrepancy, DiscrepancyReport
from .social import select_social_equilibrium
from .time_grid import GridTime, format_ticks

TABLE1 = "table1"
ORACLE = "oracle"
BASELINE = "baseline"
SOURCES = (TABLE1, ORACLE, BASELINE)


class MechanismError(RuntimeError):
    """The mechanism could not produce a playable report assignment."""


@dataclass(frozen=True)
class ReportLottery:
    branches: tuple[tuple[Fraction, ReportPair], ...]

    def __post_init__(self) -> None:
        branches = tuple(sorted((Fraction(p), r) for p, r in self.branches))
        if sum(p for p, _ in branches) != 1:
            raise ValueError("report lottery probabilities must sum to one")
        object.__setattr__(self, "branches", branches)

    @classmethod
    def certain(cls, pair: ReportPair) -> ReportLottery:
        return cls(((Fraction(1), pair),))

    def __iter__(self) -> Iterator[tuple[Fraction, ReportPair]]:
        return iter(self.branches)

    @property
    def pairs(self) -> tuple[ReportPair, ...]:
        return tuple(r for _, r in self.branches)

    def __str__(self) -> str:
        if len(self.branches) == 1:
            return str(self.branches[0][1])
        return "|".join(f"{p}:{r}" for p, r in self.branches)


@dataclass(frozen=True)
class MechanismOutcome:
    assigned: ReportLottery
    allocation: AllocationLottery
    case: CaseLabel
    source: str


def compose(scenario: Scenario, assigned: ReportLottery) -> AllocationLottery:
    """Push a report lottery through FCFS, flattening both coins."""
    branches = []
    for p, pair in assigned:
        for q, alloc in fcfs_allocate(scenario, pair):
            branches.append((p * q, alloc))
    return AllocationLottery(tuple(branches))


def table1_assign(scenario: Scenario) -> ReportLottery:
    """Reports the mechanism plays, row by row from the published table."""
    label = classify(scenario)
    i, j = roles(scenario)
    pi, pj = scenario.profile(i), scenario.profile(j)
    ei, di, ej, dj = (int(pi.earliest), int(pi.desired), int(pj.earliest), int(pj.desired))
    dt, h, tk = int(scenario.crossing), int(scenario.half_crossing), 2
    star = (di + dj - dt) // 2          # exact; odd means a half-tick
    on_tick = star % 2 == 0
    kind = label.kind

    def ladder(tie_when: bool, tie_at: int, whole_report: int) -> list[tuple[Fraction, int, int]]:
        # shared if / else-if / else-if / else rows: (probability, report_i, report_j)
        if tie_when:
            return [(Fraction(1), tie_at, tie_at)]
        if on_tick:
            return [(Fraction(1), whole_report, whole_report + tk)]
        if star + 1 <= ei:
            return [(Fraction(1), ei, ei + tk)]
        return [(HALF, star - 1, star + 1), (HALF, star + 1, star + 3)]

    if kind is CaseKind.NO_CONFLICT:
        rows = [(Fraction(1), di, dj)]
    elif kind is CaseKind.LEMMA1:
        d = di
        hi = max(ej, d - h)
        if max(ei, d - h) == hi:
            rows = [(Fraction(1), hi, hi)]
        elif on_tick:
            rows = [(Fraction(1), min(star, ej), min(star, ej) + tk)]
        elif ej <= star - 1:
            rows = [(Fraction(1), ej, ej + tk)]
        else:
            rows = [(HALF, star - 1, star + 1), (HALF, star + 1, star + 3)]
    elif kind is CaseKind.LEMMA2:
        if max(dj - dt, ei) == di:
            rows = [(Fraction(1), di, dj)]
        else:
            rows = ladder(False, 0, max(star, ei))
    elif kind is CaseKind.LEMMA3:
        tie = max(dj - h, ej)
        rows = ladder(max(ei, di - h) == tie, tie, max(star, ei))
    elif kind is CaseKind.LEMMA4_FORMER:
        rows = ladder(max(ei, di - h) == dj - h, dj - h, max(star, ei))
    elif kind is CaseKind.LEMMA4_LATTER:
        bar = max(ej, dj - h)
        if bar == ei:
            rows = [(Fraction(1), ei, ei)]
        else:
            # agent j reports first; the printed min{.} contradicts the equilibrium set
            rows = [(Fraction(1), bar + tk, bar)]
    else:
        tie = min(dj - h, di)
        rows = ladder(max(dj - dt, di - h, ei) == tie, tie, max(star, ei))

    grid = scenario.grid
    branches = []
    for p, ri, rj in rows:
        if not (grid.contains(ri) and grid.contains(rj)):
            raise MechanismError(f"{label} row assigns off-grid reports "
                                 f"({format_ticks(ri)},{format_ticks(rj)})")
        pair = ReportPair(ri, rj) if i == 1 else ReportPair(rj, ri)
        branches.append((p, pair))
    return ReportLottery(tuple(branches))


def run_direct_mechanism(scenario_reported: Scenario, source: str = TABLE1,
                         model: CostModel = QUADRATIC) -> MechanismOutcome:
    """Play reports for both agents given their declared (earliest, desired) times.

    ``baseline`` skips the mechanism: each agent's desired time goes straight to
    FCFS, which is the manipulable protocol the mechanism replaces.
    """
    label = classify(scenario_reported)
    if source == TABLE1:
        assigned = table1_assign(scenario_reported)
    elif source == ORACLE:
        eqset = nash_oracle(scenario_reported, model)
        if len(eqset) == 0:
            raise MechanismError("empty equilibrium set")
        pair, _, _ = select_social_equilibrium(scenario_reported, model, eqset)
        assigned = ReportLottery.certain(pair)
    elif source == BASELINE:
        assigned = ReportLottery.certain(ReportPair(scenario_reported.agent1.desired,
                                                    scenario_reported.agent2.desired))
    else:
        raise ValueError(f"unknown mechanism source {source!r}")
    return MechanismOutcome(assigned, compose(scenario_reported, assigned), label, source)


@dataclass(frozen=True)
class Misreport:
    agent: int
    true_profile: AgentProfile
    reported: AgentProfile
    truthful_cost: CostValue
    deviating_cost: CostValue

    def row(self) -> tuple[str, ...]:
        return (str(self.agent),
                f"({format_ticks(self.true_profile.earliest)},"
                f"{format_ticks(self.true_profile.desired)})",
                f"({format_ticks(self.reported.earliest)},"
                f"{format_ticks(self.reported.desired)})",
                str(self.truthful_cost), str(self.deviating_cost))


@dataclass
class SPReport:
    scenario: Scenario
    source: str
    model: CostModel
    violations: list[Misreport] = field(default_factory=list)
    # agents whose truthful outcome schedules them before their earliest time
    truthful_infeasible: list[int] = field(default_factory=list)

    @property
    def violation_count(self) -> int:
        return len(self.violations)


Mechanism = Callable[[Scenario], AllocationLottery]


def mechanism_for(source: str, model: CostModel = QUADRATIC, cached: bool = True) -> Mechanism:
    def run(s: Scenario) -> AllocationLottery:
        return run_direct_mechanism(s, source, model).allocation
    return lru_cache(maxsize=None)(run) if cached else run


def verify_strategy_proofness(scenario_true: Scenario, model: CostModel = QUADRATIC,
                              source: str = TABLE1,
                              mechanism: Optional[Mechanism] = None) -> SPReport:
    """Exhaustively search each agent's misreports for a strict improvement.

    Costs use the agent's true desired time; outcomes that schedule the agent
    before its true earliest time, or that the mechanism cannot play, are not
    usable manipulations and are skipped.
    """
    mech = mechanism or mechanism_for(source, model, cached=False)
    report = SPReport(scenario_true, source, model)
    delta = scenario_true.grid.delta
    truthful = mech(scenario_true)
    times = scenario_true.grid.enumerate()
    for k in (1, 2):
        true_prof = scenario_true.profile(k)
        if not agent_can_meet(scenario_true, truthful, k):
            report.truthful_infeasible.append(k)
        honest = expected_agent_cost(model, truthful, true_prof, k, delta)
        for a, e_hat in enumerate(times):
            for d_hat in times[a:]:
                fake = AgentProfile(e_hat, d_hat)
                if fake == true_prof:
                    continue
                try:
                    outcome = mech(scenario_true.with_profile(k, fake))
                except MechanismError:
                    continue
                if not agent_can_meet(scenario_true, outcome, k):
                    continue
                cost = expected_agent_cost(model, outcome, true_prof, k, delta)
                if cost < honest:
                    report.violations.append(Misreport(k, true_prof, fake, honest, cost))
    return report


def replay(scenario_true: Scenario, violation: Misreport, model: CostModel = QUADRATIC,
           source: str = TABLE1) -> tuple[CostValue, CostValue]:
    """Recompute (truthful, deviating) costs for a reported violation from scratch."""
    k = violation.agent
    delta = scenario_true.grid.delta
    honest = run_direct_mechanism(scenario_true, source, model).allocation
    fake = run_direct_mechanism(scenario_true.with_profile(k, violation.reported),
                                source, model).allocation
    prof = scenario_true.profile(k)
    return (expected_agent_cost(model, honest, prof, k, delta),
            expected_agent_cost(model, fake, prof, k, delta))


def compare_sources(scenario: Scenario, model: CostModel = QUADRATIC,
                    eqset: Optional[EquilibriumSet] = None) -> DiscrepancyReport:
    """Diff the table transcription against the oracle-based selection.

    Each table branch must be an equilibrium, be feasible, and match the selected
    equilibrium's expected social cost.
    """
    label = classify(scenario)
    report = DiscrepancyReport(scenario, str(label))
    eqset = nash_oracle(scenario, model) if eqset is None else eqset
    if len(eqset) == 0:
        report.oracle_empty = True
        return report
    pair, lottery, _ = select_social_equilibrium(scenario, model, eqset)
    best = social_cost(model, lottery, scenario)
    try:
        table = table1_assign(scenario)
    except MechanismError as exc:
        report.rows.append(Discrepancy("table1", scenario, str(label), "unplayable",
                                       f"{lottery} via {pair}", None, best, str(exc)))
        return report
    allocation = compose(scenario, table)
    cost = social_cost(model, allocation, scenario)
    problems = []
    outside = [str(p) for p in table.pairs if p not in eqset]
    if outside:
        problems.append("not an equilibrium: " + " ".join(outside))
    if not all(agent_can_meet(scenario, allocation, k) for k in (1, 2)):
        problems.append("allocation before an earliest time")
    if cost != best:
        problems.append("social cost differs")
    if problems:
        report.rows.append(Discrepancy(
            "table1", scenario, str(label), f"{table} -> {allocation}",
            f"{lottery} via {pair}", cost, best, f"{model.name}: " + "; ".join(problems)))
    return report
