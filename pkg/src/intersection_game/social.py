"""Socially optimal allocations and the socially optimal equilibrium.

Brute force is the reference everywhere; the closed-form transcriptions below
are checked against it by :func:`crosscheck`.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np

from .equilibrium import EquilibriumSet, classify, nash_oracle, roles
from .fcfs import Allocation, AllocationLottery, ReportPair, Scenario, fcfs_allocate
from .payoff import QUADRATIC, CostModel, CostValue, social_cost
from .report import Discrepancy, DiscrepancyReport
from .time_grid import GridTime, TimeGrid, format_ticks

FCFS_COMPATIBLE = "fcfs"
EQ4_SEPARATION = "eq4"
SEPARATION_MODES = (FCFS_COMPATIBLE, EQ4_SEPARATION)


class TheoremPremiseError(ValueError):
    """The closed-form equilibrium allocation is not claimed for this scenario."""


@dataclass(frozen=True)
class SociallyOptimalAllocation:
    lottery: AllocationLottery
    argmin_set: frozenset[Allocation]
    cost: CostValue
    source: str = "brute-force"

    def __str__(self) -> str:
        return str(self.lottery)


@dataclass(frozen=True)
class AllocationSet:
    entries: frozenset[tuple[ReportPair, AllocationLottery]]

    def lotteries(self) -> set[AllocationLottery]:
        return {lot for _, lot in self.entries}

    def allocations(self) -> set[Allocation]:
        return {a for _, lot in self.entries for a in lot.allocations}

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class SelectionDiagnostics:
    """Offset of the selected equilibrium allocation from the social optimum.

    ``epsilon`` is the common shift (half-ticks) applied to both times of the
    nearest optimal pair with the same passing order, or None when the selected
    allocation is not such a translate.  ``sigma`` is the first passer's deviation
    in that reference pair.
    """

    epsilon: Optional[GridTime]
    sigma: Optional[GridTime]
    achieved_optimal: bool


def _separation(scenario: Scenario, mode: str) -> int:
    if mode == FCFS_COMPATIBLE:
        return int(scenario.gap)
    if mode == EQ4_SEPARATION:
        return int(scenario.crossing)
    raise ValueError(f"unknown separation mode {mode!r}")


@lru_cache(maxsize=4096)
def _argmin_pairs(grid: TimeGrid, crossing: int, sep: int, d1: int, d2: int,
                  model: CostModel) -> tuple[tuple[int, int], ...]:
    # window reaches one spacing beyond both grid bounds; any optimum lies inside
    pad = crossing + 2
    t = np.arange(int(grid.lower) - pad, int(grid.upper) + pad + 1, 2, dtype=np.int64)
    c1 = model.scaled(t - d1)
    c2 = model.scaled(t - d2)
    total = c1[:, None] + c2[None, :]
    ok = np.abs(t[:, None] - t[None, :]) >= sep
    if not ok.any():
        raise ValueError("no allocation pair satisfies the separation constraint")
    big = np.iinfo(np.int64).max if total.dtype.kind == "i" else np.inf
    total = np.where(ok, total, big)
    a, b = np.nonzero(total == total.min())
    return tuple(sorted((int(t[x]), int(t[y])) for x, y in zip(a, b)))


def socially_optimal_allocation(scenario: Scenario, model: CostModel = QUADRATIC,
                                separation_mode: str = FCFS_COMPATIBLE
                                ) -> SociallyOptimalAllocation:
    """Exhaustive minimum of the summed deviation costs under a spacing constraint.

    Earliest times are ignored.  With equal desired times the canonical answer
    is a fair coin over a mirrored pair; otherwise it is deterministic, with
    exact ties resolved by giving the longer deviation to the later-desiring
    agent.
    """
    sep = _separation(scenario, separation_mode)
    d1, d2 = int(scenario.agent1.desired), int(scenario.agent2.desired)
    pairs = _argmin_pairs(scenario.grid, int(scenario.crossing), sep, d1, d2, model)
    argmin = frozenset(Allocation(GridTime(a), GridTime(b)) for a, b in pairs)

    def skew(a: Allocation, later: int) -> int:
        earlier = 3 - later
        return (abs(a[later] - scenario.profile(later).desired)
                - abs(a[earlier] - scenario.profile(earlier).desired))

    if d1 == d2:
        firsts = [a for a in argmin if a.t1 < a.t2]
        pick = min(firsts, key=lambda a: (-skew(a, 2), a))
        lottery = AllocationLottery.coin(pick, pick.mirrored())
    else:
        _, j = roles(scenario)
        pick = min(argmin, key=lambda a: (-skew(a, j), a))
        lottery = AllocationLottery.certain(pick)
    return SociallyOptimalAllocation(lottery, argmin, social_cost(model, lottery, scenario))


def is_conflicting(scenario: Scenario) -> bool:
    d1, d2 = scenario.agent1.desired, scenario.agent2.desired
    return abs(d1 - d2) <= scenario.crossing


def social_case(scenario: Scenario) -> str:
    """'i' for equal desired times, 'ii' for an even-tick gap, 'iii' for odd."""
    gap = abs(scenario.agent1.desired - scenario.agent2.desired)
    if gap == 0:
        return "i"
    return "ii" if gap % 4 == 0 else "iii"


def closed_form_social_cases(scenario: Scenario,
                             model: CostModel = QUADRATIC) -> SociallyOptimalAllocation:
    """Literal case formulas for the optimal allocation; no search."""
    if not is_conflicting(scenario):
        raise ValueError("closed-form optimum cases apply to conflicting scenarios only")
    dt, h, tk = int(scenario.crossing), int(scenario.half_crossing), 2
    case = social_case(scenario)
    if case == "i":
        d = int(scenario.agent1.desired)
        a = Allocation(GridTime(d - h), GridTime(d + h + tk))
        lottery = AllocationLottery.coin(a, a.mirrored())
    else:
        i, j = roles(scenario)
        di, dj = int(scenario.profile(i).desired), int(scenario.profile(j).desired)
        g = dj - di

        def placed(shift: int) -> Allocation:
            ti, tj = GridTime(di - shift), GridTime(dj + shift + tk)
            return Allocation(ti, tj) if i == 1 else Allocation(tj, ti)

        if case == "ii":
            lottery = AllocationLottery.certain(placed((dt - g) // 2))
        else:
            # coin over rounding the half-tick split up (b'=1) or down (b'=0)
            lottery = AllocationLottery.coin(placed((dt - g + tk) // 2),
                                             placed((dt - g - tk) // 2))
    return SociallyOptimalAllocation(lottery, frozenset(lottery.allocations),
                                     social_cost(model, lottery, scenario),
                                     f"case-{case}")


def equilibrium_allocations(scenario: Scenario, eqset: EquilibriumSet) -> AllocationSet:
    return AllocationSet(frozenset((p, fcfs_allocate(scenario, p)) for p in eqset))


def _distance(lottery: AllocationLottery, target: AllocationLottery) -> int:
    return min(abs(a.t1 - b.t1) + abs(a.t2 - b.t2)
               for a in lottery.allocations for b in target.allocations)


def _diagnostics(scenario: Scenario, lottery: AllocationLottery,
                 optimum: SociallyOptimalAllocation, cost: CostValue) -> SelectionDiagnostics:
    refs = optimum.argmin_set | {a.mirrored() for a in optimum.argmin_set}
    shifts = set()
    sigma = None
    for branch in lottery.allocations:
        best = None
        for ref in refs:
            if ref.first != branch.first:
                continue
            s1, s2 = branch.t1 - ref.t1, branch.t2 - ref.t2
            if s1 == s2 and (best is None or (abs(s1), s1) < (abs(best[0]), best[0])):
                best = (s1, ref)
        if best is None:
            return SelectionDiagnostics(None, None, cost == optimum.cost)
        shifts.add(best[0])
        first = best[1].first
        sigma = abs(best[1][first] - scenario.profile(first).desired)
    epsilon = GridTime(shifts.pop()) if len(shifts) == 1 else None
    return SelectionDiagnostics(epsilon, GridTime(sigma) if epsilon is not None else None,
                                cost == optimum.cost)


def select_social_equilibrium(scenario: Scenario, model: CostModel, eqset: EquilibriumSet,
                              separation_mode: str = FCFS_COMPATIBLE,
                              optimum: Optional[SociallyOptimalAllocation] = None
                              ) -> tuple[ReportPair, AllocationLottery, SelectionDiagnostics]:
    """The equilibrium with the least expected social cost.

    Exact ties go to the allocation nearest the canonical optimum, then to the
    lexicographically smallest allocation and report pair.
    """
    if len(eqset) == 0:
        raise ValueError("cannot select from an empty equilibrium set")
    if optimum is None:
        optimum = socially_optimal_allocation(scenario, model, separation_mode)
    scored = []
    for pair in eqset:
        lottery = fcfs_allocate(scenario, pair)
        cost = social_cost(model, lottery, scenario)
        scored.append((cost, _distance(lottery, optimum.lottery), lottery.allocations,
                       pair, lottery))
    cost, _, _, pair, lottery = min(scored, key=lambda s: s[:4])
    return pair, lottery, _diagnostics(scenario, lottery, optimum, cost)


def theorem1_row(scenario: Scenario) -> tuple[int, Allocation]:
    """Which closed-form row applies and the allocation it prescribes (no checks)."""
    i, j = roles(scenario)
    pi, pj = scenario.profile(i), scenario.profile(j)
    ei, di, ej, dj = pi.earliest, pi.desired, pj.earliest, pj.desired
    gap, h = scenario.gap, scenario.half_crossing
    if di == dj:
        row, (ti, tj) = 1, (ej, ej + gap)
    elif ej < ei <= di < dj and dj - h < ei:
        bar = max(dj - h, ej)
        row, (ti, tj) = 2, (bar + gap, bar)
    else:
        row, (ti, tj) = 3, (ei, ei + gap)
    return row, (Allocation(ti, tj) if i == 1 else Allocation(tj, ti))


def theorem1_premise(scenario: Scenario, model: CostModel = QUADRATIC,
                     eqset: Optional[EquilibriumSet] = None) -> bool:
    """True when no equilibrium reaches the optimum and the best one is deterministic.

    A socially optimal equilibrium that is a tie lottery cannot be written as a
    single allocation pair, so the closed form does not speak to it.
    """
    eqset = nash_oracle(scenario, model) if eqset is None else eqset
    _, lottery, diag = select_social_equilibrium(scenario, model, eqset)
    return not diag.achieved_optimal and lottery.is_deterministic


def closed_form_theorem1(scenario: Scenario, model: CostModel = QUADRATIC,
                         check_premise: bool = True) -> Allocation:
    if check_premise and not theorem1_premise(scenario, model):
        raise TheoremPremiseError(
            "an equilibrium already attains the optimum or the best equilibrium is a "
            "tie lottery; use select_social_equilibrium")
    return theorem1_row(scenario)[1]


def crosscheck(scenario: Scenario, model: CostModel = QUADRATIC,
               eqset: Optional[EquilibriumSet] = None) -> DiscrepancyReport:
    """Compare optimum case formulas and the equilibrium formula with brute force."""
    label = str(classify(scenario))
    report = DiscrepancyReport(scenario, label)

    if is_conflicting(scenario):
        formula = closed_form_social_cases(scenario, model)
        case = social_case(scenario)
        fcost = formula.cost
        for mode in SEPARATION_MODES:
            opt = socially_optimal_allocation(scenario, model, mode)
            if formula.argmin_set <= opt.argmin_set:
                continue
            kind = f"social-case-{case}" + ("" if mode == FCFS_COMPATIBLE else "-eq4")
            entry = Discrepancy(
                kind, scenario, label, str(formula.lottery),
                "{" + ", ".join(str(a) for a in sorted(opt.argmin_set)) + "}",
                fcost, opt.cost, f"{model.name} separation={mode}")
            # the formulas carry FCFS spacing, so the literal-constraint diff is informational
            (report.rows if mode == FCFS_COMPATIBLE else report.notes).append(entry)

    eqset = nash_oracle(scenario, model) if eqset is None else eqset
    if len(eqset) == 0:
        report.oracle_empty = True
        return report
    pair, lottery, diag = select_social_equilibrium(scenario, model, eqset)
    if not diag.achieved_optimal and lottery.is_deterministic:
        row, alloc = theorem1_row(scenario)
        if lottery.only() != alloc:
            report.rows.append(Discrepancy(
                f"theorem1-row{row}", scenario, label, str(alloc),
                f"{lottery} via reports {pair}",
                social_cost(model, alloc, scenario), social_cost(model, lottery, scenario),
                f"{model.name} epsilon="
                f"{'-' if diag.epsilon is None else format_ticks(diag.epsilon)}"))
    return report
