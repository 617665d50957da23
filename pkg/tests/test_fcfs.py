from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from intersection_game import (AgentProfile, Allocation, AllocationLottery, MalformedReport,
                               ReportPair, Scenario, agent_can_meet, fcfs_allocate,
                               is_feasible, lottery_is_feasible, tick)
from intersection_game.time_grid import TimeGrid

from conftest import scn


def T(*xs):
    return tuple(tick(x) for x in xs)


def A(t1, t2):
    return Allocation(tick(t1), tick(t2))


def R(r1, r2):
    return ReportPair(tick(r1), tick(r2))


def reference_fcfs(r1, r2, dt, delta=1):
    """Straight transcription in ticks, kept apart from the package code."""
    if r1 < r2:
        return [(1.0, (r1, max(r2, r1 + dt + delta)))]
    if r2 < r1:
        return [(1.0, (max(r1, r2 + dt + delta), r2))]
    return [(0.5, (r1, r1 + dt + delta)), (0.5, (r1 + dt + delta, r1))]


def as_ticks(lottery):
    return sorted((float(p), (int(a.t1) // 2, int(a.t2) // 2)) for p, a in lottery)


def test_no_conflict_reports(s1):
    assert fcfs_allocate(s1, R(2, 10)) == AllocationLottery.certain(A(2, 10))


def test_spacing_pushes_second(s1):
    lot = fcfs_allocate(s1, R(7, 8))
    assert lot == AllocationLottery.certain(A(7, 12))
    assert as_ticks(lot) == sorted(reference_fcfs(7, 8, 4))


def test_tie_is_fair_coin(s1):
    lot = fcfs_allocate(s1, R(5, 5))
    assert lot == AllocationLottery.coin(A(5, 10), A(10, 5))
    assert [p for p, _ in lot] == [Fraction(1, 2)] * 2
    assert str(lot) == "1/2:(5,10)|1/2:(10,5)"


def test_allocation_may_exceed_grid():
    s = scn(4, (0, 0), (12, 12), 0, 12)
    assert fcfs_allocate(s, R(12, 12)).allocations == (A(12, 17), A(17, 12))


def test_off_grid_report_rejected(s1):
    with pytest.raises(MalformedReport):
        fcfs_allocate(s1, ReportPair(tick(21), tick(3)))
    with pytest.raises(MalformedReport):
        fcfs_allocate(s1, ReportPair(15, tick(3)))


def test_scenario_validation():
    with pytest.raises(ValueError):
        scn(3, (0, 0), (4, 10))              # half the crossing is not a whole tick
    with pytest.raises(ValueError):
        AgentProfile(tick(5), tick(4))
    with pytest.raises(ValueError):
        scn(4, (0, 0), (4, 30))
    with pytest.raises(ValueError):
        Scenario(TimeGrid.from_ticks(0, 5), tick(0), AgentProfile(*T(0, 1)),
                 AgentProfile(*T(0, 1)))


def test_is_feasible_examples(s1, s3):
    assert is_feasible(s1, A(7, 12))
    assert not is_feasible(s3, A(8, 13))
    assert is_feasible(s3, A(13, 8))


def test_lottery_feasibility(s1, s3):
    assert lottery_is_feasible(s1, AllocationLottery.certain(A(7, 12)))
    # e2 = 5: the (2,5)-style branch that puts agent 2 at 4 poisons the lottery
    assert not lottery_is_feasible(s3, fcfs_allocate(s3, R(4, 4)))
    assert lottery_is_feasible(s3, fcfs_allocate(s3, R(9, 9)))
    assert agent_can_meet(s3, fcfs_allocate(s3, R(4, 4)), 2) is False
    assert agent_can_meet(s3, fcfs_allocate(s3, R(9, 9)), 1) is True


def test_lottery_rejects_bad_probabilities():
    with pytest.raises(ValueError):
        AllocationLottery(((Fraction(1, 2), A(0, 5)),))
    assert AllocationLottery.certain(A(0, 5)).only() == A(0, 5)
    with pytest.raises(ValueError):
        AllocationLottery.coin(A(0, 5), A(5, 0)).only()


grid_ticks = st.integers(0, 12)


@given(st.sampled_from([2, 4]), grid_ticks, grid_ticks)
def test_fcfs_contract(dt, r1, r2):
    s = scn(dt, (0, 0), (0, 0), 0, 12)
    lot = fcfs_allocate(s, R(r1, r2))
    gap = tick(dt + 1)
    for _, a in lot:
        assert abs(a.t1 - a.t2) >= gap
        first = a.first
        assert a[first] == min(tick(r1), tick(r2))
        # equality exactly when the later report sits inside the spacing window
        later = max(r1, r2)
        tight = min(r1, r2) < later <= min(r1, r2) + dt + 1 or r1 == r2
        assert (abs(a.t1 - a.t2) == gap) == tight
    if r1 == r2:
        a, b = lot.allocations
        assert a.mirrored() == b
    assert as_ticks(lot) == sorted(reference_fcfs(r1, r2, dt))
    assert fcfs_allocate(s, R(r1, r2)) == lot
