from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from intersection_game import (FCFS_COMPATIBLE, EQ4_SEPARATION, QUADRATIC, QUARTIC, Allocation,
                               AllocationLottery, ReportPair, TheoremPremiseError,
                               closed_form_social_cases, closed_form_theorem1, crosscheck,
                               fcfs_allocate, nash_oracle, select_social_equilibrium,
                               social_cost, socially_optimal_allocation, tick)
from intersection_game.equilibrium import closed_form_equilibria
from intersection_game.social import (equilibrium_allocations, social_case, theorem1_premise,
                                      theorem1_row)

from conftest import scn


def A(t1, t2):
    return Allocation(tick(t1), tick(t2))


def R(r1, r2):
    return ReportPair(tick(r1), tick(r2))


def coin(a, b):
    return AllocationLottery.coin(A(*a), A(*b))


def test_case_i_fairness_lottery():
    s = scn(4, (0, 0), (10, 10))
    opt = socially_optimal_allocation(s)
    assert opt.lottery == coin((8, 13), (13, 8))
    assert closed_form_social_cases(s).lottery == coin((8, 13), (13, 8))
    assert opt.cost == 13


def test_case_ii_optimum(s1):
    opt = socially_optimal_allocation(s1)
    assert opt.argmin_set == {A(7, 12), A(6, 11)}
    assert opt.lottery == AllocationLottery.certain(A(7, 12))
    assert opt.cost == 5
    assert closed_form_social_cases(s1).lottery == opt.lottery


def test_no_conflict_optimum(no_conflict):
    opt = socially_optimal_allocation(no_conflict)
    assert opt.lottery == AllocationLottery.certain(A(4, 10)) and opt.cost == 0
    with pytest.raises(ValueError):
        closed_form_social_cases(no_conflict)


def test_case_iii_literal_formula():
    s = scn(4, (0, 0), (8, 9))
    assert social_case(s) == "iii"
    formula = closed_form_social_cases(s)
    assert formula.lottery == coin((7, 11), (6, 12))
    for mode in (FCFS_COMPATIBLE, EQ4_SEPARATION):
        assert not formula.argmin_set <= socially_optimal_allocation(s, QUADRATIC, mode).argmin_set


def test_eq4_separation_is_looser():
    s = scn(4, (0, 0), (10, 10))
    assert socially_optimal_allocation(s, QUADRATIC, EQ4_SEPARATION).cost < 13
    with pytest.raises(ValueError):
        socially_optimal_allocation(s, QUADRATIC, "bogus")


def test_equilibrium_allocations(s1, s3, tiny):
    assert equilibrium_allocations(s1, closed_form_equilibria(s1)).allocations() == {
        A(6, 11), A(7, 12)}
    assert equilibrium_allocations(s3, closed_form_equilibria(s3)).allocations() == {A(13, 8)}
    assert equilibrium_allocations(tiny, nash_oracle(tiny)).lotteries() == {
        coin((2, 5), (5, 2))}


def test_selection_s1(s1):
    pair, lot, diag = select_social_equilibrium(s1, QUADRATIC, nash_oracle(s1))
    assert pair == R(7, 8)
    assert lot == AllocationLottery.certain(A(7, 12))
    assert diag.achieved_optimal and diag.epsilon == 0


def test_selection_s3_and_s2(s2, s3):
    _, lot, _ = select_social_equilibrium(s3, QUADRATIC, nash_oracle(s3))
    assert lot.only() == A(13, 8)
    pair, lot, diag = select_social_equilibrium(s2, QUADRATIC, nash_oracle(s2))
    assert pair == R(9, 10) and lot.only() == A(9, 14)
    assert diag.epsilon == tick(1) and not diag.achieved_optimal
    assert diag.sigma == tick(2)


def test_selection_rejects_empty(s1):
    from intersection_game.equilibrium import EquilibriumSet
    with pytest.raises(ValueError):
        select_social_equilibrium(s1, QUADRATIC, EquilibriumSet(frozenset(), "oracle"))


def test_theorem1_rows(s2, s3, lemma5):
    assert closed_form_theorem1(s3) == A(13, 8)
    assert theorem1_row(s3)[0] == 2
    assert theorem1_row(s2) == (1, A(10, 15))
    assert closed_form_theorem1(s2) == A(10, 15)
    # the Lemma 5 scenario reaches the optimum, so the premise fails there
    assert not theorem1_premise(lemma5)
    with pytest.raises(TheoremPremiseError):
        closed_form_theorem1(lemma5)
    assert closed_form_theorem1(lemma5, check_premise=False) == A(7, 12)
    assert theorem1_row(lemma5)[0] == 3


def test_crosscheck_examples(s1, s2):
    assert crosscheck(s1).rows == []
    rows = crosscheck(s2).rows
    assert [r.kind for r in rows] == ["theorem1-row1"]
    r = rows[0]
    assert (r.closed_form, r.closed_cost, r.oracle_cost) == ("(10,15)", 25, 17)
    assert r.known
    rows = crosscheck(scn(4, (0, 0), (8, 9))).rows
    assert [r.kind for r in rows] == ["social-case-iii"]


@settings(max_examples=150, deadline=None)
@given(st.sampled_from([2, 4]), *(st.integers(0, 12),) * 4)
def test_selection_properties(dt, a, b, c, d):
    s = scn(dt, (min(a, b), min(c, d)), (max(a, b), max(c, d)), 0, 12)
    eq = nash_oracle(s)
    opt = socially_optimal_allocation(s)
    pair, lot, diag = select_social_equilibrium(s, QUADRATIC, eq)
    assert pair in eq and fcfs_allocate(s, pair) == lot
    best = social_cost(QUADRATIC, lot, s)
    assert all(social_cost(QUADRATIC, fcfs_allocate(s, p), s) >= best for p in eq)
    assert diag.achieved_optimal == (best == opt.cost)
    assert diag.achieved_optimal == (diag.epsilon == 0)
    gap = s.gap
    assert all(abs(x.t1 - x.t2) >= gap for x in opt.argmin_set)


@settings(max_examples=150, deadline=None)
@given(st.sampled_from([2, 4]), st.integers(0, 12), st.integers(0, 12))
def test_argmin_set_is_cost_model_invariant(dt, d1, d2):
    s = scn(dt, (0, 0), (d1, d2), 0, 12)
    assert (socially_optimal_allocation(s, QUADRATIC).argmin_set
            == socially_optimal_allocation(s, QUARTIC).argmin_set)


def test_probabilities_stay_exact():
    s = scn(4, (0, 0), (10, 10))
    assert [p for p, _ in socially_optimal_allocation(s).lottery] == [Fraction(1, 2)] * 2
