from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from intersection_game import (QUADRATIC, QUARTIC, AgentProfile, Allocation,
                               AllocationLottery, CostModel, CostValue, agent_cost, social_cost,
                               tick)
from intersection_game.payoff import expected_agent_cost

from conftest import scn


def A(t1, t2):
    return Allocation(tick(t1), tick(t2))


def P(e, d):
    return AgentProfile(tick(e), tick(d))


def test_agent_cost_examples():
    assert agent_cost(QUADRATIC, A(0, 12), P(0, 10), 2) == 4
    assert agent_cost(QUADRATIC, A(10, 0), P(0, 10), 1) == 0
    assert agent_cost(QUARTIC, A(7, 0), P(0, 10), 1) == 81


def test_delta_scales_cost():
    assert agent_cost(QUADRATIC, A(0, 12), P(0, 10), 2, Fraction(1, 2)) == 1
    assert agent_cost(QUADRATIC, A(0, 12), P(0, 10), 2, Fraction(3)) == 36


def test_expected_cost_examples():
    lot = AllocationLottery.coin(A(13, 8), A(0, 13))
    assert expected_agent_cost(QUADRATIC, lot, P(0, 10), 2) == Fraction(13, 2)
    tie = AllocationLottery.coin(A(2, 5), A(5, 2))
    assert expected_agent_cost(QUADRATIC, tie, P(0, 3), 1) == Fraction(5, 2)
    one = AllocationLottery.certain(A(7, 12))
    assert expected_agent_cost(QUADRATIC, one, P(0, 10), 2) == agent_cost(
        QUADRATIC, A(7, 12), P(0, 10), 2)


def test_social_cost_examples(s1, no_conflict):
    assert social_cost(QUADRATIC, A(7, 12), s1) == 5
    assert social_cost(QUADRATIC, A(6, 11), s1) == 5
    assert social_cost(QUADRATIC, A(4, 10), no_conflict) == 0


def test_fractional_exponent_is_flagged_inexact():
    m = CostModel.parse("power:5/2")
    assert not m.is_exact
    c = m(4)
    assert not c.exact and abs(c.value - 32.0) < 1e-12
    assert m.name == "power:5/2"


def test_parse_and_reject():
    assert CostModel.parse("quadratic") == QUADRATIC
    assert CostModel.parse("power:4") == QUARTIC
    for bad in ("cubic", "power:", "power:1", "power:x", "power:1/2"):
        with pytest.raises(ValueError):
            CostModel.parse(bad)


def test_cost_value_ordering():
    assert CostValue(Fraction(1, 2)) < CostValue(Fraction(2, 3))
    assert CostValue(Fraction(5)) == 5
    assert str(CostValue(Fraction(13, 2))) == "13/2"


@pytest.mark.parametrize("model", [QUADRATIC, QUARTIC, CostModel.parse("power:3/2")])
def test_convexity_witness(model):
    # deviations up to the full span of a [0,12] grid, in half-ticks
    assert model.is_convex_on(2 * 12)


def test_scaled_is_integer_for_integer_exponents():
    x = np.arange(-6, 7)
    assert QUARTIC.scaled(x).dtype.kind == "i"
    assert list(QUADRATIC.scaled(x)[:3]) == [36, 25, 16]


@given(st.integers(0, 12), st.integers(0, 12), st.integers(0, 12), st.integers(0, 12))
def test_social_cost_zero_iff_desired(d1, d2, t1, t2):
    s = scn(4, (0, 0), (d1, d2), 0, 12)
    zero = social_cost(QUADRATIC, A(t1, t2), s) == 0
    assert zero == (t1 == d1 and t2 == d2)
    assert social_cost(QUADRATIC, A(t1, t2), s) >= 0
