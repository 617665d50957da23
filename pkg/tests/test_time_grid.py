from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from intersection_game.time_grid import (GridTime, TimeGrid, contains, enumerate_grid,
                                         format_ticks, midpoint, tick)


def test_ticks_are_two_half_ticks():
    assert tick(7) == 14
    assert tick(Fraction(15, 2)) == 15
    assert tick(7).is_whole_tick and not GridTime(15).is_whole_tick
    with pytest.raises(ValueError):
        tick(Fraction(1, 3))


def test_format_ticks():
    assert format_ticks(tick(7)) == "7"
    assert format_ticks(15) == "7+1/2"
    assert format_ticks(-3) == "-2+1/2"
    assert repr(tick(3)) == "GridTime(3)"


def test_arithmetic_stays_grid_time():
    t = tick(3) + tick(2)
    assert isinstance(t, GridTime) and t == tick(5)
    assert isinstance(tick(3) - 1, GridTime)
    assert isinstance(-tick(3), GridTime)
    assert abs(-tick(3)) == tick(3)


def test_midpoint_examples():
    assert midpoint(tick(6), tick(8)) == tick(7)
    assert midpoint(tick(6), tick(9)) == 15
    assert midpoint(tick(4), tick(4)) == tick(4)
    with pytest.raises(ValueError):
        midpoint(1, 2)


def test_grid_membership():
    g = TimeGrid.from_ticks(0, 12)
    assert len(g) == 13
    assert contains(g, tick(12)) and tick(0) in g
    assert not contains(g, tick(13))
    assert not contains(g, 15)          # half-tick is never reportable
    assert g.index(tick(4)) == 4
    with pytest.raises(ValueError):
        g.index(tick(13))


def test_grid_value_uses_delta():
    g = TimeGrid.from_values(Fraction(1, 2), 0, 3)
    assert len(g) == 7
    assert g.value(tick(3)) == Fraction(3, 2)


def test_invalid_grids_rejected():
    with pytest.raises(ValueError):
        TimeGrid.from_ticks(5, 4)
    with pytest.raises(ValueError):
        TimeGrid.from_ticks(0, 4, 0)


@given(st.integers(-20, 20), st.integers(0, 20))
def test_enumerate_round_trip(lo, span):
    g = TimeGrid.from_ticks(lo, lo + span)
    pts = enumerate_grid(g)
    assert len(pts) == span + 1
    assert all(contains(g, t) for t in pts)
    assert pts == sorted(pts)


@given(st.integers(-10**6, 10**6), st.integers(-10**6, 10**6))
def test_half_tick_arithmetic_is_exact(a, b):
    x, y = GridTime(a), GridTime(b)
    assert (x + y) - y == x


@given(st.integers(1, 50))
def test_half_crossing_is_whole_tick_for_even_crossing(k):
    dt = tick(2 * k)
    assert GridTime(dt // 2).is_whole_tick
