import itertools
from pathlib import Path

import pytest

from intersection_game import Scenario

DATA = Path(__file__).parent / "data"


def scn(dt, e, d, lower=0, upper=20):
    return Scenario.from_ticks(dt, e, d, lower, upper)


def sweep_scenarios(dts=(2, 4), lower=0, upper=12):
    """Every valid profile pair on [lower, upper] for each crossing duration."""
    grid = range(lower, upper + 1)
    profiles = [(e, d) for e in grid for d in grid if e <= d]
    for dt in dts:
        for (e1, d1), (e2, d2) in itertools.product(profiles, profiles):
            yield Scenario.from_ticks(dt, (e1, e2), (d1, d2), lower, upper)


@pytest.fixture
def s1():
    return scn(4, (0, 0), (8, 10))


@pytest.fixture
def s2():
    return scn(4, (9, 10), (10, 10))


@pytest.fixture
def s3():
    return scn(4, (9, 5), (9, 10))


@pytest.fixture
def tiny():
    return scn(2, (0, 0), (3, 3), 0, 6)


@pytest.fixture
def no_conflict():
    return scn(4, (0, 0), (4, 10))


@pytest.fixture
def lemma5():
    return scn(4, (7, 9), (8, 10))


# one line per acceptance criterion, filled in by test_acceptance
ACCEPTANCE: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[n])
