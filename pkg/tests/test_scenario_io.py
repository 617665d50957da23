from fractions import Fraction

import pytest

from intersection_game import QUADRATIC, QUARTIC, ScenarioFile, SpecError, SweepSpec, tick
from intersection_game.scenario_io import compile_where, format_scenario

from conftest import DATA

BASE = """\
delta = 1
theta_min = 0
theta_max = 20
dt = 4
e1 = 0
d1 = 8
e2 = 0
d2 = 10
"""


def test_parse_s1_file(s1):
    sf = ScenarioFile.load(DATA / "s1.scn")
    assert sf.scenario == s1
    assert sf.cost == QUADRATIC and sf.separation == "fcfs" and sf.source == "table1"


def test_optional_keys_and_comments():
    sf = ScenarioFile.parse("# worked example\n" + BASE + "cost = power:4  # steeper\n"
                            "separation = eq4\nsource = oracle\n")
    assert sf.cost == QUARTIC and sf.separation == "eq4" and sf.source == "oracle"


def test_round_trip(s3):
    assert ScenarioFile.parse(format_scenario(s3)).scenario == s3


def test_delta_scales_only_costs():
    sf = ScenarioFile.parse(BASE.replace("delta = 1", "delta = 3"))
    assert sf.scenario.agent2.desired == tick(10)
    assert sf.scenario.grid.delta == 3


@pytest.mark.parametrize("text, line, fragment", [
    (BASE + "colour = red\n", 9, "unknown key 'colour'"),
    (BASE.replace("dt = 4", "dt = four"), 4, "integer"),
    (BASE.replace("dt = 4", "dt = 3"), 4, "even"),
    (BASE.replace("e1 = 0", "e1 = 9"), 6, "e1 exceeds d1"),
    (BASE.replace("d2 = 10", "d2 = 30"), 8, "outside"),
    (BASE + "cost = cubic\n", 9, "unknown cost model"),
    (BASE + "source = baseline\n", 9, "source must be one of"),
    (BASE + "dt = 4\n", 9, "duplicate"),
    (BASE + "just words\n", 9, "key = value"),
    (BASE.replace("delta = 1", "delta = 0"), 1, "positive"),
])
def test_parse_errors_carry_line_numbers(text, line, fragment):
    with pytest.raises(SpecError) as err:
        ScenarioFile.parse(text, "x.scn")
    assert err.value.line == line
    assert f"x.scn:{line}:" in str(err.value)
    assert fragment in str(err.value)


def test_missing_keys():
    with pytest.raises(SpecError, match="missing required keys: e2, d2"):
        ScenarioFile.parse("\n".join(BASE.splitlines()[:6]))


SPEC = """\
delta = 1
theta_min = 0
theta_max = 12
dt = 2, 4
cost = quadratic, power:4
"""


def test_sweep_cardinality():
    spec = SweepSpec.parse(SPEC)
    assert spec.costs == (QUADRATIC, QUARTIC)
    assert spec.cardinality() == 2 * 91 * 91


def test_sweep_ranges_and_where():
    spec = SweepSpec.parse(SPEC + "d1 = 10\nd2 = 10\n"
                           "where = d1 == d2 and e1 > d1 - dt/2 and e2 > d1 - dt/2\n")
    got = list(spec.tick_profiles())
    assert (4, 9, 10, 10, 10) in got
    assert all(e1 > 10 - dt / 2 and e2 > 10 - dt / 2 for dt, e1, _, e2, _ in got)
    # dt=2 leaves e in {10}, dt=4 leaves e in {9, 10}
    assert len(got) == spec.cardinality() == 1 + 4


def test_where_division_is_exact():
    check = compile_where("e1 * 2 == dt / 2 * 2 + 1")
    assert check({k: Fraction(v) for k, v in
                  dict(dt=3, e1=2, d1=0, e2=0, d2=0, theta_min=0, theta_max=0).items()})


@pytest.mark.parametrize("expr", ["__import__('os')", "e1.real", "[e1]", "foo > 1",
                                  "open('x')", "e1 if d1 else d2", "1.5 < e1",
                                  "min(e1, key=d1)"])
def test_where_whitelist(expr):
    with pytest.raises(SpecError):
        compile_where(expr)


@pytest.mark.parametrize("text, fragment", [
    ("delta = 1\ntheta_min = 0\ntheta_max = 12\n", "missing required key 'dt'"),
    (SPEC + "e1 = 5..3\n", "empty range"),
    (SPEC + "e1 = 0..13\n", "leaves"),
    (SPEC + "sp = maybe\n", "sp must be on or off"),
    (SPEC.replace("power:4", "quadratic"), "repeat"),
    (SPEC.replace("dt = 2, 4", "dt = 2, 3"), "even"),
])
def test_sweep_spec_errors(text, fragment):
    with pytest.raises(SpecError, match=fragment):
        SweepSpec.parse(text)
