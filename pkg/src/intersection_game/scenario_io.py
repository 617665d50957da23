"""Plain ``key = value`` scenario files and sweep specifications.

Every time in these files is a whole number of ticks.  ``delta`` is the tick
length in abstract time units and only scales reported costs.
"""
from __future__ import annotations

import ast
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable, Iterator, Optional, Union

from .fcfs import AgentProfile, Scenario
from .mechanism import SOURCES, TABLE1
from .payoff import QUADRATIC, CostModel
from .social import FCFS_COMPATIBLE, SEPARATION_MODES
from .time_grid import GridTime, TimeGrid, format_ticks

REQUIRED_KEYS = ("delta", "theta_min", "theta_max", "dt", "e1", "d1", "e2", "d2")
OPTIONAL_KEYS = ("cost", "separation", "source")
SWEEP_KEYS = ("delta", "theta_min", "theta_max", "dt", "e1", "d1", "e2", "d2",
              "cost", "separation", "source", "where", "sp")


class SpecError(ValueError):
    """A scenario file or sweep spec could not be parsed."""

    def __init__(self, message: str, line: Optional[int] = None, name: str = "<input>"):
        self.line = line
        where = f"{name}:{line}" if line is not None else name
        super().__init__(f"{where}: {message}")


def parse_key_values(text: str, allowed: tuple[str, ...],
                     name: str = "<input>") -> dict[str, tuple[str, int]]:
    """Map each key to (raw value, line number).  ``#`` starts a comment."""
    out: dict[str, tuple[str, int]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise SpecError(f"expected 'key = value', got {raw.strip()!r}", lineno, name)
        if key not in allowed:
            raise SpecError(f"unknown key {key!r}", lineno, name)
        if key in out:
            raise SpecError(f"duplicate key {key!r}", lineno, name)
        if not value:
            raise SpecError(f"empty value for {key!r}", lineno, name)
        out[key] = (value, lineno)
    return out


def _int(entries: dict[str, tuple[str, int]], key: str, name: str) -> int:
    value, lineno = entries[key]
    try:
        return int(value)
    except ValueError:
        raise SpecError(f"{key} must be an integer, got {value!r}", lineno, name) from None


def _choice(entries: dict[str, tuple[str, int]], key: str, options: tuple[str, ...],
            default: str, name: str) -> str:
    if key not in entries:
        return default
    value, lineno = entries[key]
    if value not in options:
        raise SpecError(f"{key} must be one of {', '.join(options)}", lineno, name)
    return value


def _cost(value: str, lineno: int, name: str) -> CostModel:
    try:
        return CostModel.parse(value)
    except ValueError as exc:
        raise SpecError(str(exc), lineno, name) from None


def _grid(entries: dict[str, tuple[str, int]], name: str) -> TimeGrid:
    delta = _int(entries, "delta", name)
    if delta <= 0:
        raise SpecError("delta must be a positive integer", entries["delta"][1], name)
    lo, hi = _int(entries, "theta_min", name), _int(entries, "theta_max", name)
    if lo > hi:
        raise SpecError("theta_min exceeds theta_max", entries["theta_max"][1], name)
    return TimeGrid.from_ticks(lo, hi, delta)


@dataclass(frozen=True)
class ScenarioFile:
    scenario: Scenario
    cost: CostModel = QUADRATIC
    separation: str = FCFS_COMPATIBLE
    source: str = TABLE1

    @classmethod
    def parse(cls, text: str, name: str = "<input>") -> ScenarioFile:
        entries = parse_key_values(text, REQUIRED_KEYS + OPTIONAL_KEYS, name)
        missing = [k for k in REQUIRED_KEYS if k not in entries]
        if missing:
            raise SpecError(f"missing required keys: {', '.join(missing)}", None, name)
        grid = _grid(entries, name)
        dt = _int(entries, "dt", name)
        if dt <= 0 or dt % 2:
            raise SpecError("dt must be a positive even number of ticks", entries["dt"][1], name)
        profiles = []
        for k in (1, 2):
            e, d = _int(entries, f"e{k}", name), _int(entries, f"d{k}", name)
            if e > d:
                raise SpecError(f"e{k} exceeds d{k}", entries[f"d{k}"][1], name)
            for key, v in ((f"e{k}", e), (f"d{k}", d)):
                if not grid.contains(GridTime.ticks(v)):
                    raise SpecError(f"{key}={v} lies outside [theta_min, theta_max]",
                                    entries[key][1], name)
            profiles.append(AgentProfile(GridTime.ticks(e), GridTime.ticks(d)))
        scenario = Scenario(grid, GridTime.ticks(dt), *profiles)
        cost = _cost(*entries["cost"], name) if "cost" in entries else QUADRATIC
        return cls(scenario, cost,
                   _choice(entries, "separation", SEPARATION_MODES, FCFS_COMPATIBLE, name),
                   _choice(entries, "source", SOURCES[:2], TABLE1, name))

    @classmethod
    def load(cls, path: Union[str, Path]) -> ScenarioFile:
        path = Path(path)
        return cls.parse(path.read_text(encoding="utf-8"), str(path))


def format_scenario(scenario: Scenario, **extra: str) -> str:
    """Render a scenario as a file that :meth:`ScenarioFile.parse` accepts."""
    g = scenario.grid
    if g.delta.denominator != 1:
        raise ValueError("scenario files carry an integer delta")
    a, b = scenario.agent1, scenario.agent2
    lines = [f"delta = {g.delta}", f"theta_min = {format_ticks(g.lower)}",
             f"theta_max = {format_ticks(g.upper)}", f"dt = {format_ticks(scenario.crossing)}",
             f"e1 = {format_ticks(a.earliest)}", f"d1 = {format_ticks(a.desired)}",
             f"e2 = {format_ticks(b.earliest)}", f"d2 = {format_ticks(b.desired)}"]
    lines += [f"{k} = {v}" for k, v in extra.items()]
    return "\n".join(lines) + "\n"


# -- sweep specs --------------------------------------------------------------

_WHERE_NAMES = ("dt", "e1", "d1", "e2", "d2", "theta_min", "theta_max")
_WHERE_CALLS = {"min": min, "max": max, "abs": abs}
_WHERE_NODES = (ast.Expression, ast.BoolOp, ast.And, ast.Or, ast.UnaryOp, ast.Not,
                ast.USub, ast.UAdd, ast.BinOp, ast.Add, ast.Sub, ast.Mult, ast.Div,
                ast.Mod, ast.FloorDiv, ast.Compare, ast.Eq, ast.NotEq, ast.Lt, ast.LtE,
                ast.Gt, ast.GtE, ast.Name, ast.Load, ast.Constant, ast.Call)


def compile_where(text: str, lineno: Optional[int] = None,
                  name: str = "<input>") -> Callable[[dict[str, Fraction]], bool]:
    """Compile a filter expression over the tick-valued names dt, e1, d1, e2, d2.

    Only arithmetic, comparisons, boolean operators and min/max/abs are allowed.
    Division is exact.
    """
    try:
        tree = ast.parse(text, mode="eval")
    except SyntaxError as exc:
        raise SpecError(f"bad where expression: {exc.msg}", lineno, name) from None
    for node in ast.walk(tree):
        if not isinstance(node, _WHERE_NODES):
            raise SpecError(f"where: {type(node).__name__} is not allowed", lineno, name)
        if isinstance(node, ast.Name) and node.id not in _WHERE_NAMES + tuple(_WHERE_CALLS):
            raise SpecError(f"where: unknown name {node.id!r}", lineno, name)
        if isinstance(node, ast.Constant) and (type(node.value) is not int):
            raise SpecError("where: only integer constants are allowed", lineno, name)
        if isinstance(node, ast.Call) and (not isinstance(node.func, ast.Name)
                                           or node.func.id not in _WHERE_CALLS
                                           or node.keywords):
            raise SpecError("where: only min, max and abs may be called", lineno, name)
    code = compile(tree, name, "eval")

    def check(values: dict[str, Fraction]) -> bool:
        env = {"__builtins__": {}, **_WHERE_CALLS, **values}
        return bool(eval(code, env))  # noqa: S307 - tree is whitelisted above

    return check


def _range(value: str, lineno: int, name: str) -> tuple[int, ...]:
    """``a..b`` (inclusive), a comma list, or a single integer."""
    try:
        if ".." in value:
            lo, hi = (int(v) for v in value.split("..", 1))
        else:
            return tuple(sorted({int(v) for v in value.split(",")}))
    except ValueError:
        raise SpecError(f"bad integer range {value!r}", lineno, name) from None
    if lo > hi:
        raise SpecError(f"empty range {value!r}", lineno, name)
    return tuple(range(lo, hi + 1))


@dataclass(frozen=True)
class SweepSpec:
    grid: TimeGrid
    dts: tuple[int, ...]
    ranges: dict[str, tuple[int, ...]]
    costs: tuple[CostModel, ...] = (QUADRATIC,)
    separation: str = FCFS_COMPATIBLE
    source: str = TABLE1
    sp: bool = True
    where: Optional[str] = None
    _filter: Optional[Callable[[dict[str, Fraction]], bool]] = field(
        default=None, compare=False, repr=False)

    @classmethod
    def parse(cls, text: str, name: str = "<input>") -> SweepSpec:
        entries = parse_key_values(text, SWEEP_KEYS, name)
        for key in ("delta", "theta_min", "theta_max", "dt"):
            if key not in entries:
                raise SpecError(f"missing required key {key!r}", None, name)
        grid = _grid(entries, name)
        lo, hi = int(grid.lower) // 2, int(grid.upper) // 2
        dts = _range(*entries["dt"], name)
        if any(dt <= 0 or dt % 2 for dt in dts):
            raise SpecError("every dt must be a positive even number of ticks",
                            entries["dt"][1], name)
        ranges = {}
        for key in ("e1", "d1", "e2", "d2"):
            values = _range(*entries[key], name) if key in entries else tuple(range(lo, hi + 1))
            if any(v < lo or v > hi for v in values):
                raise SpecError(f"{key} range leaves [theta_min, theta_max]",
                                entries[key][1], name)
            ranges[key] = values
        costs: tuple[CostModel, ...] = (QUADRATIC,)
        if "cost" in entries:
            value, lineno = entries["cost"]
            costs = tuple(_cost(v.strip(), lineno, name) for v in value.split(","))
            if len(set(costs)) != len(costs):
                raise SpecError("cost models repeat", lineno, name)
        sp = True
        if "sp" in entries:
            value, lineno = entries["sp"]
            if value not in ("on", "off"):
                raise SpecError("sp must be on or off", lineno, name)
            sp = value == "on"
        where = entries["where"][0] if "where" in entries else None
        check = compile_where(where, entries["where"][1], name) if where else None
        return cls(grid, dts, ranges, costs,
                   _choice(entries, "separation", SEPARATION_MODES, FCFS_COMPATIBLE, name),
                   _choice(entries, "source", SOURCES[:2], TABLE1, name),
                   sp, where, check)

    @classmethod
    def load(cls, path: Union[str, Path]) -> SweepSpec:
        path = Path(path)
        return cls.parse(path.read_text(encoding="utf-8"), str(path))

    def _accept(self, dt: int, e1: int, d1: int, e2: int, d2: int) -> bool:
        if e1 > d1 or e2 > d2:
            return False
        if self._filter is None:
            return True
        values = dict(dt=dt, e1=e1, d1=d1, e2=e2, d2=d2,
                      theta_min=int(self.grid.lower) // 2, theta_max=int(self.grid.upper) // 2)
        return self._filter({k: Fraction(v) for k, v in values.items()})

    def tick_profiles(self) -> Iterator[tuple[int, int, int, int, int]]:
        """(dt, e1, d1, e2, d2) in sweep order, filters applied."""
        r = self.ranges
        for dt in self.dts:
            for e1, d1, e2, d2 in itertools.product(r["e1"], r["d1"], r["e2"], r["d2"]):
                if self._accept(dt, e1, d1, e2, d2):
                    yield dt, e1, d1, e2, d2

    def scenarios(self) -> Iterator[Scenario]:
        for dt, e1, d1, e2, d2 in self.tick_profiles():
            yield Scenario(self.grid, GridTime.ticks(dt),
                           AgentProfile(GridTime.ticks(e1), GridTime.ticks(d1)),
                           AgentProfile(GridTime.ticks(e2), GridTime.ticks(d2)))

    def cardinality(self) -> int:
        return sum(1 for _ in self.tick_profiles())
