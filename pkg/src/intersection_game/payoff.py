"""Deviation costs, expected costs under lotteries, and the social cost."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from typing import Union

import numpy as np

from .fcfs import AgentProfile, Allocation, AllocationLottery, Scenario


@total_ordering
@dataclass(frozen=True, eq=False)
class CostValue:
    """A nonnegative cost.  ``exact`` is False when a float approximation was used."""

    value: Union[Fraction, float]
    exact: bool = True

    def __eq__(self, other: object) -> bool:
        if isinstance(other, CostValue):
            return self.value == other.value
        if isinstance(other, (int, float, Fraction)):
            return self.value == other
        return NotImplemented

    def __lt__(self, other: object) -> bool:
        if isinstance(other, CostValue):
            return self.value < other.value
        if isinstance(other, (int, float, Fraction)):
            return self.value < other
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.value)

    def __add__(self, other: CostValue) -> CostValue:
        return CostValue(self.value + other.value, self.exact and other.exact)

    def scale(self, weight: Fraction) -> CostValue:
        if self.exact:
            return CostValue(self.value * weight, True)
        return CostValue(self.value * float(weight), False)

    def __str__(self) -> str:
        if self.exact:
            return str(Fraction(self.value))
        return repr(float(self.value))


ZERO = CostValue(Fraction(0))


@dataclass(frozen=True)
class CostModel:
    """Strictly increasing, strictly convex deviation cost ``c(x) = x**p``, p > 1."""

    kind: str = "quadratic"
    exponent: Fraction = Fraction(2)

    def __post_init__(self) -> None:
        object.__setattr__(self, "exponent", Fraction(self.exponent))
        if self.kind not in ("quadratic", "power"):
            raise ValueError(f"unknown cost model {self.kind!r}")
        if self.kind == "quadratic" and self.exponent != 2:
            raise ValueError("the quadratic model has exponent 2")
        if self.exponent <= 1:
            raise ValueError("cost exponent must exceed 1 for strict convexity")

    @classmethod
    def quadratic(cls) -> CostModel:
        return cls("quadratic", Fraction(2))

    @classmethod
    def power(cls, p: int | Fraction | str) -> CostModel:
        return cls("power", Fraction(p))

    @classmethod
    def parse(cls, text: str) -> CostModel:
        """Parse ``quadratic`` or ``power:<p>`` (p an integer or ``a/b``)."""
        text = text.strip()
        if text == "quadratic":
            return cls.quadratic()
        name, sep, arg = text.partition(":")
        if name == "power" and sep:
            try:
                return cls.power(Fraction(arg))
            except (ValueError, ZeroDivisionError) as exc:
                raise ValueError(f"bad exponent in cost model {text!r}") from exc
        raise ValueError(f"unknown cost model {text!r}")

    @property
    def name(self) -> str:
        return "quadratic" if self.kind == "quadratic" else f"power:{self.exponent}"

    @property
    def is_exact(self) -> bool:
        return self.exponent.denominator == 1

    def __call__(self, deviation: Fraction | int) -> CostValue:
        """Cost of a deviation given in abstract time units."""
        x = abs(Fraction(deviation))
        if self.is_exact:
            return CostValue(x ** int(self.exponent))
        return CostValue(float(x) ** float(self.exponent), False)

    def of_half_ticks(self, half_ticks: int, delta: Fraction) -> CostValue:
        return self(Fraction(abs(int(half_ticks)), 2) * delta)

    def scaled(self, half_ticks: np.ndarray) -> np.ndarray:
        """Order-preserving cost in half-tick units, for vectorised search.

        Equals the true cost divided by ``(delta/2)**p``; integer dtype whenever
        the exponent is an integer so that ties are exact.
        """
        x = np.abs(np.asarray(half_ticks, dtype=np.int64))
        if self.is_exact:
            return x ** int(self.exponent)
        return x.astype(np.float64) ** float(self.exponent)

    def is_convex_on(self, max_half_ticks: int) -> bool:
        """Check c(0)=0, monotonicity and midpoint convexity on integer deviations."""
        xs = np.arange(max_half_ticks + 1)
        c = self.scaled(xs)
        if c[0] != 0 or not np.all(np.diff(c) > 0):
            return False
        for h in range(1, max_half_ticks // 2 + 1):
            mid = c[h:max_half_ticks + 1 - h]
            if not np.all(c[:len(mid)] + c[2 * h:2 * h + len(mid)] > 2 * mid):
                return False
        return True


QUADRATIC = CostModel.quadratic()
QUARTIC = CostModel.power(4)


def agent_cost(model: CostModel, allocation: Allocation, profile: AgentProfile,
               agent_index: int, delta: Fraction = Fraction(1)) -> CostValue:
    return model.of_half_ticks(allocation[agent_index] - profile.desired, delta)


def expected_agent_cost(model: CostModel, lottery: AllocationLottery, profile: AgentProfile,
                        agent_index: int, delta: Fraction = Fraction(1)) -> CostValue:
    if model.is_exact:
        # integer half-tick powers, rescaled once
        n = int(model.exponent)
        d = int(profile.desired)
        raw = sum(p * abs(int(a[agent_index]) - d) ** n for p, a in lottery)
        return CostValue(Fraction(raw) * (Fraction(delta) / 2) ** n)
    total = ZERO
    for p, a in lottery:
        total = total + agent_cost(model, a, profile, agent_index, delta).scale(p)
    return total


def social_cost(model: CostModel, allocation: Allocation | AllocationLottery,
                scenario: Scenario) -> CostValue:
    """Sum of both agents' costs, expectation-weighted for lotteries."""
    lottery = (allocation if isinstance(allocation, AllocationLottery)
               else AllocationLottery.certain(allocation))
    delta = scenario.grid.delta
    total = ZERO
    for k, prof in enumerate(scenario.profiles, start=1):
        total = total + expected_agent_cost(model, lottery, prof, k, delta)
    return total
