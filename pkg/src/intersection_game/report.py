"""Structured differences between closed-form answers and brute-force answers."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .fcfs import Scenario
from .payoff import CostValue

# Known inconsistencies in the published formulas: archived, never fatal.
KNOWN_KINDS = frozenset({"theorem1-row1", "social-case-iii"})

ROW_HEADER = ("kind", "scenario", "case", "closed_form", "oracle",
              "closed_cost", "oracle_cost", "detail")


@dataclass(frozen=True)
class Discrepancy:
    kind: str
    scenario: Scenario
    case: str
    closed_form: str
    oracle: str
    closed_cost: Optional[CostValue] = None
    oracle_cost: Optional[CostValue] = None
    detail: str = ""

    @property
    def known(self) -> bool:
        return self.kind in KNOWN_KINDS

    def row(self) -> tuple[str, ...]:
        def fmt(c: Optional[CostValue]) -> str:
            return "" if c is None else str(c)
        return (self.kind, self.scenario.describe(), self.case, self.closed_form,
                self.oracle, fmt(self.closed_cost), fmt(self.oracle_cost), self.detail)


@dataclass
class DiscrepancyReport:
    """Discrepancies (``rows``) plus informational findings (``notes``)."""

    scenario: Scenario
    case: str
    rows: list[Discrepancy] = field(default_factory=list)
    notes: list[Discrepancy] = field(default_factory=list)
    oracle_empty: bool = False

    def of_kind(self, *kinds: str) -> list[Discrepancy]:
        return [r for r in self.rows if r.kind in kinds]

    @property
    def soundness_violations(self) -> list[Discrepancy]:
        return self.of_kind("lemma-soundness")

    @property
    def completeness_gaps(self) -> list[Discrepancy]:
        return [n for n in self.notes if n.kind == "completeness"]

    @property
    def unexpected(self) -> list[Discrepancy]:
        return [r for r in self.rows if not r.known]

    @property
    def is_clean(self) -> bool:
        return not self.rows and not self.oracle_empty

    def merge(self, other: DiscrepancyReport) -> DiscrepancyReport:
        self.rows.extend(other.rows)
        self.notes.extend(other.notes)
        self.oracle_empty = self.oracle_empty or other.oracle_empty
        return self
