"""Full-grid sweeps that cross-check every closed form and archive the differences."""
from __future__ import annotations

import csv
import io
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional, Union

from .equilibrium import classify, closed_form_equilibria, nash_oracle, verify_soundness
from .mechanism import (TABLE1, MechanismError, compare_sources, mechanism_for, run_direct_mechanism,
                        verify_strategy_proofness)
from .payoff import social_cost
from .report import KNOWN_KINDS, ROW_HEADER, Discrepancy
from .scenario_io import SweepSpec
from .social import crosscheck, select_social_equilibrium, socially_optimal_allocation
from .time_grid import format_ticks

SCENARIO_HEADER = ("dt", "e1", "d1", "e2", "d2", "cost", "case", "i", "oracle_size",
                   "closed_size", "oracle", "closed", "optimum", "optimum_cost",
                   "selected_reports", "selected_allocation", "selected_cost", "epsilon",
                   "achieved_optimal", "mechanism_reports", "mechanism_allocation",
                   "sp_violations")
SP_HEADER = ("scenario", "source", "cost", "agent", "true_profile", "reported_profile",
             "truthful_cost", "deviating_cost")
ARCHIVE_FILES = ("scenarios.csv", "discrepancies.csv", "notes.csv", "sp.csv", "summary.txt")


@dataclass
class SweepResult:
    scenario_count: int = 0
    evaluations: int = 0
    proposition1_failures: int = 0
    completeness_gaps: int = 0
    discrepancies: Counter = field(default_factory=Counter)
    notes: Counter = field(default_factory=Counter)
    sp_scenarios: int = 0
    sp_violations: int = 0
    sp_scenarios_with_violations: int = 0
    sp_truthful_infeasible: int = 0
    equilibrium_set_cost_dependence: int = 0
    argmin_cost_dependence: int = 0
    scenario_rows: list[tuple[str, ...]] = field(default_factory=list)
    discrepancy_rows: list[tuple[str, ...]] = field(default_factory=list)
    note_rows: list[tuple[str, ...]] = field(default_factory=list)
    sp_rows: list[tuple[str, ...]] = field(default_factory=list)

    @property
    def soundness_violations(self) -> int:
        return self.discrepancies["lemma-soundness"]

    @property
    def unexpected_kinds(self) -> list[str]:
        return sorted(k for k in self.discrepancies if k not in KNOWN_KINDS)

    @property
    def unexpected(self) -> int:
        return sum(n for k, n in self.discrepancies.items() if k not in KNOWN_KINDS)

    @property
    def ok(self) -> bool:
        return self.proposition1_failures == 0 and self.unexpected == 0

    @property
    def exit_code(self) -> int:
        return 0 if self.ok else 1

    def summary_lines(self) -> list[str]:
        lines = [f"scenarios = {self.scenario_count}",
                 f"evaluations = {self.evaluations}",
                 f"proposition1_failures = {self.proposition1_failures}",
                 f"soundness_violations = {self.soundness_violations}",
                 f"completeness_gaps = {self.completeness_gaps}"]
        lines += [f"discrepancies[{k}] = {n}" for k, n in sorted(self.discrepancies.items())]
        lines += [f"notes[{k}] = {n}" for k, n in sorted(self.notes.items())]
        lines += [f"unexpected_discrepancies = {self.unexpected}",
                  f"unexpected_kinds = {','.join(self.unexpected_kinds) or '-'}",
                  f"sp_scenarios = {self.sp_scenarios}",
                  f"sp_violations = {self.sp_violations}",
                  f"sp_scenarios_with_violations = {self.sp_scenarios_with_violations}",
                  f"sp_truthful_infeasible = {self.sp_truthful_infeasible}",
                  f"equilibrium_set_cost_dependence = {self.equilibrium_set_cost_dependence}",
                  f"argmin_cost_dependence = {self.argmin_cost_dependence}",
                  f"status = {'ok' if self.ok else 'FAIL'}"]
        return lines


def _csv(header: tuple[str, ...], rows: list[tuple[str, ...]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def run_sweep(spec: SweepSpec, progress: Optional[Callable[[int], None]] = None) -> SweepResult:
    """Evaluate every scenario of a sweep spec under every cost model, in order.

    The table-versus-oracle mechanism comparison runs only when the sweep source
    is the table; strategy-proofness is checked under the first cost model.
    """
    res = SweepResult()
    sp_model = spec.costs[0]
    sp_mech = mechanism_for(spec.source, sp_model)

    def record(kind_counter: Counter, rows: list, items: list[Discrepancy]) -> None:
        for item in items:
            kind_counter[item.kind] += 1
            rows.append(item.row())

    for n, scenario in enumerate(spec.scenarios(), start=1):
        res.scenario_count += 1
        a, b = scenario.agent1, scenario.agent2
        ticks = tuple(format_ticks(t) for t in
                      (scenario.crossing, a.earliest, a.desired, b.earliest, b.desired))
        label = classify(scenario)
        closed = closed_form_equilibria(scenario)
        oracle_sets, argmins = [], []
        sp_count = ""
        if spec.sp:
            sp = verify_strategy_proofness(scenario, sp_model, spec.source, sp_mech)
            res.sp_scenarios += 1
            res.sp_violations += sp.violation_count
            res.sp_scenarios_with_violations += bool(sp.violations)
            res.sp_truthful_infeasible += bool(sp.truthful_infeasible)
            sp_count = str(sp.violation_count)
            for v in sp.violations:
                res.sp_rows.append((scenario.describe(), spec.source, sp_model.name, *v.row()))

        for model in spec.costs:
            res.evaluations += 1
            oracle = nash_oracle(scenario, model)
            oracle_sets.append(oracle.pairs)
            optimum = socially_optimal_allocation(scenario, model, spec.separation)
            argmins.append(optimum.argmin_set)
            sound = verify_soundness(scenario, model, oracle, closed)
            res.completeness_gaps += len(sound.completeness_gaps)
            record(res.discrepancies, res.discrepancy_rows, sound.rows)
            record(res.notes, res.note_rows, sound.notes)
            cross = crosscheck(scenario, model, oracle)
            record(res.discrepancies, res.discrepancy_rows, cross.rows)
            record(res.notes, res.note_rows, cross.notes)
            mech = compare_sources(scenario, model, oracle) if spec.source == TABLE1 else None
            if mech is not None:
                record(res.discrepancies, res.discrepancy_rows, mech.rows)

            sel = ("", "", "", "", "")
            if len(oracle) == 0:
                res.proposition1_failures += 1
            else:
                pair, lottery, diag = select_social_equilibrium(
                    scenario, model, oracle, spec.separation, optimum)
                eps = "-" if diag.epsilon is None else format_ticks(diag.epsilon)
                sel = (str(pair), str(lottery), str(social_cost(model, lottery, scenario)),
                       eps, str(diag.achieved_optimal).lower())
            try:
                outcome = run_direct_mechanism(scenario, spec.source, model)
                mech_cols = (str(outcome.assigned), str(outcome.allocation))
            except MechanismError as exc:
                mech_cols = ("unplayable", str(exc))
            res.scenario_rows.append((
                *ticks, model.name, str(label), str(label.i), str(len(oracle)),
                str(len(closed)), str(oracle), str(closed), str(optimum.lottery),
                str(optimum.cost), *sel, *mech_cols,
                sp_count if model is sp_model else ""))

        if len(spec.costs) > 1:
            res.equilibrium_set_cost_dependence += len(set(oracle_sets)) > 1
            res.argmin_cost_dependence += len(set(argmins)) > 1
        if progress is not None:
            progress(n)
    return res


def write_archive(result: SweepResult, out: Union[str, Path], spec_text: str = "") -> list[Path]:
    """Write the deterministic archive files; returns their paths."""
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    contents = {
        "scenarios.csv": _csv(SCENARIO_HEADER, result.scenario_rows),
        "discrepancies.csv": _csv(ROW_HEADER, result.discrepancy_rows),
        "notes.csv": _csv(ROW_HEADER, result.note_rows),
        "sp.csv": _csv(SP_HEADER, result.sp_rows),
        "summary.txt": "\n".join(result.summary_lines()) + "\n",
    }
    if spec_text:
        contents["spec.txt"] = spec_text
    paths = []
    for name, text in contents.items():
        path = out / name
        path.write_text(text, encoding="utf-8")
        paths.append(path)
    return paths
