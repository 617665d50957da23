"""Command-line front end.

Single-scenario commands read a ``key = value`` scenario file; ``sweep`` reads a
sweep spec.  Tables go to standard output as CSV, with times in ticks.
"""
from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import replace
from pathlib import Path
from typing import Optional, Sequence, TextIO

from .equilibrium import (EquilibriumSet, admissible, classify, closed_form_equilibria,
                          nash_oracle)
from .fcfs import (AllocationLottery, ReportPair, Scenario, fcfs_allocate, is_feasible,
                   lottery_is_feasible)
from .mechanism import (BASELINE, SOURCES, MechanismError, run_direct_mechanism,
                        verify_strategy_proofness)
from .payoff import CostModel, expected_agent_cost, social_cost
from .report import ROW_HEADER
from .scenario_io import ScenarioFile, SpecError, SweepSpec
from .social import (SEPARATION_MODES, closed_form_social_cases, crosscheck, is_conflicting,
                     select_social_equilibrium, social_case, socially_optimal_allocation,
                     theorem1_premise, theorem1_row)
from .sweep import run_sweep, write_archive
from .time_grid import format_ticks

DEFAULT_MAX_SWEEP = 100_000
REGION_TAGS = ("feasible", "equilibrium", "optimal", "selected")


class Settings:
    """Scenario-file values overridden by command-line flags."""

    def __init__(self, args: argparse.Namespace, sf: Optional[ScenarioFile] = None):
        self.cost = (CostModel.parse(args.cost) if args.cost
                     else (sf.cost if sf else CostModel.quadratic()))
        self.separation = args.separation or (sf.separation if sf else "fcfs")
        if args.baseline:
            self.source = BASELINE
        else:
            self.source = args.source or (sf.source if sf else "table1")


def _writer(out: TextIO) -> "csv._writer":
    return csv.writer(out, lineterminator="\n")


def _set(items) -> str:
    return "{" + ", ".join(str(x) for x in sorted(items)) + "}"


def _order_note(lottery: AllocationLottery) -> str:
    if not lottery.is_deterministic:
        return "tie lottery"
    return f"agent {lottery.only().first} first"


def _load(args: argparse.Namespace) -> tuple[ScenarioFile, Settings]:
    sf = ScenarioFile.load(args.file)
    return sf, Settings(args, sf)


# -- commands -----------------------------------------------------------------

def cmd_classify(args: argparse.Namespace, out: TextIO) -> int:
    sf, _ = _load(args)
    label = classify(sf.scenario)
    print(label, file=out)
    print(f"i = {label.i}", file=out)
    print(f"j = {label.j}", file=out)
    for p in label.predicates:
        print(f"predicate: {p}", file=out)
    return 0


def _equilibrium_rows(s: Scenario, cfg: Settings, method: str,
                      eqset: EquilibriumSet) -> list[tuple[str, ...]]:
    rows = []
    for pair in eqset:
        lot = fcfs_allocate(s, pair)
        c1 = expected_agent_cost(cfg.cost, lot, s.agent1, 1, s.grid.delta)
        c2 = expected_agent_cost(cfg.cost, lot, s.agent2, 2, s.grid.delta)
        rows.append((method, str(pair), str(lot), str(c1), str(c2),
                     str(social_cost(cfg.cost, lot, s)), _order_note(lot)))
    for a, b in sorted(eqset.off_grid):
        rows.append((method, f"({format_ticks(a)},{format_ticks(b)})", "", "", "", "",
                     "off grid"))
    return rows


def cmd_equilibria(args: argparse.Namespace, out: TextIO) -> int:
    sf, cfg = _load(args)
    s = sf.scenario
    w = _writer(out)
    w.writerow(("method", "reports", "allocation", "cost1", "cost2", "social", "note"))
    closed = closed_form_equilibria(s) if args.method in ("closed", "both") else None
    oracle = nash_oracle(s, cfg.cost) if args.method in ("oracle", "both") else None
    if closed is not None:
        w.writerows(_equilibrium_rows(s, cfg, "closed", closed))
    if oracle is not None:
        w.writerows(_equilibrium_rows(s, cfg, "oracle", oracle))
    if closed is None or oracle is None:
        return 0
    print("# diff", file=out)
    w.writerow(("side", "reports"))
    unsound = sorted(closed.pairs - oracle.pairs)
    for pair in unsound:
        w.writerow(("closed-only", str(pair)))
    for a, b in sorted(closed.off_grid):
        w.writerow(("closed-only", f"({format_ticks(a)},{format_ticks(b)})"))
    for pair in sorted(oracle.pairs - closed.pairs):
        w.writerow(("oracle-only", str(pair)))
    # missing oracle pairs are informational; unsound closed-form pairs are not
    return 1 if unsound or closed.off_grid else 0


def cmd_social(args: argparse.Namespace, out: TextIO) -> int:
    sf, cfg = _load(args)
    s, model = sf.scenario, cfg.cost
    opt = socially_optimal_allocation(s, model, cfg.separation)
    print(f"separation = {cfg.separation}", file=out)
    print(f"optimum_argmin = {_set(opt.argmin_set)}", file=out)
    print(f"optimum = {opt.lottery}", file=out)
    print(f"optimum_cost = {opt.cost}", file=out)
    if is_conflicting(s):
        formula = closed_form_social_cases(s, model)
        print(f"closed_form_case = {social_case(s)}", file=out)
        print(f"closed_form_optimum = {formula.lottery}", file=out)
        print(f"closed_form_cost = {formula.cost}", file=out)
    else:
        print("closed_form_case = none (no conflict)", file=out)
    eqset = nash_oracle(s, model)
    if len(eqset) == 0:
        print("selected = none (empty equilibrium set)", file=out)
        return 1
    pair, lottery, diag = select_social_equilibrium(s, model, eqset, cfg.separation, opt)
    print(f"selected_reports = {pair}", file=out)
    print(f"selected_allocation = {lottery}", file=out)
    print(f"selected_cost = {social_cost(model, lottery, s)}", file=out)
    print(f"epsilon = {'-' if diag.epsilon is None else format_ticks(diag.epsilon)}", file=out)
    print(f"sigma = {'-' if diag.sigma is None else format_ticks(diag.sigma)}", file=out)
    print(f"achieved_optimal = {str(diag.achieved_optimal).lower()}", file=out)
    row, alloc = theorem1_row(s)
    claimed = "claimed" if theorem1_premise(s, model, eqset) else "not claimed"
    print(f"theorem1 = row {row}: {alloc} ({claimed})", file=out)
    report = crosscheck(s, model, eqset)
    print("# discrepancies", file=out)
    w = _writer(out)
    w.writerow(ROW_HEADER)
    w.writerows(r.row() for r in report.rows)
    return 1 if report.unexpected or report.oracle_empty else 0


def cmd_mechanism(args: argparse.Namespace, out: TextIO) -> int:
    sf, cfg = _load(args)
    try:
        outcome = run_direct_mechanism(sf.scenario, cfg.source, cfg.cost)
    except MechanismError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"case = {outcome.case}", file=out)
    print(f"source = {outcome.source}", file=out)
    print(f"reports = {outcome.assigned}", file=out)
    print(f"allocation = {outcome.allocation}", file=out)
    print(f"order = {_order_note(outcome.allocation)}", file=out)
    feasible = lottery_is_feasible(sf.scenario, outcome.allocation)
    print(f"feasible = {str(feasible).lower()}", file=out)
    return 0


def cmd_verify_sp(args: argparse.Namespace, out: TextIO) -> int:
    sf, cfg = _load(args)
    try:
        report = verify_strategy_proofness(sf.scenario, cfg.cost, cfg.source)
    except MechanismError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    w = _writer(out)
    w.writerow(("agent", "true_profile", "reported_profile", "truthful_cost",
                "deviating_cost"))
    w.writerows(v.row() for v in report.violations)
    print(f"violations = {report.violation_count} (source={cfg.source}, cost={cfg.cost.name})",
          file=sys.stderr)
    if report.truthful_infeasible:
        agents = ",".join(str(k) for k in report.truthful_infeasible)
        print(f"truthful outcome misses an earliest time for agent {agents}", file=sys.stderr)
    return 0 if report.violation_count == 0 else 1


def region_rows(s: Scenario, model: CostModel, separation: str = "fcfs"
                ) -> list[tuple[str, str, str]]:
    """Tagged allocation points: images of admissible report pairs plus the optimum."""
    times = s.grid.enumerate()
    tags: dict = {}

    def tag(alloc, name: str) -> None:
        tags.setdefault(alloc, set()).add(name)

    for r1 in times:
        for r2 in times:
            if admissible(s, 1, r1, r2) and admissible(s, 2, r2, r1):
                for a in fcfs_allocate(s, ReportPair(r1, r2)).allocations:
                    tags.setdefault(a, set())
    eqset = nash_oracle(s, model)
    for pair in eqset:
        for a in fcfs_allocate(s, pair).allocations:
            tag(a, "equilibrium")
    opt = socially_optimal_allocation(s, model, separation)
    for a in opt.argmin_set | set(opt.lottery.allocations):
        tag(a, "optimal")
    if len(eqset):
        _, lottery, _ = select_social_equilibrium(s, model, eqset, separation, opt)
        for a in lottery.allocations:
            tag(a, "selected")
    for a in tags:
        if is_feasible(s, a):
            tag(a, "feasible")
    return [(format_ticks(a.t1), format_ticks(a.t2),
             "+".join(t for t in REGION_TAGS if t in names))
            for a, names in sorted(tags.items())]


def cmd_region(args: argparse.Namespace, out: TextIO) -> int:
    sf, cfg = _load(args)
    w = _writer(out)
    w.writerow(("t1", "t2", "tags"))
    w.writerows(region_rows(sf.scenario, cfg.cost, cfg.separation))
    return 0


def cmd_sweep(args: argparse.Namespace, out: TextIO) -> int:
    text = Path(args.file).read_text(encoding="utf-8")
    spec = SweepSpec.parse(text, args.file)
    if args.cost:
        spec = replace(spec, costs=tuple(CostModel.parse(c) for c in args.cost.split(",")))
    if args.separation:
        spec = replace(spec, separation=args.separation)
    if args.baseline or args.source:
        spec = replace(spec, source=BASELINE if args.baseline else args.source)
    n = spec.cardinality()
    print(f"cardinality = {n} scenarios x {len(spec.costs)} cost models", file=out)
    out.flush()
    limit = DEFAULT_MAX_SWEEP if args.max_sweep is None else args.max_sweep
    if n > limit:
        print(f"error: sweep of {n} scenarios exceeds --max-sweep {limit}", file=sys.stderr)
        return 2
    result = run_sweep(spec)
    for line in result.summary_lines():
        print(line, file=out)
    if args.out:
        write_archive(result, args.out, text)
    return result.exit_code


# -- entry point ----------------------------------------------------------------

def _global_flags(p: argparse.ArgumentParser, default) -> None:
    p.add_argument("--cost", default=default,
                   help="cost model: quadratic or power:<p> (comma list for sweep)")
    p.add_argument("--separation", choices=SEPARATION_MODES, default=default,
                   help="spacing for the social optimum (default fcfs)")
    p.add_argument("--source", choices=SOURCES[:2], default=default,
                   help="mechanism report source (default table1)")
    p.add_argument("--baseline", action="store_true", default=default,
                   help="run plain FCFS on desired times instead of the mechanism")
    p.add_argument("--max-sweep", type=int, default=default,
                   help=f"refuse sweeps above this many scenarios (default {DEFAULT_MAX_SWEEP})")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="intersection-game",
        description="Two-agent FCFS intersection game: equilibria, social optimum, mechanism.")
    _global_flags(parser, None)
    sub = parser.add_subparsers(dest="command", required=True)
    commands = {
        "classify": (cmd_classify, "print the case label and fired predicates"),
        "equilibria": (cmd_equilibria, "list closed-form and/or brute-force equilibria"),
        "social": (cmd_social, "social optimum, selected equilibrium and diagnostics"),
        "mechanism": (cmd_mechanism, "reports the direct mechanism plays"),
        "verify-sp": (cmd_verify_sp, "search all misreports for profitable deviations"),
        "region": (cmd_region, "tagged allocation points for plotting"),
        "sweep": (cmd_sweep, "run a sweep spec and archive every discrepancy"),
    }
    for name, (func, help_text) in commands.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("file", help="sweep spec" if name == "sweep" else "scenario file")
        _global_flags(p, argparse.SUPPRESS)
        if name == "equilibria":
            p.add_argument("--method", choices=("closed", "oracle", "both"), default="both")
        if name == "sweep":
            p.add_argument("--out", help="directory for the archive files")
        p.set_defaults(func=func)
    return parser


def main(argv: Optional[Sequence[str]] = None, out: Optional[TextIO] = None) -> int:
    args = build_parser().parse_args(argv)
    out = sys.stdout if out is None else out
    try:
        return args.func(args, out)
    except SpecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
