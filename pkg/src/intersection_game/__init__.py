"""Two-agent first-come-first-serve intersection game.

Times are integer half-ticks (see :mod:`.time_grid`); every closed form in the
package has a brute-force counterpart it is checked against.
"""
from .equilibrium import (CaseKind, CaseLabel, EquilibriumSet, OverConstrained, admissible,
                          best_responses, classify, closed_form_equilibria, is_equilibrium,
                          nash_oracle, roles, verify_soundness)
from .fcfs import (AgentProfile, Allocation, AllocationLottery, MalformedReport, ReportPair,
                   Scenario, agent_can_meet, fcfs_allocate, is_feasible, lottery_is_feasible)
from .mechanism import (BASELINE, ORACLE, TABLE1, MechanismError, MechanismOutcome,
                        ReportLottery, SPReport, compare_sources, run_direct_mechanism,
                        table1_assign, verify_strategy_proofness)
from .payoff import QUADRATIC, QUARTIC, CostModel, CostValue, agent_cost, social_cost
from .report import KNOWN_KINDS, Discrepancy, DiscrepancyReport
from .scenario_io import ScenarioFile, SpecError, SweepSpec
from .social import (FCFS_COMPATIBLE, EQ4_SEPARATION, SelectionDiagnostics,
                     SociallyOptimalAllocation, TheoremPremiseError, closed_form_social_cases,
                     closed_form_theorem1, crosscheck, select_social_equilibrium,
                     socially_optimal_allocation)
from .sweep import SweepResult, run_sweep, write_archive
from .time_grid import GridTime, TimeGrid, format_ticks, tick

__version__ = "0.1.0"
