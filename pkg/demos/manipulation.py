"""Show that truthful FCFS can be gamed, and count what the table mechanism leaves open."""
from intersection_game import (BASELINE, ORACLE, QUADRATIC, TABLE1, Scenario,
                               verify_strategy_proofness)

s1 = Scenario.from_ticks(4, (0, 0), (8, 10))

for source in (BASELINE, TABLE1, ORACLE):
    rep = verify_strategy_proofness(s1, QUADRATIC, source)
    print(f"{source:9s} {rep.violation_count} profitable misreports")
    for v in rep.violations[:3]:
        agent, true, fake, honest, cheat = v.row()
        print(f"    agent {agent}: true {true} reports {fake}, cost {honest} -> {cheat}")
