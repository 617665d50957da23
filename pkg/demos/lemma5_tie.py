"""The equal-report fallback for the Lemma 5 case, checked against brute force.

Agent 2 cannot pass at time 0, yet the fallback asks both agents to report 0. Half
the time the coin sends agent 2 first, before its earliest time, so the pair is not
playable and is absent from the oracle set.
"""
from intersection_game import (Scenario, classify, closed_form_equilibria, fcfs_allocate,
                               nash_oracle, verify_soundness)

s = Scenario.from_ticks(2, (0, 1), (0, 1), lower=0, upper=12)
claimed = closed_form_equilibria(s)
print(s.describe(), classify(s))
print("claimed", claimed)
for pair in claimed:
    print(" ", pair, "->", fcfs_allocate(s, pair))
print("oracle ", nash_oracle(s))
for row in verify_soundness(s).soundness_violations:
    print("violation:", row.detail)
