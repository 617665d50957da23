"""Walk the three worked scenarios through classification, equilibria and selection."""
from intersection_game import (QUADRATIC, Scenario, classify, closed_form_equilibria,
                               fcfs_allocate, nash_oracle, select_social_equilibrium,
                               socially_optimal_allocation)

SCENARIOS = {
    "S1": Scenario.from_ticks(4, (0, 0), (8, 10)),
    "S2": Scenario.from_ticks(4, (9, 10), (10, 10)),
    "S3": Scenario.from_ticks(4, (9, 5), (9, 10)),
}

for name, s in SCENARIOS.items():
    print(f"== {name}: {s.describe()}")
    print(f"case           {classify(s)}")
    oracle = nash_oracle(s, QUADRATIC)
    print(f"closed form    {closed_form_equilibria(s)}")
    print(f"oracle         {oracle}")
    for pair in oracle:
        print(f"  {pair} -> {fcfs_allocate(s, pair)}")
    opt = socially_optimal_allocation(s)
    pair, lottery, diag = select_social_equilibrium(s, QUADRATIC, oracle)
    print(f"optimum        {opt.lottery} (cost {opt.cost})")
    print(f"selected       {pair} -> {lottery}, optimal reached: {diag.achieved_optimal}")
    print()
