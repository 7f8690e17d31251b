"""Check heuristic answers against exact methods on small instances.

Run: python3 demos/oracle_and_milp.py
"""
from tardybatch import (
    GenConfig, GraspConfig, build_model, exhaustive_optimum, generate, moore_hodgson, singleton_reduction_check,
    solve,
)
from tardybatch.milp import encode_schedule

print("GRASP against the exact subset search, eight jobs each:")
for seed in range(6):
    inst = generate(GenConfig(n=8, gamma=(0.2, 0.33, 0.5)[seed % 3], seed=seed))
    exact = exhaustive_optimum(inst)
    found = solve(inst, GraspConfig(max_iters=100, pr_iters=100, seed=seed)).tardy_count
    print(f"  seed {seed}: optimum {exact.optimum_tardy}, GRASP {found}, subsets examined {exact.nodes_explored}")

print("\nWith sizes of 21 or more no two jobs share a batch, and Moore-Hodgson is exact:")
for seed in range(4):
    inst = generate(GenConfig(n=9, size_range=(21, 30), seed=seed))
    assert singleton_reduction_check(inst)
    mh = moore_hodgson([(j.p, j.d) for j in inst.jobs])[2]
    print(f"  seed {seed}: Moore-Hodgson {mh}, subset search {exhaustive_optimum(inst).optimum_tardy}")

print("\nThe optimal schedule plugged into the MILP satisfies every row:")
inst = generate(GenConfig(n=6, seed=11))
model = build_model(inst)
exact = exhaustive_optimum(inst)
values = encode_schedule(model, exact.witness)
print(f"  {len(model.rows)} rows, {len(model.violated_rows(values))} violated, "
      f"objective {model.objective_value(values):.0f} = optimum {exact.optimum_tardy}")
