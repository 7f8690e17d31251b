"""Generate a random instance and watch GRASP and path relinking work on it.

Run: python3 demos/grasp_on_generated.py [n] [seed]
"""
import sys

from tardybatch import GenConfig, GraspConfig, generate, improvement_pct, solve
from tardybatch.grasp import best_construction_baseline

n = int(sys.argv[1]) if len(sys.argv) > 1 else 60
seed = int(sys.argv[2]) if len(sys.argv) > 2 else 3

inst = generate(GenConfig(n=n, gamma=0.5, seed=seed))
print(f"{n} jobs, capacity {inst.capacity}, due dates from {inst.d.min()} to {inst.d.max()}")

config = GraspConfig(max_iters=300, pr_iters=300, seed=seed)
baseline, _ = best_construction_baseline(inst, config)
print(f"best of the ten rule constructions: {baseline} tardy")

report = solve(inst, config)
print("first-iteration construction per rule:")
for rule, value in report.first_iteration.items():
    print(f"  {rule:<8} {value}")

print("\nincumbent whenever it improved:")
last = None
for rec in report.iteration_log:
    if rec.best_tardy != last:
        print(f"  {rec.phase:<15} iter {rec.iteration:>4}: {rec.best_tardy} tardy at {rec.elapsed_ms:8.1f} ms")
        last = rec.best_tardy

pct = improvement_pct(baseline, report.tardy_count)
print(f"\nconstruction {report.construction_best}, local search {report.local_search_best}, "
      f"path relinking {report.path_relinking_best}, final {report.tardy_count}")
print(f"improvement over the baseline: {'n/a' if pct is None else format(pct, '.1%')} in {report.elapsed:.1f} s")
