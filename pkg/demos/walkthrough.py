"""Walk through constructions and neighbourhood moves on two nine-job instances.

Run: python3 demos/walkthrough.py
"""
from tardybatch import Instance, Job, PriorityRule, classic_greedy, exhaustive_optimum, improved_greedy
from tardybatch.local_search import NEW_BATCH, batch_interchange, insert_a, insert_b, marked_jobs


def build(sizes, times, dues, capacity=40):
    return Instance(tuple(Job(i + 1, p=p, s=s, d=d) for i, (s, p, d) in enumerate(zip(sizes, times, dues))), capacity)


def show(label, sched):
    batches = " ".join("{" + ",".join(map(str, b)) + "}" for b in sched.batches)
    print(f"  {label:<28} {batches:<40} C={list(sched.completion_times)} tardy={sorted(sched.tardy)}")


clustered = build(
    sizes=[17, 13, 27, 7, 15, 14, 27, 2, 28],
    times=[19, 28, 44, 14, 16, 23, 37, 10, 43],
    dues=[36, 35, 32, 32, 34, 36, 36, 37, 36],
)
print("Nine jobs whose due dates all sit between 32 and 37.")
print("Jobs 3, 7 and 9 take longer than their due date, so they are late whatever we do.\n")

# the same RCL picks (0-based window index per step), decoded two ways
classic_picks = [2, 1, 0, 1, 2, 0, 2, 1, 0]
improved_picks = [1, 2, 1, 1, 0, 1, 2, 1, 0]
show("plain first-fit", classic_greedy(clustered, PriorityRule.EDD, 3, replay=classic_picks))
show("tardy-aware first-fit", improved_greedy(clustered, PriorityRule.EDD, 3, replay=improved_picks))
print(f"  exact optimum: {exhaustive_optimum(clustered).optimum_tardy} tardy\n")

moves = build(
    sizes=[37, 18, 5, 12, 9, 2, 10, 4, 25],
    times=[22, 4, 3, 2, 24, 50, 8, 5, 10],
    dues=[35, 10, 12, 21, 26, 15, 17, 36, 24],
)
print("A second instance where pure EDD first-fit makes every job late.")
start = classic_greedy(moves, PriorityRule.EDD, 1)
show("EDD, no randomization", start)
show("swap batches 1 and 2", batch_interchange(start, 0, 1))
show("longest job of batch 1 out", insert_a(start, 0, NEW_BATCH))
print(f"  jobs far above their batch's mean time: {sorted(marked_jobs(start))}")
show("move those to a new batch", insert_b(start))
print(f"  exact optimum: {exhaustive_optimum(moves).optimum_tardy} tardy")
