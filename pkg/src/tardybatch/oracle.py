"""Exact reference solvers for small instances.

``exhaustive_optimum`` uses the fact that the optimum equals n minus the
largest job set that can be batched and sequenced with every member on
time (tardy jobs are simply appended in trailing batches, and removing them
from shared batches never delays anyone). For a fixed on-time set the best
prefix is the one finishing earliest, so a DP over job subsets that keeps
the minimum completion time is exact. It examines every capacity-feasible
batch as a candidate last batch of every subset, 3^n pairs in total.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Sequence

from .errors import TooLarge
from .instance import BatchSchedule, Instance, evaluate

INF = float("inf")


@dataclass(frozen=True)
class OracleResult:
    optimum_tardy: int
    witness: BatchSchedule
    nodes_explored: int


def _subset_tables(instance: Instance):
    n = instance.n
    p, s, d = instance.p.tolist(), instance.s.tolist(), instance.d.tolist()
    size = [0] * (1 << n)
    pmax = [0] * (1 << n)
    dmin = [INF] * (1 << n)
    for mask in range(1, 1 << n):
        low = mask & -mask
        j = low.bit_length() - 1
        rest = mask ^ low
        size[mask] = size[rest] + s[j]
        pmax[mask] = max(pmax[rest], p[j])
        dmin[mask] = min(dmin[rest], d[j])
    return size, pmax, dmin


def exhaustive_optimum(instance: Instance, limit_n: int = 9) -> OracleResult:
    """Minimum number of tardy jobs, with an optimal schedule as witness."""
    n = instance.n
    if n > limit_n:
        raise TooLarge(f"instance has {n} jobs; exhaustive search is limited to {limit_n}")
    cap = instance.capacity
    size, pmax, dmin = _subset_tables(instance)
    full = (1 << n) - 1
    # finish[mask]: earliest completion of an all-on-time schedule of mask
    finish = [INF] * (1 << n)
    last = [0] * (1 << n)
    finish[0] = 0
    nodes = 0
    for mask in range(1, full + 1):
        best = INF
        arg = 0
        sub = mask
        while sub:
            nodes += 1
            if size[sub] <= cap:
                prev = finish[mask ^ sub]
                if prev != INF:
                    c = prev + pmax[sub]
                    if c <= dmin[sub] and c < best:
                        best = c
                        arg = sub
            sub = (sub - 1) & mask
        finish[mask] = best
        last[mask] = arg
    on_time = max((m for m in range(full + 1) if finish[m] != INF), key=lambda m: (bin(m).count("1"), -m))
    batches = []
    m = on_time
    while m:
        batches.append(last[m])
        m ^= last[m]
    batches.reverse()
    ids = instance.ids
    groups = [[ids[j] for j in range(n) if b >> j & 1] for b in batches]
    # remaining jobs: first-fit into trailing batches
    tail: list[list[int]] = []
    loads: list[int] = []
    for j in range(n):
        if on_time >> j & 1:
            continue
        sj = int(instance.s[j])
        for t, load in enumerate(loads):
            if load + sj <= cap:
                tail[t].append(ids[j])
                loads[t] += sj
                break
        else:
            tail.append([ids[j]])
            loads.append(sj)
    witness, summary = evaluate(instance, groups + tail)
    optimum = n - bin(on_time).count("1")
    assert summary.tardy_count == optimum
    return OracleResult(optimum, witness, nodes)


def moore_hodgson(jobs: Sequence[tuple[int, int]]) -> tuple[list[int], list[int], int]:
    """Optimal 1||sum U_j: EDD order, dropping the longest job so far
    whenever the current one would finish late.

    ``jobs`` holds (p, d) pairs; returns (on-time indices in processing
    order, tardy indices sorted, tardy count). Indices are 0-based.

    >>> moore_hodgson([(4, 4), (3, 6), (2, 7)])
    ([1, 2], [0], 1)
    """
    order = sorted(range(len(jobs)), key=lambda i: (jobs[i][1], i))
    heap: list[tuple[int, int]] = []  # (-p, index)
    t = 0
    late = []
    for i in order:
        p, d = jobs[i]
        if p <= 0 or d <= 0:
            raise ValueError("processing times and due dates must be positive")
        heapq.heappush(heap, (-p, i))
        t += p
        if t > d:
            neg_p, k = heapq.heappop(heap)
            t += neg_p
            late.append(k)
    kept = set(i for _, i in heap)
    on_time = [i for i in order if i in kept]
    return on_time, sorted(late), len(late)


def singleton_reduction_check(instance: Instance) -> bool:
    """True when no two jobs fit in one batch, so every batch is a single
    job and Moore-Hodgson is exact."""
    sizes = sorted(int(x) for x in instance.s)
    return len(sizes) < 2 or sizes[0] + sizes[1] > instance.capacity


def golden_record(instance: Instance, result: OracleResult) -> dict:
    return {
        "instance": instance.fingerprint(),
        "optimum_tardy": result.optimum_tardy,
        "witness": [list(b) for b in result.witness.batches],
    }
