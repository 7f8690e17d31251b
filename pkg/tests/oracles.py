"""Independent reference computations for the test-suite.

Nothing here imports the package's solvers; only plain Python and scipy.
"""
from itertools import permutations

import numpy as np


def set_partitions(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]
        yield [[first]] + part


def simple_tardy(p, d, batches):
    t, late = 0, 0
    for b in batches:
        t += max(p[j] for j in b)
        late += sum(1 for j in b if t > d[j])
    return late


def brute_force_optimum(p, s, d, cap):
    """Min tardy jobs over every capacity-feasible partition and batch order."""
    n = len(p)
    best = n
    for part in set_partitions(list(range(n))):
        if any(sum(s[j] for j in b) > cap for b in part):
            continue
        for order in permutations(part):
            best = min(best, simple_tardy(p, d, order))
            if best == 0:
                return 0
    return best


def brute_force_single_machine(p, d):
    n = len(p)
    return min(simple_tardy(p, d, [[j] for j in order]) for order in permutations(range(n)))


def min_unit_batch_makespan(p, cap):
    """Smallest sum of batch maxima over all groupings into <= cap jobs."""
    best = None
    for part in set_partitions(list(range(len(p)))):
        if any(len(b) > cap for b in part):
            continue
        v = sum(max(p[j] for j in b) for b in part)
        best = v if best is None else min(best, v)
    return best


def milp_optimum_from_lp(text):
    """Solve an LP-text model (as written by the package) with scipy/HiGHS."""
    from scipy.optimize import Bounds, LinearConstraint, milp
    from tardybatch.milp import read_lp_text

    parsed = read_lp_text(text)
    names = []
    index = {}

    def idx(v):
        if v not in index:
            index[v] = len(names)
            names.append(v)
        return index[v]

    for v, _ in parsed["objective"]:
        idx(v)
    for _, coeffs, _, _ in parsed["rows"]:
        for v, _ in coeffs:
            idx(v)
    for v in parsed["binaries"]:
        idx(v)
    m = len(names)
    c = np.zeros(m)
    for v, coef in parsed["objective"]:
        c[idx(v)] += coef
    A = np.zeros((len(parsed["rows"]), m))
    lo = np.full(len(parsed["rows"]), -np.inf)
    hi = np.full(len(parsed["rows"]), np.inf)
    for r, (_, coeffs, sense, rhs) in enumerate(parsed["rows"]):
        for v, coef in coeffs:
            A[r, idx(v)] += coef
        if sense in ("<=", "="):
            hi[r] = rhs
        if sense in (">=", "="):
            lo[r] = rhs
    integrality = np.zeros(m)
    ub = np.full(m, np.inf)
    for v in parsed["binaries"]:
        integrality[idx(v)] = 1
        ub[idx(v)] = 1
    res = milp(c, constraints=LinearConstraint(A, lo, hi), integrality=integrality, bounds=Bounds(np.zeros(m), ub))
    assert res.success, res.message
    return int(round(res.fun))
