"""Compiled inner loops.

Everything here works on job *positions* (0-based indices into the
instance's job tuple) and plain int64 arrays. A schedule is represented as
``assign[j] = batch position`` plus the batch count ``nb``.
"""
import numpy as np
from numba import njit

_JIT = dict(cache=True, nogil=True)
_BIG = np.int64(1) << 60


@njit(**_JIT)
def evaluate_assign(p, d, assign, nb):
    P = np.zeros(nb, dtype=np.int64)
    for j in range(p.shape[0]):
        b = assign[j]
        if p[j] > P[b]:
            P[b] = p[j]
    for b in range(1, nb):
        P[b] += P[b - 1]
    count = 0
    for j in range(p.shape[0]):
        if P[assign[j]] > d[j]:
            count += 1
    return count


@njit(**_JIT)
def batch_loads(s, assign, nb):
    load = np.zeros(nb, dtype=np.int64)
    for j in range(s.shape[0]):
        load[assign[j]] += s[j]
    return load


@njit(**_JIT)
def rcl_sequence(order, k, u):
    """Draw a job order from a priority list, each pick uniform over the
    first ``k`` remaining entries. Returns (sequence, chosen window index)."""
    n = order.shape[0]
    rem = order.copy()
    seq = np.empty(n, dtype=np.int64)
    chosen = np.empty(n, dtype=np.int64)
    m = n
    for step in range(n):
        w = min(k, m)
        idx = int(u[step] * w)
        if idx >= w:
            idx = w - 1
        seq[step] = rem[idx]
        chosen[step] = idx
        for t in range(idx, m - 1):
            rem[t] = rem[t + 1]
        m -= 1
    return seq, chosen


@njit(**_JIT)
def decode_classic(p, s, cap, seq):
    n = seq.shape[0]
    assign = np.empty(n, dtype=np.int64)
    load = np.zeros(n, dtype=np.int64)
    nb = 0
    for step in range(n):
        j = seq[step]
        placed = False
        for b in range(nb):
            if load[b] + s[j] <= cap:
                assign[j] = b
                load[b] += s[j]
                placed = True
                break
        if not placed:
            assign[j] = nb
            load[nb] = s[j]
            nb += 1
    return assign, nb


@njit(**_JIT)
def decode_improved(p, s, d, cap, seq):
    """Tardy-aware first-fit.

    Batches live in two zones: on-time batches (processed first, in creation
    order) and tardy batches (processed afterwards, in creation order). A job
    joins the first on-time batch where it finishes on time without pushing
    any already on-time job late, else a new on-time batch if that keeps it on
    time. Otherwise it is tardy: jobs with p > d go first-fit into the tardy
    zone only, other tardy jobs go first-fit into any batch (creation order)
    that can absorb them without harming on-time jobs. A new tardy batch is
    the last resort.
    """
    n = seq.shape[0]
    assign_c = np.empty(n, dtype=np.int64)  # creation index per job
    load = np.zeros(n, dtype=np.int64)
    P = np.zeros(n, dtype=np.int64)
    zone = np.zeros(n, dtype=np.int64)  # 0 on-time, 1 tardy; by creation index
    slot = np.zeros(n, dtype=np.int64)  # on-time rank of an on-time batch
    ot = np.empty(n, dtype=np.int64)  # on-time ranks -> creation index
    min_d = np.empty(n, dtype=np.int64)  # min due date of on-time jobs, by rank
    C = np.empty(n, dtype=np.int64)
    suf = np.empty(n + 1, dtype=np.int64)
    nb = 0
    m = 0
    for step in range(n):
        j = seq[step]
        pj = p[j]
        sj = s[j]
        dj = d[j]
        t = 0
        for k in range(m):
            t += P[ot[k]]
            C[k] = t
        suf[m] = _BIG
        for k in range(m - 1, -1, -1):
            v = min_d[k] - C[k]
            suf[k] = v if v < suf[k + 1] else suf[k + 1]
        placed = False
        for k in range(m):
            b = ot[k]
            if load[b] + sj > cap:
                continue
            delta = pj - P[b] if pj > P[b] else 0
            if C[k] + delta <= dj and suf[k] >= delta:
                assign_c[j] = b
                load[b] += sj
                P[b] += delta
                if dj < min_d[k]:
                    min_d[k] = dj
                placed = True
                break
        if placed:
            continue
        if t + pj <= dj:
            b = nb
            nb += 1
            zone[b] = 0
            slot[b] = m
            ot[m] = b
            min_d[m] = dj
            m += 1
            assign_c[j] = b
            load[b] = sj
            P[b] = pj
            continue
        intrinsic = pj > dj
        for b in range(nb):
            if load[b] + sj > cap:
                continue
            if zone[b] == 0:
                if intrinsic:
                    continue
                delta = pj - P[b] if pj > P[b] else 0
                if suf[slot[b]] < delta:
                    continue
                P[b] += delta
            elif pj > P[b]:
                P[b] = pj
            assign_c[j] = b
            load[b] += sj
            placed = True
            break
        if not placed:
            b = nb
            nb += 1
            zone[b] = 1
            assign_c[j] = b
            load[b] = sj
            P[b] = pj
    # final order: on-time zone then tardy zone, each in creation order
    rank = np.empty(nb, dtype=np.int64)
    r = 0
    for b in range(nb):
        if zone[b] == 0:
            rank[b] = r
            r += 1
    for b in range(nb):
        if zone[b] == 1:
            rank[b] = r
            r += 1
    assign = np.empty(n, dtype=np.int64)
    for j in range(n):
        assign[j] = rank[assign_c[j]]
    return assign, nb


@njit(**_JIT)
def tardy_batches_last(p, d, assign, nb):
    """Move batches holding only tardy jobs behind the others (stable).
    Never increases the tardy count."""
    P = np.zeros(nb, dtype=np.int64)
    for j in range(p.shape[0]):
        if p[j] > P[assign[j]]:
            P[assign[j]] = p[j]
    C = P.copy()
    for b in range(1, nb):
        C[b] += C[b - 1]
    has_on_time = np.zeros(nb, dtype=np.bool_)
    for j in range(p.shape[0]):
        if C[assign[j]] <= d[j]:
            has_on_time[assign[j]] = True
    rank = np.empty(nb, dtype=np.int64)
    r = 0
    for b in range(nb):
        if has_on_time[b]:
            rank[b] = r
            r += 1
    for b in range(nb):
        if not has_on_time[b]:
            rank[b] = r
            r += 1
    out = np.empty_like(assign)
    for j in range(assign.shape[0]):
        out[j] = rank[assign[j]]
    return out


@njit(**_JIT)
def decode_improved_best(p, s, d, cap, seq):
    """Tardy-aware decode, unless first-fit with tardy-only batches moved last
    does strictly better on this order. Returns (assign, nb, tardy)."""
    a1, nb1 = decode_improved(p, s, d, cap, seq)
    v1 = evaluate_assign(p, d, a1, nb1)
    a2, nb2 = decode_classic(p, s, cap, seq)
    a2 = tardy_batches_last(p, d, a2, nb2)
    v2 = evaluate_assign(p, d, a2, nb2)
    if v2 < v1:
        return a2, nb2, v2
    return a1, nb1, v1


@njit(**_JIT)
def decode_eval(p, s, d, cap, seq, improved):
    if improved:
        return decode_improved_best(p, s, d, cap, seq)[2]
    assign, nb = decode_classic(p, s, cap, seq)
    return evaluate_assign(p, d, assign, nb)


# --- neighbourhood moves (in place on ``assign``; return the new nb) -------


@njit(**_JIT)
def move_interchange(assign, nb, b1, b2):
    for j in range(assign.shape[0]):
        if assign[j] == b1:
            assign[j] = b2
        elif assign[j] == b2:
            assign[j] = b1
    return nb


@njit(**_JIT)
def longest_member(p, ids, assign, b):
    best = -1
    for j in range(assign.shape[0]):
        if assign[j] != b:
            continue
        if best < 0 or p[j] > p[best] or (p[j] == p[best] and ids[j] < ids[best]):
            best = j
    return best


@njit(**_JIT)
def _drop_batch_if_empty(assign, nb, b):
    for j in range(assign.shape[0]):
        if assign[j] == b:
            return nb
    for j in range(assign.shape[0]):
        if assign[j] > b:
            assign[j] -= 1
    return nb - 1


@njit(**_JIT)
def move_insert_a(p, ids, assign, nb, source, target):
    """Move the longest job of ``source`` into ``target`` (``target == nb``
    means a new batch at the end). Capacity is the caller's concern."""
    j = longest_member(p, ids, assign, source)
    assign[j] = target
    if target == nb:
        nb += 1
    return _drop_batch_if_empty(assign, nb, source)


@njit(**_JIT)
def move_insert_b(p, s, ids, cap, assign, nb, alpha):
    """Pull every job whose p exceeds (alpha + 1) times its batch mean and
    first-fit the pulled jobs into new batches appended at the end."""
    n = assign.shape[0]
    total = np.zeros(nb, dtype=np.float64)
    cnt = np.zeros(nb, dtype=np.int64)
    for j in range(n):
        total[assign[j]] += p[j]
        cnt[assign[j]] += 1
    marked = np.zeros(n, dtype=np.bool_)
    nmarked = 0
    for j in range(n):
        b = assign[j]
        if p[j] * cnt[b] > (alpha + 1.0) * total[b]:
            marked[j] = True
            nmarked += 1
    if nmarked == 0:
        return nb
    # relocation order: source batch position, then job id
    order = np.empty(nmarked, dtype=np.int64)
    k = 0
    for b in range(nb):
        for j in range(n):
            if marked[j] and assign[j] == b:
                order[k] = j
                k += 1
    for a in range(1, nmarked):
        x = order[a]
        c = a - 1
        while c >= 0 and assign[order[c]] == assign[x] and ids[order[c]] > ids[x]:
            order[c + 1] = order[c]
            c -= 1
        order[c + 1] = x
    new_load = np.zeros(nmarked, dtype=np.int64)
    new_idx = np.empty(n, dtype=np.int64)
    nnew = 0
    for a in range(nmarked):
        j = order[a]
        placed = False
        for q in range(nnew):
            if new_load[q] + s[j] <= cap:
                new_load[q] += s[j]
                new_idx[j] = q
                placed = True
                break
        if not placed:
            new_load[nnew] = s[j]
            new_idx[j] = nnew
            nnew += 1
    # compact surviving batches, then append the new ones
    alive = np.zeros(nb, dtype=np.bool_)
    for j in range(n):
        if not marked[j]:
            alive[assign[j]] = True
    remap = np.empty(nb, dtype=np.int64)
    r = 0
    for b in range(nb):
        if alive[b]:
            remap[b] = r
            r += 1
    for j in range(n):
        if marked[j]:
            assign[j] = r + new_idx[j]
        else:
            assign[j] = remap[assign[j]]
    return r + nnew


@njit(**_JIT)
def local_search_kernel(p, s, d, ids, cap, assign, nb, alpha, draws):
    """One sweep of first-improvement hill climbing over the three moves.

    Sample ``i`` tries move kind ``i % 3`` (interchange, insert A, insert B);
    ``draws`` holds two uniforms per sample for its position choices. Only
    strictly better neighbours are accepted.
    Returns (assign, nb, tardy, accepted moves).
    """
    cur = assign.copy()
    cur_nb = nb
    cur_val = evaluate_assign(p, d, cur, cur_nb)
    cand = np.empty_like(cur)
    accepted = 0
    for it in range(draws.shape[0]):
        if cur_val == 0:
            break
        kind = it % 3
        cand[:] = cur
        cand_nb = cur_nb
        if kind == 0:
            if cur_nb < 2:
                continue
            b1 = int(draws[it, 0] * cur_nb)
            b2 = int(draws[it, 1] * (cur_nb - 1))
            if b2 >= b1:
                b2 += 1
            cand_nb = move_interchange(cand, cand_nb, b1, b2)
        elif kind == 1:
            src = int(draws[it, 0] * cur_nb)
            j = longest_member(p, ids, cur, src)
            load = batch_loads(s, cur, cur_nb)
            nfeas = 0
            for b in range(cur_nb):
                if b != src and load[b] + s[j] <= cap:
                    nfeas += 1
            pick = int(draws[it, 1] * (nfeas + 1))
            target = cur_nb
            if pick < nfeas:
                c = 0
                for b in range(cur_nb):
                    if b != src and load[b] + s[j] <= cap:
                        if c == pick:
                            target = b
                            break
                        c += 1
            cand_nb = move_insert_a(p, ids, cand, cand_nb, src, target)
        else:
            cand_nb = move_insert_b(p, s, ids, cap, cand, cand_nb, alpha)
        val = evaluate_assign(p, d, cand, cand_nb)
        if val < cur_val:
            cur[:] = cand
            cur_nb = cand_nb
            cur_val = val
            accepted += 1
    return cur, cur_nb, cur_val, accepted


@njit(**_JIT)
def relink_path(p, s, d, cap, initial, guiding):
    """Swap-path from ``initial`` to ``guiding``. Returns every intermediate
    sequence (rows), its tardy-aware fitness, and the number of swaps."""
    n = initial.shape[0]
    cur = initial.copy()
    where = np.empty(n, dtype=np.int64)
    for i in range(n):
        where[cur[i]] = i
    seqs = np.empty((max(n - 1, 1), n), dtype=np.int64)
    vals = np.empty(max(n - 1, 1), dtype=np.int64)
    m = 0
    for i in range(n):
        g = guiding[i]
        if cur[i] == g:
            continue
        t = where[g]
        a = cur[i]
        cur[i] = g
        cur[t] = a
        where[g] = i
        where[a] = t
        seqs[m, :] = cur
        vals[m] = decode_eval(p, s, d, cap, cur, True)
        m += 1
    return seqs, vals, m
