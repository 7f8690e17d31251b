import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tardybatch import (
    ALL_RULES, Instance, Job, PriorityRule, RclConfig, classic_greedy, construct_all, decode,
    improved_greedy, pick_sequence, priority_sequence,
)
from tardybatch import _kernels as K
from tardybatch.construction import best_construction, rcl_pick

from conftest import CLASSIC_TRACE, IMPROVED_TRACE, make_instance, random_instances, zero_based
from oracles import simple_tardy


def plain_first_fit(inst, seq):
    batches, loads = [], []
    for j in seq:
        s = inst.job(j).s
        for b, load in enumerate(loads):
            if load + s <= inst.capacity:
                batches[b].append(j)
                loads[b] += s
                break
        else:
            batches.append([j])
            loads.append(s)
    return batches


def test_ten_rules():
    assert len(ALL_RULES) == 10
    assert [r.value for r in ALL_RULES] == list(range(1, 11))
    assert [r.is_random for r in ALL_RULES].count(True) == 2


def test_edd_orders(nine_jobs, moves_instance):
    assert priority_sequence(nine_jobs, PriorityRule.EDD) == (3, 4, 5, 2, 1, 6, 7, 9, 8)
    assert priority_sequence(moves_instance, PriorityRule.EDD) == (2, 3, 6, 7, 4, 9, 5, 1, 8)


def test_rule_keys_by_hand():
    inst = make_instance(sizes=[3, 1, 2], times=[5, 9, 2], dues=[20, 10, 4], capacity=5)
    # s*p = 15, 9, 4 ; s*d = 60, 10, 8 ; s*(d-p) = 45, 1, 4 ; p*d = 100, 90, 8
    assert priority_sequence(inst, PriorityRule.MinSP) == (3, 2, 1)
    assert priority_sequence(inst, PriorityRule.MinSD) == (3, 2, 1)
    assert priority_sequence(inst, PriorityRule.MinSDP) == (2, 3, 1)
    assert priority_sequence(inst, PriorityRule.MinPD) == (3, 2, 1)
    assert priority_sequence(inst, PriorityRule.MinSize) == (2, 3, 1)
    assert priority_sequence(inst, PriorityRule.MaxSize) == (1, 3, 2)
    assert priority_sequence(inst, PriorityRule.SPT) == (3, 1, 2)


def test_ties_by_ascending_id():
    inst = make_instance(sizes=[4, 4, 4], times=[3, 3, 3], dues=[9, 9, 9])
    for rule in ALL_RULES:
        if not rule.is_random:
            assert priority_sequence(inst, rule) == (1, 2, 3)


def test_negative_min_sdp_key_sorts_first():
    inst = make_instance(sizes=[2, 2], times=[5, 30], dues=[40, 10])
    assert priority_sequence(inst, PriorityRule.MinSDP) == (2, 1)


def test_random_rules_are_permutations(nine_jobs):
    rng = np.random.default_rng(0)
    for rule in (PriorityRule.Random1, PriorityRule.Random2):
        assert sorted(priority_sequence(nine_jobs, rule, rng)) == list(range(1, 10))


@pytest.mark.parametrize("seed", range(5))
def test_spt_reverse_on_distinct_keys(seed):
    rng = np.random.default_rng(seed)
    times = rng.permutation(np.arange(1, 21)).tolist()
    inst = make_instance(sizes=[1] * 20, times=times, dues=[100] * 20)
    spt = priority_sequence(inst, PriorityRule.SPT)
    by_neg = tuple(sorted(inst.ids, key=lambda j: -inst.job(j).p))
    assert spt[::-1] == by_neg


def test_rcl_pick_behaviour():
    class Forced:
        def __init__(self, i):
            self.i = i

        def integers(self, w):
            assert self.i < w
            return self.i

    remaining = [3, 4, 5, 2, 1]
    assert rcl_pick(remaining, 3, Forced(2)) == 5 and remaining == [3, 4, 2, 1]
    assert rcl_pick([7, 8, 9], 1, Forced(0)) == 7
    rng = np.random.default_rng(1)
    picks = {rcl_pick([1, 2], 3, rng) for _ in range(50)}
    assert picks == {1, 2}


@pytest.mark.parametrize(
    "text, n, k", [("3", 9, 3), ("3", 2, 2), ("10%", 9, 1), ("10%", 100, 10), ("10%", 101, 11), ("50%", 7, 4)]
)
def test_rcl_resolution(text, n, k):
    assert RclConfig.parse(text).resolve(n) == k


def test_rcl_rejects_nonsense():
    for bad in ("0", "-2", "0%", "abc"):
        with pytest.raises(ValueError):
            RclConfig.parse(bad)


def test_classic_replay(nine_jobs):
    seq, trace = pick_sequence(nine_jobs, PriorityRule.EDD, 3, replay=zero_based(CLASSIC_TRACE))
    assert seq == (5, 4, 3, 1, 7, 2, 8, 9, 6)
    assert [t.window for t in trace] == [3, 3, 3, 3, 3, 3, 3, 2, 1]
    sched = classic_greedy(nine_jobs, PriorityRule.EDD, 3, replay=zero_based(CLASSIC_TRACE))
    assert sched.batches == ((5, 4, 1), (3, 2), (7, 8), (9,), (6,))
    assert sched.completion_times == (19, 63, 100, 143, 166)
    assert sched.tardy == frozenset({2, 3, 6, 7, 8, 9})


def test_improved_replay(nine_jobs):
    seq, _ = pick_sequence(nine_jobs, PriorityRule.EDD, 3, replay=zero_based(IMPROVED_TRACE))
    assert seq == (4, 2, 5, 1, 3, 7, 8, 9, 6)
    sched = improved_greedy(nine_jobs, PriorityRule.EDD, 3, replay=zero_based(IMPROVED_TRACE))
    assert sched.batches == ((4, 2, 5, 8), (1, 6), (3,), (7,), (9,))
    assert sched.completion_times == (28, 51, 95, 132, 175)
    assert sched.tardy_count == 5


def test_replay_trace_out_of_window(nine_jobs):
    with pytest.raises(ValueError):
        pick_sequence(nine_jobs, PriorityRule.EDD, 3, replay=[3] + [0] * 8)


def test_edd_pure_greedy_all_tardy(moves_instance):
    sched = classic_greedy(moves_instance, PriorityRule.EDD, 1)
    assert sched.batch_sets() == [{2, 3, 6, 7, 8}, {4, 9}, {5}, {1}]
    assert sched.tardy_count == 9


def test_single_job():
    inst = Instance((Job(1, p=3, s=2, d=1),), 5)
    for mode in ("classic", "improved"):
        assert decode(inst, (1,), mode).batches == ((1,),)


def test_everything_fits_and_on_time():
    inst = make_instance(sizes=[5, 5, 5, 5], times=[3, 7, 2, 4], dues=[7, 8, 9, 10], capacity=20)
    assert improved_greedy(inst, PriorityRule.EDD).tardy_count == 0


def test_intrinsically_tardy_jobs_kept_apart(nine_jobs):
    # intrinsically late jobs 3, 7, 9 end up in batches of their own at the back
    sched = improved_greedy(nine_jobs, PriorityRule.EDD, 3, replay=zero_based(IMPROVED_TRACE))
    for j in (3, 7, 9):
        b = sched.assignment()[nine_jobs.position[j]]
        assert all(nine_jobs.job(i).p > nine_jobs.job(i).d for i in sched.batches[b])


def test_k1_deterministic(nine_jobs):
    for rule in ALL_RULES:
        if not rule.is_random:
            a = improved_greedy(nine_jobs, rule, 1)
            b = improved_greedy(nine_jobs, rule, 1)
            assert a.batches == b.batches


def test_random_draw_replays_identically(nine_jobs):
    rng = np.random.default_rng(5)
    seq, trace = pick_sequence(nine_jobs, PriorityRule.SPT, 3, rng)
    again, _ = pick_sequence(nine_jobs, PriorityRule.SPT, 3, replay=[t.chosen_index for t in trace])
    assert seq == again
    assert decode(nine_jobs, seq, "classic").batches == classic_greedy(
        nine_jobs, PriorityRule.SPT, 3, replay=[t.chosen_index for t in trace]
    ).batches


def test_construct_all_and_best(nine_jobs):
    built = construct_all(nine_jobs, 3, np.random.default_rng(0))
    assert [c.rule for c in built] == list(ALL_RULES)
    best = best_construction(built)
    assert best.tardy_count == min(c.tardy_count for c in built)


def test_improved_never_worse_than_classic_1000():
    bad = 0
    rng = np.random.default_rng(99)
    for inst in random_instances(1000, n_range=(5, 40), seed=2024):
        seq = rng.permutation(inst.n).astype(np.int64)
        c = K.decode_eval(inst.p, inst.s, inst.d, inst.capacity, seq, False)
        i = K.decode_eval(inst.p, inst.s, inst.d, inst.capacity, seq, True)
        bad += i > c
    assert bad == 0


@st.composite
def small_instance(draw):
    n = draw(st.integers(1, 12))
    cap = draw(st.integers(3, 25))
    jobs = tuple(
        Job(i + 1, p=draw(st.integers(1, 30)), s=draw(st.integers(1, cap)), d=draw(st.integers(1, 90)))
        for i in range(n)
    )
    return Instance(jobs, cap)


@settings(max_examples=300, deadline=None)
@given(small_instance(), st.randoms(use_true_random=False))
def test_decoders_feasible_and_consistent(inst, rnd):
    seq = list(inst.ids)
    rnd.shuffle(seq)
    classic = decode(inst, seq, "classic")
    assert [list(b) for b in classic.batches] == plain_first_fit(inst, seq)
    improved = decode(inst, seq, "improved")
    for sched in (classic, improved):
        assert sorted(j for b in sched.batches for j in b) == sorted(inst.ids)
        assert all(sum(inst.job(j).s for j in b) <= inst.capacity for b in sched.batches)
    p = {j.id: j.p for j in inst.jobs}
    d = {j.id: j.d for j in inst.jobs}
    assert improved.tardy_count == simple_tardy(p, d, improved.batches) <= classic.tardy_count
    # tardy-only batches trail every batch that holds an on-time job
    kinds = [all(j in improved.tardy for j in b) for b in improved.batches]
    assert kinds == sorted(kinds)


@settings(max_examples=100, deadline=None)
@given(small_instance())
def test_edd_sorted(inst):
    seq = priority_sequence(inst, PriorityRule.EDD)
    ds = [inst.job(j).d for j in seq]
    assert ds == sorted(ds)
