"""Randomized greedy construction.

Construction is split in two steps. First a job order is drawn: jobs are
ranked by a priority rule and picked one at a time uniformly from the first
``k`` remaining entries (the restricted candidate list). Then the order is
decoded into batches, either by plain first-fit (``classic``) or by the
tardy-aware first-fit (``improved``) that keeps batches holding on-time jobs
ahead of the rest. The improved decoder also tries plain first-fit with the
tardy-only batches moved last and keeps that when strictly better, so on a
given order it never loses to the classic decoder. Because picks never look at the batches, a recorded pick
trace replays exactly under either decoder.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from . import _kernels as K
from .instance import BatchSchedule, Instance, check_permutation, evaluate


class PriorityRule(enum.Enum):
    EDD = 1
    MinSize = 2
    MaxSize = 3
    SPT = 4
    MinSP = 5
    MinSD = 6
    MinSDP = 7
    MinPD = 8
    Random1 = 9
    Random2 = 10

    @property
    def is_random(self) -> bool:
        return self in (PriorityRule.Random1, PriorityRule.Random2)


ALL_RULES = tuple(PriorityRule)


def rule_keys(instance: Instance, rule: PriorityRule) -> np.ndarray:
    """Ascending sort key of each job (by position) for a deterministic rule."""
    p, s, d = instance.p, instance.s, instance.d
    keys = {
        PriorityRule.EDD: d,
        PriorityRule.MinSize: s,
        PriorityRule.MaxSize: -s,
        PriorityRule.SPT: p,
        PriorityRule.MinSP: s * p,
        PriorityRule.MinSD: s * d,
        PriorityRule.MinSDP: s * (d - p),
        PriorityRule.MinPD: p * d,
    }
    return keys[rule]


def _priority_positions(instance: Instance, rule: PriorityRule, rng=None) -> np.ndarray:
    if rule.is_random:
        if rng is None:
            raise ValueError(f"rule {rule.name} needs an rng")
        return rng.permutation(instance.n).astype(np.int64)
    # lexsort: last key is primary; ties broken by ascending job id
    return np.lexsort((instance.id_array, rule_keys(instance, rule))).astype(np.int64)


def priority_sequence(instance: Instance, rule: PriorityRule, rng=None) -> tuple[int, ...]:
    """Job ids ordered by ``rule``. Random rules draw a permutation from ``rng``."""
    return instance.to_ids(_priority_positions(instance, rule, rng))


@dataclass(frozen=True)
class RclConfig:
    """Restricted candidate list size, absolute (``k_mode="absolute"``) or a
    fraction of the job count (``k_mode="fraction"``)."""

    k_value: float = 1
    k_mode: str = "absolute"

    def __post_init__(self):
        if self.k_mode not in ("absolute", "fraction"):
            raise ValueError(f"unknown k_mode {self.k_mode!r}")
        if self.k_mode == "fraction" and not 0 < self.k_value <= 1:
            raise ValueError("fractional RCL size must lie in (0, 1]")
        if self.k_mode == "absolute" and (self.k_value < 1 or int(self.k_value) != self.k_value):
            raise ValueError("absolute RCL size must be a positive integer")

    @classmethod
    def parse(cls, text: str | int | float | RclConfig) -> RclConfig:
        """``"3"`` -> absolute 3, ``"10%"`` -> fraction 0.10."""
        if isinstance(text, RclConfig):
            return text
        if isinstance(text, str) and text.strip().endswith("%"):
            return cls(float(text.strip()[:-1]) / 100.0, "fraction")
        return cls(int(text), "absolute")

    def resolve(self, n: int) -> int:
        if self.k_mode == "fraction":
            k = math.ceil(self.k_value * n - 1e-9)
        else:
            k = int(self.k_value)
        return max(1, min(n, k))


class PickStep(NamedTuple):
    """One RCL draw: ``window`` candidates were eligible, entry ``chosen_index``
    (0-based) was taken."""

    step: int
    window: int
    chosen_index: int


def rcl_pick(remaining: list, k: int, rng) -> object:
    """Remove and return a uniform pick among the first ``k`` entries."""
    w = max(1, min(k, len(remaining)))
    return remaining.pop(int(rng.integers(w)))


def draw_positions(instance: Instance, rule: PriorityRule, k: int, rng, order=None):
    """Positions picked through an RCL of size ``k`` plus the chosen window
    indices. ``order`` may supply a precomputed priority order for a
    deterministic rule. Random rules consume a permutation, then (if k > 1)
    one uniform per step."""
    if order is None or rule.is_random:
        order = _priority_positions(instance, rule, rng)
    n = instance.n
    if k == 1:
        u = np.zeros(n)
    else:
        if rng is None:
            raise ValueError("an rng is required when the RCL size exceeds 1")
        u = rng.random(n)
    return K.rcl_sequence(order, k, u)


def pick_sequence(
    instance: Instance,
    rule: PriorityRule,
    rcl: RclConfig | int = 1,
    rng=None,
    replay: Sequence[int] | None = None,
) -> tuple[tuple[int, ...], list[PickStep]]:
    """Draw a job order from ``rule`` through the RCL.

    ``replay`` gives the 0-based chosen index of every step and bypasses the
    random draws. Returns the picked job ids and the pick trace.
    """
    rcl = RclConfig.parse(rcl)
    k = rcl.resolve(instance.n)
    n = instance.n
    if replay is None:
        seq, chosen = draw_positions(instance, rule, k, rng)
    else:
        if len(replay) != n:
            raise ValueError(f"replay trace has {len(replay)} steps, expected {n}")
        remaining = list(_priority_positions(instance, rule, rng))
        seq, chosen = [], []
        for step, idx in enumerate(replay):
            w = min(k, len(remaining))
            if not 0 <= idx < w:
                raise ValueError(f"step {step + 1}: index {idx} outside RCL window of {w}")
            seq.append(remaining.pop(idx))
            chosen.append(idx)
    trace = [PickStep(i + 1, min(k, n - i), int(c)) for i, c in enumerate(chosen)]
    return instance.to_ids(seq), trace


def decode(instance: Instance, job_sequence: Sequence[int], mode: str = "improved") -> BatchSchedule:
    """Deterministic first-fit of a job order into batches."""
    check_permutation(instance, job_sequence)
    seq = instance.to_positions(job_sequence)
    if mode == "classic":
        assign, nb = K.decode_classic(instance.p, instance.s, instance.capacity, seq)
    elif mode == "improved":
        assign, nb, _ = K.decode_improved_best(instance.p, instance.s, instance.d, instance.capacity, seq)
    else:
        raise ValueError(f"unknown decode mode {mode!r}")
    return _ordered_schedule(instance, assign, nb, job_sequence)


def _ordered_schedule(instance, assign, nb, job_sequence) -> BatchSchedule:
    # list batch members in the order they were picked
    groups: list[list[int]] = [[] for _ in range(int(nb))]
    pos = instance.position
    for j in job_sequence:
        groups[int(assign[pos[j]])].append(j)
    return evaluate(instance, groups)[0]


def classic_greedy(instance, rule, rcl=1, rng=None, replay=None) -> BatchSchedule:
    """RCL-randomized rule order decoded by plain first-fit; batches run in
    creation order."""
    seq, _ = pick_sequence(instance, rule, rcl, rng, replay)
    return decode(instance, seq, "classic")


def improved_greedy(instance, rule, rcl=1, rng=None, replay=None) -> BatchSchedule:
    """RCL-randomized rule order decoded by the tardy-aware first-fit."""
    seq, _ = pick_sequence(instance, rule, rcl, rng, replay)
    return decode(instance, seq, "improved")


@dataclass(frozen=True)
class Construction:
    rule: PriorityRule
    sequence: tuple[int, ...]
    trace: list
    schedule: BatchSchedule

    @property
    def tardy_count(self) -> int:
        return self.schedule.tardy_count


def construct_all(
    instance: Instance, rcl: RclConfig | int = 1, rng=None, mode: str = "improved",
    rules: Sequence[PriorityRule] = ALL_RULES,
) -> list[Construction]:
    """One randomized construction per rule, in rule order."""
    out = []
    for rule in rules:
        seq, trace = pick_sequence(instance, rule, rcl, rng)
        out.append(Construction(rule, seq, trace, decode(instance, seq, mode)))
    return out


def best_construction(constructions: Sequence[Construction]) -> Construction:
    """Fewest tardy jobs; ties go to the earlier rule."""
    return min(constructions, key=lambda c: c.tardy_count)
