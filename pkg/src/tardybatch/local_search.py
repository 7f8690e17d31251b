"""Neighbourhood moves and first-improvement hill climbing.

Three moves are available: swapping two batches in the processing order,
moving the longest job of a batch elsewhere (insertion A), and pulling every
job that is long relative to its batch mean into new trailing batches
(insertion B). Batch positions are 0-based.
"""
from __future__ import annotations

import numpy as np

from . import _kernels as K
from .errors import CapacityViolation, InvalidPosition
from .instance import BatchSchedule, evaluate, schedule_from_assignment

NEW_BATCH = "new"


def _arrays(schedule: BatchSchedule):
    inst = schedule.instance
    return inst, schedule.assignment(), len(schedule.batches)


def _check_position(schedule: BatchSchedule, b, label="position") -> int:
    if not isinstance(b, (int, np.integer)) or not 0 <= b < len(schedule.batches):
        raise InvalidPosition(f"{label} {b!r} is not a batch position of a {len(schedule.batches)}-batch schedule")
    return int(b)


def batch_interchange(schedule: BatchSchedule, b1: int, b2: int) -> BatchSchedule:
    """Swap the batches at positions ``b1`` and ``b2``."""
    b1 = _check_position(schedule, b1)
    b2 = _check_position(schedule, b2)
    if b1 == b2:
        raise InvalidPosition("cannot interchange a batch with itself")
    batches = list(schedule.batches)
    batches[b1], batches[b2] = batches[b2], batches[b1]
    return evaluate(schedule.instance, batches)[0]


def longest_job(schedule: BatchSchedule, b: int) -> int:
    """Id of the longest job in batch ``b``; ties go to the lowest id."""
    inst = schedule.instance
    return min(schedule.batches[b], key=lambda j: (-inst.job(j).p, j))


def insert_a(schedule: BatchSchedule, source: int, target, rng=None) -> BatchSchedule:
    """Move the longest job of batch ``source`` into batch ``target``.

    ``target`` is a position or :data:`NEW_BATCH` (appended at the end). When
    ``target`` is None it is drawn uniformly from the feasible existing
    batches plus a new batch, using ``rng``.
    """
    source = _check_position(schedule, source, "source")
    inst, assign, nb = _arrays(schedule)
    job = longest_job(schedule, source)
    loads = [sum(inst.job(j).s for j in b) for b in schedule.batches]
    size = inst.job(job).s
    if target is None:
        options = [b for b in range(nb) if b != source and loads[b] + size <= inst.capacity]
        options.append(NEW_BATCH)
        target = options[int(rng.integers(len(options)))]
    if target == NEW_BATCH:
        t = nb
    else:
        t = _check_position(schedule, target, "target")
        if t == source:
            raise InvalidPosition("target equals source")
        if loads[t] + size > inst.capacity:
            raise CapacityViolation(
                f"job {job} (size {size}) does not fit batch {t} (load {loads[t]}, capacity {inst.capacity})"
            )
    nb = K.move_insert_a(inst.p, inst.id_array, assign, nb, source, t)
    return schedule_from_assignment(inst, assign, nb)


def marked_jobs(schedule: BatchSchedule, alpha: float = 0.0) -> list[int]:
    """Jobs with p strictly above (alpha + 1) times their batch's mean p."""
    inst = schedule.instance
    out = []
    for batch in schedule.batches:
        ps = [inst.job(j).p for j in batch]
        total = sum(ps)
        out.extend(j for j, pj in zip(batch, ps) if pj * len(ps) > (alpha + 1.0) * total)
    return out


def insert_b(schedule: BatchSchedule, alpha: float = 0.0, rng=None) -> BatchSchedule:
    """Relocate every marked job (see :func:`marked_jobs`) into new batches
    appended at the end, first-fit in source-batch order (ids ascending
    within a batch)."""
    if alpha < 0:
        raise ValueError("alpha must be non-negative")
    inst, assign, nb = _arrays(schedule)
    nb = K.move_insert_b(inst.p, inst.s, inst.id_array, inst.capacity, assign, nb, float(alpha))
    return schedule_from_assignment(inst, assign, nb)


def default_budget(n: int) -> int:
    return 50 * n


def local_search(
    schedule: BatchSchedule, instance=None, budget: int | None = None, rng=None, alpha: float = 0.0
) -> BatchSchedule:
    """Hill climbing in sweeps of ``budget`` sampled moves, keeping each one
    that strictly lowers the tardy count. Stops after a sweep without
    improvement, or once no job is tardy."""
    inst = instance if instance is not None else schedule.instance
    if budget is None:
        budget = default_budget(inst.n)
    if budget < 0:
        raise ValueError("budget must be non-negative")
    if rng is None:
        rng = np.random.default_rng()
    assign, nb, _ = climb(inst, schedule.assignment(), len(schedule.batches), int(budget), rng, alpha)
    return schedule_from_assignment(inst, assign, nb)


def climb(inst, assign, nb, budget: int, rng, alpha: float = 0.0):
    """Sweep driver over the compiled kernel: returns (assign, nb, tardy).

    Each accepted move removes at least one tardy job, so at most n + 1
    sweeps run."""
    val = None
    while True:
        draws = rng.random((budget, 2))
        assign, nb, val, accepted = K.local_search_kernel(
            inst.p, inst.s, inst.d, inst.id_array, inst.capacity, assign, nb, float(alpha), draws
        )
        if accepted == 0 or val == 0 or budget == 0:
            return assign, int(nb), int(val)
