"""Jobs, instances, batch schedules and their evaluation.

A schedule is an ordered list of batches. A batch occupies the machine for
as long as its longest member job, batches run back to back with no idle
time, and a job is tardy when its batch completes strictly after the job's
due date.

>>> inst = Instance([Job(1, p=5, s=2, d=5), Job(2, p=3, s=2, d=4)], capacity=4)
>>> sched, summary = evaluate(inst, [[1, 2]])
>>> sched.completion_times, summary.tardy_job_ids
((5,), (2,))
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    CapacityViolation,
    DuplicateId,
    EmptyInstance,
    NonPositiveField,
    NotAPartition,
    NotAPermutation,
    OversizedJob,
    ValidationError,
)


@dataclass(frozen=True)
class Job:
    """One job. ``r`` (ready time) and ``w`` (weight) are carried but never
    influence evaluation."""

    id: int
    p: int
    s: int
    d: int
    r: int = 0
    w: int = 1


def _job_problems(job: Job) -> list[tuple[type, str]]:
    out = []
    for name in ("p", "s", "d", "w"):
        v = getattr(job, name)
        if not isinstance(v, (int, np.integer)) or v < 1:
            out.append((NonPositiveField, f"job {job.id}: {name}={v!r} must be a positive integer"))
    if not isinstance(job.r, (int, np.integer)) or job.r < 0:
        out.append((NonPositiveField, f"job {job.id}: r={job.r!r} must be a non-negative integer"))
    return out


@dataclass(frozen=True, eq=False)
class Instance:
    """A job set plus the machine capacity. Immutable; validated on creation."""

    jobs: tuple[Job, ...]
    capacity: int
    meta: Mapping[str, Any] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "jobs", tuple(self.jobs))
        problems: list[tuple[type, str]] = []
        if not self.jobs:
            problems.append((EmptyInstance, "instance has no jobs"))
        if not isinstance(self.capacity, (int, np.integer)) or self.capacity < 1:
            problems.append((NonPositiveField, f"capacity={self.capacity!r} must be a positive integer"))
        seen = set()
        for job in self.jobs:
            problems.extend(_job_problems(job))
            if job.id in seen:
                problems.append((DuplicateId, f"job id {job.id} appears more than once"))
            seen.add(job.id)
            if isinstance(self.capacity, (int, np.integer)) and job.s > self.capacity:
                problems.append((OversizedJob, f"job {job.id}: size {job.s} exceeds capacity {self.capacity}"))
        if problems:
            raise problems[0][0]([msg for _, msg in problems])

    @property
    def n(self) -> int:
        return len(self.jobs)

    @cached_property
    def ids(self) -> tuple[int, ...]:
        return tuple(j.id for j in self.jobs)

    @cached_property
    def position(self) -> dict[int, int]:
        """Map job id -> position in :attr:`jobs`."""
        return {j.id: i for i, j in enumerate(self.jobs)}

    @cached_property
    def p(self) -> np.ndarray:
        return np.array([j.p for j in self.jobs], dtype=np.int64)

    @cached_property
    def s(self) -> np.ndarray:
        return np.array([j.s for j in self.jobs], dtype=np.int64)

    @cached_property
    def d(self) -> np.ndarray:
        return np.array([j.d for j in self.jobs], dtype=np.int64)

    @cached_property
    def id_array(self) -> np.ndarray:
        return np.array(self.ids, dtype=np.int64)

    def job(self, job_id: int) -> Job:
        return self.jobs[self.position[job_id]]

    def to_positions(self, job_ids: Iterable[int]) -> np.ndarray:
        pos = self.position
        return np.array([pos[j] for j in job_ids], dtype=np.int64)

    def to_ids(self, positions: Iterable[int]) -> tuple[int, ...]:
        ids = self.ids
        return tuple(ids[int(i)] for i in positions)

    def to_dict(self) -> dict:
        out = {
            "capacity": int(self.capacity),
            "jobs": [
                {"id": j.id, "p": j.p, "s": j.s, "d": j.d, "r": j.r, "w": j.w}
                for j in self.jobs
            ],
        }
        out.update({k: v for k, v in self.meta.items() if k not in out})
        return out

    def fingerprint(self) -> str:
        """Stable hash of the solver-relevant data (capacity, p, s, d)."""

        payload = json.dumps(
            [int(self.capacity), [[j.id, j.p, j.s, j.d] for j in self.jobs]],
            separators=(",", ":"),
        )
        return hashlib.sha256(payload.encode()).hexdigest()[:16]


def validate_instance(raw: Instance | Mapping[str, Any]) -> Instance:
    """Build a validated :class:`Instance` from a parsed file record.

    All violations are collected; the raised exception's class is that of
    the first one and ``.problems`` lists them all.
    """
    if isinstance(raw, Instance):
        return raw
    if not isinstance(raw, Mapping):
        raise ValidationError(f"expected a mapping, got {type(raw).__name__}")
    problems = []
    if "capacity" not in raw:
        problems.append("missing 'capacity'")
    if "jobs" not in raw or not isinstance(raw.get("jobs"), list):
        problems.append("missing 'jobs' list")
    if problems:
        raise ValidationError(problems)
    jobs = []
    for k, rec in enumerate(raw["jobs"]):
        try:
            jobs.append(
                Job(
                    id=rec["id"],
                    p=rec["p"],
                    s=rec["s"],
                    d=rec["d"],
                    r=rec.get("r", 0),
                    w=rec.get("w", 1),
                )
            )
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"job record #{k} is malformed: {exc!r}") from None
    meta = {k: v for k, v in raw.items() if k not in ("capacity", "jobs")}
    return Instance(tuple(jobs), raw["capacity"], meta)


def load_instance(path: str | Path) -> Instance:
    with open(path) as fh:
        return validate_instance(json.load(fh))


def save_instance(instance: Instance, path: str | Path) -> None:
    Path(path).write_text(json.dumps(instance.to_dict(), indent=1) + "\n")


@dataclass(frozen=True)
class SolutionSummary:
    tardy_count: int
    tardy_job_ids: tuple[int, ...]
    makespan: int


@dataclass(frozen=True, eq=False)
class BatchSchedule:
    """An evaluated schedule: batches in processing order plus derived times.

    Build one with :func:`evaluate`; the constructor does not check anything.
    """

    instance: Instance
    batches: tuple[tuple[int, ...], ...]
    batch_times: tuple[int, ...]
    completion_times: tuple[int, ...]
    tardy: frozenset[int]

    @property
    def tardy_count(self) -> int:
        return len(self.tardy)

    @property
    def makespan(self) -> int:
        return self.completion_times[-1] if self.completion_times else 0

    @cached_property
    def job_completion(self) -> dict[int, int]:
        return {j: c for batch, c in zip(self.batches, self.completion_times) for j in batch}

    @property
    def summary(self) -> SolutionSummary:
        return SolutionSummary(self.tardy_count, tuple(sorted(self.tardy)), self.makespan)

    def batch_sets(self) -> list[frozenset[int]]:
        return [frozenset(b) for b in self.batches]

    def assignment(self) -> np.ndarray:
        """Batch position of each job, indexed by instance position."""
        out = np.empty(self.instance.n, dtype=np.int64)
        pos = self.instance.position
        for b, batch in enumerate(self.batches):
            for j in batch:
                out[pos[j]] = b
        return out

    def to_dict(self) -> dict:
        return {
            "batches": [list(b) for b in self.batches],
            "tardy_count": self.tardy_count,
            "tardy_jobs": sorted(self.tardy),
            "makespan": int(self.makespan),
        }


def _check_partition(instance: Instance, batches: Sequence[Sequence[int]]) -> None:
    problems = []
    seen: dict[int, int] = {}
    for b, batch in enumerate(batches):
        if len(batch) == 0:
            problems.append(f"batch {b + 1} is empty")
        for j in batch:
            if j not in instance.position:
                problems.append(f"unknown job id {j} in batch {b + 1}")
            elif j in seen:
                problems.append(f"job {j} appears in batches {seen[j] + 1} and {b + 1}")
            else:
                seen[j] = b
    missing = [j for j in instance.ids if j not in seen]
    if missing:
        problems.append(f"jobs not scheduled: {missing}")
    if problems:
        raise NotAPartition(problems)


def evaluate(
    instance: Instance, batches: Sequence[Iterable[int]]
) -> tuple[BatchSchedule, SolutionSummary]:
    """Time an ordered batch list and count tardy jobs.

    Raises :class:`NotAPartition` unless every job appears exactly once, and
    :class:`CapacityViolation` when a batch is overfull.
    """
    batches = tuple(tuple(int(j) for j in b) for b in batches)
    _check_partition(instance, batches)
    over = []
    P, C = [], []
    t = 0
    for b, batch in enumerate(batches):
        jobs = [instance.job(j) for j in batch]
        load = sum(j.s for j in jobs)
        if load > instance.capacity:
            over.append(f"batch {b + 1} has load {load} > capacity {instance.capacity}")
        pb = max(j.p for j in jobs)
        t += pb
        P.append(pb)
        C.append(t)
    if over:
        raise CapacityViolation(over)
    tardy = frozenset(
        j for batch, c in zip(batches, C) for j in batch if c > instance.job(j).d
    )
    sched = BatchSchedule(instance, batches, tuple(P), tuple(C), tardy)
    return sched, sched.summary


def schedule_from_assignment(instance: Instance, assign: np.ndarray, nb: int) -> BatchSchedule:
    """Build a schedule from a job -> batch-position array (kernel output).

    Members of each batch are listed in instance order.
    """
    groups: list[list[int]] = [[] for _ in range(int(nb))]
    ids = instance.ids
    for i, b in enumerate(assign[: instance.n]):
        groups[int(b)].append(ids[i])
    return evaluate(instance, groups)[0]


def check_permutation(instance: Instance, sequence: Sequence[int]) -> None:
    if len(sequence) != instance.n or set(sequence) != set(instance.ids):
        raise NotAPermutation(
            f"sequence of length {len(sequence)} is not a permutation of the {instance.n} job ids"
        )


def tardy_count_of_sequence(
    instance: Instance, job_sequence: Sequence[int], decode_mode: str = "improved"
) -> SolutionSummary:
    """Decode a job order deterministically (first-fit, no RCL) and evaluate."""
    from .construction import decode

    check_permutation(instance, job_sequence)
    return decode(instance, job_sequence, decode_mode).summary


def load_solution(path: str | Path) -> dict:
    with open(path) as fh:
        return json.load(fh)


def save_solution(schedule: BatchSchedule, path: str | Path, extra: Mapping | None = None) -> None:
    out = schedule.to_dict()
    if extra:
        out.update(extra)
    Path(path).write_text(json.dumps(out, indent=1) + "\n")
