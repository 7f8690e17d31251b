"""Elite pool and swap-based path relinking over job sequences.

A sequence's fitness is the tardy count of its deterministic tardy-aware
decode (see :func:`tardybatch.construction.decode`).
"""
from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Callable, Iterator, Sequence


from . import _kernels as K
from .construction import decode
from .errors import NotSamePermutationSet, PoolTooSmall
from .instance import BatchSchedule, Instance, check_permutation


@dataclass(frozen=True)
class EliteEntry:
    sequence: tuple[int, ...]
    tardy_count: int

    @property
    def key(self):
        # total order used for best/worst; ties resolved lexicographically
        return (self.tardy_count, self.sequence)


class ElitePool:
    """At most ``capacity`` distinct sequences. Inserts are serialized."""

    def __init__(self, capacity: int = 10, entries: Sequence[EliteEntry] = ()):
        if capacity < 1:
            raise ValueError("pool capacity must be positive")
        self.capacity = capacity
        self.entries: list[EliteEntry] = []
        self._seen: set[tuple[int, ...]] = set()
        self._lock = threading.Lock()
        for e in entries:
            self.insert(e)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[EliteEntry]:
        return iter(self.entries)

    def __contains__(self, sequence) -> bool:
        return tuple(sequence) in self._seen

    @property
    def best(self) -> EliteEntry | None:
        return min(self.entries, key=lambda e: e.key) if self.entries else None

    @property
    def worst(self) -> EliteEntry | None:
        return max(self.entries, key=lambda e: e.key) if self.entries else None

    def insert(self, candidate: EliteEntry) -> bool:
        """Add ``candidate``; when full, it must strictly beat the worst entry
        (by tardy count) and replaces it. Duplicates are rejected."""
        seq = tuple(candidate.sequence)
        with self._lock:
            if seq in self._seen:
                return False
            if len(self.entries) < self.capacity:
                self.entries.append(candidate)
                self._seen.add(seq)
                return True
            w = max(range(len(self.entries)), key=lambda i: self.entries[i].key)
            if candidate.tardy_count >= self.entries[w].tardy_count:
                return False
            self._seen.discard(self.entries[w].sequence)
            self.entries[w] = candidate
            self._seen.add(seq)
            return True


def pool_insert(pool: ElitePool, candidate: EliteEntry) -> ElitePool:
    pool.insert(candidate)
    return pool


class SequenceEvaluator:
    """Callable fitness: job-id sequence -> tardy count of its improved decode."""

    def __init__(self, instance: Instance):
        self.instance = instance
        self.calls = 0

    def __call__(self, sequence: Sequence[int]) -> int:
        self.calls += 1
        inst = self.instance
        seq = inst.to_positions(sequence)
        return int(K.decode_eval(inst.p, inst.s, inst.d, inst.capacity, seq, True))

    def entry(self, sequence: Sequence[int]) -> EliteEntry:
        check_permutation(self.instance, sequence)
        return EliteEntry(tuple(sequence), self(sequence))

    def schedule(self, sequence: Sequence[int]) -> BatchSchedule:
        return decode(self.instance, sequence, "improved")

    def path(self, initial: Sequence[int], guiding: Sequence[int]):
        """Compiled relinking: every intermediate sequence with its fitness."""
        inst = self.instance
        out = K.relink_path(
            inst.p, inst.s, inst.d, inst.capacity, inst.to_positions(initial), inst.to_positions(guiding)
        )
        seqs, vals, m = out
        self.calls += int(m)
        return [(inst.to_ids(seqs[i]), int(vals[i])) for i in range(m)]


def swap_path(initial: Sequence, guiding: Sequence) -> Iterator[tuple]:
    """Yield the intermediate sequences from ``initial`` to ``guiding``.

    Positions are scanned left to right; a mismatch at position i is fixed by
    swapping in the guiding element from wherever it currently sits, so the
    prefix up to i agrees with ``guiding`` afterwards.
    """
    if len(initial) != len(guiding) or sorted(initial) != sorted(guiding) or len(set(initial)) != len(initial):
        raise NotSamePermutationSet("initial and guiding sequences are not permutations of the same ids")
    cur = list(initial)
    where = {x: i for i, x in enumerate(cur)}
    for i, g in enumerate(guiding):
        if cur[i] == g:
            continue
        t = where[g]
        a = cur[i]
        cur[i], cur[t] = g, a
        where[g], where[a] = i, t
        yield tuple(cur)


def relink(
    initial: Sequence[int], guiding: Sequence[int], evaluator: Callable[[Sequence[int]], int]
) -> tuple[tuple[int, ...], int]:
    """Best intermediate on the swap path (earliest on ties). With no swap
    needed the initial sequence is returned with its own fitness."""
    best = None
    for seq in swap_path(initial, guiding):
        val = evaluator(seq)
        if best is None or val < best[1]:
            best = (seq, val)
    if best is None:
        return tuple(initial), evaluator(initial)
    return best


def _path_with_values(initial, guiding, evaluator):
    if isinstance(evaluator, SequenceEvaluator):
        if len(initial) != len(guiding) or sorted(initial) != sorted(guiding):
            raise NotSamePermutationSet("initial and guiding sequences are not permutations of the same ids")
        return evaluator.path(initial, guiding)
    return [(seq, evaluator(seq)) for seq in swap_path(initial, guiding)]


def run_path_relinking(
    pool: ElitePool, iterations: int, rng, evaluator: Callable[[Sequence[int]], int]
) -> EliteEntry:
    """Relink a random pool entry towards the pool best, ``iterations`` times.

    Intermediates that strictly beat the pool's worst entry are inserted.
    If the drawn entry is the best one it is redrawn once; a second hit skips
    the iteration. Returns the best entry seen.
    """
    if len(pool) < 2:
        raise PoolTooSmall(f"path relinking needs at least 2 pool entries, got {len(pool)}")
    best = pool.best
    for _ in range(int(iterations)):
        if best.tardy_count == 0:
            break
        guiding = pool.best
        initial = pool.entries[int(rng.integers(len(pool)))]
        if initial.sequence == guiding.sequence:
            initial = pool.entries[int(rng.integers(len(pool)))]
            if initial.sequence == guiding.sequence:
                continue
        for seq, val in _path_with_values(initial.sequence, guiding.sequence, evaluator):
            entry = EliteEntry(seq, val)
            if entry.key < best.key:
                best = entry
            if val < pool.worst.tardy_count:
                pool.insert(entry)
    return best
