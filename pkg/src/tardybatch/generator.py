"""Random instance generation with FBLPT-calibrated due dates.

Draw order is fixed so an instance is reproducible from its seed: for each
job in id order ``s, p, r, w``; then ``z`` for each job in id order. The bit
generator is numpy's PCG64 (``np.random.default_rng``).
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .instance import Instance, Job

RNG_ALGORITHM = "numpy.PCG64"


def round_half_up(x: float) -> int:
    # the epsilon absorbs float noise such as 0.7 * 20 = 13.999999999999998
    return int(math.floor(x + 0.5 + 1e-9))


def fblpt_makespan(processing_times, capacity: int) -> int:
    """Makespan of full-batch LPT with unit-sized jobs.

    Sorting by decreasing p and cutting into consecutive batches of
    ``capacity`` jobs, each batch costs its first (largest) p.

    >>> fblpt_makespan([10, 8, 6, 4], 2)
    16
    """
    p = sorted((int(x) for x in processing_times), reverse=True)
    if not p:
        raise ValueError("need at least one processing time")
    return sum(p[:: int(capacity)])


def due_date_window(p, r, capacity: int, R: float = 0.5, T: float = 0.3) -> tuple[int, int]:
    """Inclusive integer bounds of the z draw shared by all jobs."""
    cmax = min(int(x) for x in r) + fblpt_makespan(p, capacity)
    mu = (1.0 - T) * cmax
    return round_half_up(mu * (1.0 - R / 2.0)), round_half_up(mu * (1.0 + R / 2.0))


def due_date(gamma: float, r: int, p: int, z: int) -> int:
    return max(1, round_half_up(gamma * (r + p + z)))


@dataclass(frozen=True)
class GenConfig:
    n: int
    capacity: int = 40
    size_range: tuple[int, int] = (1, 30)
    p_range: tuple[int, int] = (8, 48)
    r_range: tuple[int, int] = (0, 48)
    w_range: tuple[int, int] = (1, 11)
    R: float = 0.5
    T: float = 0.3
    gamma: float = 0.5
    seed: int | None = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be at least 1")
        if self.capacity < 1:
            raise ValueError("capacity must be positive")
        for name in ("size_range", "p_range", "r_range", "w_range"):
            lo, hi = getattr(self, name)
            if lo > hi:
                raise ValueError(f"{name} is empty: {lo} > {hi}")
        if self.size_range[0] < 1 or self.p_range[0] < 1 or self.w_range[0] < 1 or self.r_range[0] < 0:
            raise ValueError("ranges must respect p, s, w >= 1 and r >= 0")
        if self.size_range[1] > self.capacity:
            raise ValueError("size_range exceeds capacity")
        if not 0 < self.R < 2:
            raise ValueError("R must lie in (0, 2)")
        if not 0 <= self.T < 1:
            raise ValueError("T must lie in [0, 1)")
        if self.gamma <= 0:
            raise ValueError("gamma must be positive")


def generate(config: GenConfig) -> Instance:
    rng = np.random.default_rng(config.seed)

    def draw(lo_hi):
        return int(rng.integers(lo_hi[0], lo_hi[1], endpoint=True))

    rows = []
    for _ in range(config.n):
        rows.append((draw(config.size_range), draw(config.p_range), draw(config.r_range), draw(config.w_range)))
    s, p, r, w = (list(col) for col in zip(*rows))
    zlo, zhi = due_date_window(p, r, config.capacity, config.R, config.T)
    z = [int(rng.integers(zlo, zhi, endpoint=True)) for _ in range(config.n)]
    jobs = tuple(
        Job(id=i + 1, p=p[i], s=s[i], d=due_date(config.gamma, r[i], p[i], z[i]), r=r[i], w=w[i])
        for i in range(config.n)
    )
    gen = asdict(config)
    gen["rng"] = RNG_ALGORITHM
    return Instance(jobs, config.capacity, {"gen": gen})
