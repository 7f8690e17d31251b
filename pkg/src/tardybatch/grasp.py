"""GRASP with path relinking.

Each iteration builds one randomized construction per priority rule, keeps
the best, improves it by local search and offers every sequence to the elite
pool. After the iteration budget, path relinking runs on the pool. The
incumbent is the best schedule seen in any phase.

Iteration ``i`` of run ``r`` draws from its own stream seeded by
``(seed, r, i)``, so iterations can be computed in any order (or on several
threads) and reduced in iteration order with identical results.
"""
from __future__ import annotations

import csv
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

import numpy as np

from . import _kernels as K
from .construction import ALL_RULES, PriorityRule, RclConfig, _priority_positions, draw_positions
from .instance import BatchSchedule, Instance, SolutionSummary, schedule_from_assignment
from .local_search import climb, default_budget
from .path_relinking import EliteEntry, ElitePool, SequenceEvaluator, run_path_relinking


@dataclass(frozen=True)
class GraspConfig:
    max_iters: int = 1000
    pr_iters: int = 1000
    rcl: RclConfig = field(default_factory=lambda: RclConfig(0.10, "fraction"))
    alpha: float = 0.0
    ls_budget: int | None = None  # None -> 50 * n
    num_runs: int = 1
    no_improve_limit: int | None = None
    seed: int = 0
    pool_size: int = 10
    rules: tuple[PriorityRule, ...] = ALL_RULES
    threads: int = 1
    time_limit: float | None = None  # seconds; safety valve only

    def __post_init__(self):
        object.__setattr__(self, "rcl", RclConfig.parse(self.rcl))
        if self.max_iters < 1 or self.num_runs < 1 or self.pool_size < 1 or self.threads < 1:
            raise ValueError("max_iters, num_runs, pool_size and threads must be >= 1")
        if self.pr_iters < 0:
            raise ValueError("pr_iters must be >= 0")
        if self.ls_budget is not None and self.ls_budget < 0:
            raise ValueError("ls_budget must be >= 0")
        if self.no_improve_limit is not None and self.no_improve_limit < 1:
            raise ValueError("no_improve_limit must be >= 1")
        if self.alpha < 0:
            raise ValueError("alpha must be >= 0")
        if not self.rules:
            raise ValueError("at least one rule is required")


class IterationRecord(NamedTuple):
    phase: str
    run: int
    iteration: int
    best_tardy: int
    elapsed_ms: float


@dataclass
class SolveReport:
    schedule: BatchSchedule
    construction_best: int
    local_search_best: int
    path_relinking_best: int | None
    first_iteration: dict[str, int]
    iteration_log: list[IterationRecord]
    elapsed: float
    iterations_run: int
    config: GraspConfig

    @property
    def summary(self) -> SolutionSummary:
        return self.schedule.summary

    @property
    def tardy_count(self) -> int:
        return self.schedule.tardy_count

    def to_dict(self) -> dict:
        return {
            "tardy_count": self.tardy_count,
            "construction_best": self.construction_best,
            "local_search_best": self.local_search_best,
            "path_relinking_best": self.path_relinking_best,
            "first_iteration": self.first_iteration,
            "iterations_run": self.iterations_run,
            "elapsed_s": round(self.elapsed, 6),
            "seed": self.config.seed,
        }

    def write_log_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["phase", "run", "iter", "best_tardy", "elapsed_ms"])
            for rec in self.iteration_log:
                w.writerow([rec.phase, rec.run, rec.iteration, rec.best_tardy, f"{rec.elapsed_ms:.3f}"])


def improvement_pct(reference_tardy: int, candidate_tardy: int) -> float | None:
    """Relative tardy-count improvement of ``candidate`` over ``reference``.

    Negative when the reference is better. None (undefined) when the
    reference is 0 and the candidate is not.
    """
    if reference_tardy < 0 or candidate_tardy < 0:
        raise ValueError("tardy counts must be non-negative")
    if reference_tardy == 0:
        return 0.0 if candidate_tardy == 0 else None
    return (reference_tardy - candidate_tardy) / reference_tardy


def iteration_rng(seed: int, run: int, iteration: int) -> np.random.Generator:
    return np.random.default_rng([int(seed), int(run), int(iteration)])


def schedule_to_sequence(inst: Instance, assign: np.ndarray, nb: int) -> np.ndarray:
    """Positions of a job order that summarizes a schedule: on-time jobs by
    batch position, tardy jobs after them; EDD then id inside each group."""
    P = np.zeros(nb, dtype=np.int64)
    np.maximum.at(P, assign, inst.p)
    C = np.cumsum(P)
    tardy = C[assign] > inst.d
    return np.lexsort((inst.id_array, inst.d, assign, tardy)).astype(np.int64)


class _IterResult(NamedTuple):
    seqs: list  # per rule: (positions, tardy)
    best_rule: int
    construction_val: int
    assign: np.ndarray
    nb: int
    val: int


class _Solver:
    def __init__(self, instance: Instance, config: GraspConfig):
        self.inst = instance
        self.cfg = config
        self.k = config.rcl.resolve(instance.n)
        self.budget = default_budget(instance.n) if config.ls_budget is None else config.ls_budget
        self.orders = {
            r: None if r.is_random else _priority_positions(instance, r) for r in config.rules
        }

    def constructions(self, rng):
        inst = self.inst
        out = []
        for rule in self.cfg.rules:
            seq, _ = draw_positions(inst, rule, self.k, rng, self.orders[rule])
            assign, nb, val = K.decode_improved_best(inst.p, inst.s, inst.d, inst.capacity, seq)
            out.append((seq, assign, nb, int(val)))
        return out

    def iteration(self, run: int, it: int) -> _IterResult:
        inst = self.inst
        rng = iteration_rng(self.cfg.seed, run, it)
        built = self.constructions(rng)
        best = min(range(len(built)), key=lambda i: built[i][3])
        _, assign, nb, cval = built[best]
        if self.budget > 0 and cval > 0:
            assign, nb, val = climb(inst, assign, nb, self.budget, rng, self.cfg.alpha)
        else:
            val = cval
        return _IterResult([(b[0], b[3]) for b in built], best, cval, assign, int(nb), int(val))


def best_construction_baseline(instance: Instance, config: GraspConfig) -> tuple[int, BatchSchedule]:
    """Tardy count of the best rule construction of the first iteration; the
    same draws GRASP itself starts from."""
    solver = _Solver(instance, config)
    built = solver.constructions(iteration_rng(config.seed, 0, 0))
    seq, assign, nb, val = min(built, key=lambda b: b[3])
    return val, schedule_from_assignment(instance, assign, nb)


def _results(solver: _Solver, run: int, executor, chunk: int):
    cfg = solver.cfg
    for start in range(0, cfg.max_iters, chunk):
        ids = range(start, min(start + chunk, cfg.max_iters))
        if executor is None:
            results = [solver.iteration(run, i) for i in ids]
        else:
            results = list(executor.map(lambda i: solver.iteration(run, i), ids))
        yield from zip(ids, results)


def solve(instance: Instance, config: GraspConfig | None = None) -> SolveReport:
    """Run GRASP and then path relinking on ``instance``.

    Deterministic for a given ``config.seed``, whatever ``config.threads``.
    """
    cfg = config or GraspConfig()
    inst = instance
    t0 = time.perf_counter()
    solver = _Solver(inst, cfg)
    evaluator = SequenceEvaluator(inst)
    pool = ElitePool(cfg.pool_size)

    def elapsed_ms():
        return 1e3 * (time.perf_counter() - t0)

    inc_assign, inc_nb, inc_val = None, 0, inst.n + 1
    construction_best = ls_best = inst.n + 1
    first_iteration: dict[str, int] = {}
    log: list[IterationRecord] = []
    iterations_run = 0
    stop = False
    executor = ThreadPoolExecutor(cfg.threads) if cfg.threads > 1 else None
    try:
        for run in range(cfg.num_runs):
            no_improve = 0
            for i, res in _results(solver, run, executor, 4 * cfg.threads):
                iterations_run += 1
                if run == 0 and i == 0:
                    first_iteration = {r.name: v for r, (_, v) in zip(cfg.rules, res.seqs)}
                construction_best = min(construction_best, res.construction_val)
                ls_best = min(ls_best, res.val)
                for seq, val in res.seqs:
                    pool.insert(EliteEntry(inst.to_ids(seq), val))
                pool.insert(evaluator.entry(inst.to_ids(schedule_to_sequence(inst, res.assign, res.nb))))
                if res.val < inc_val:
                    inc_assign, inc_nb, inc_val = res.assign, res.nb, res.val
                    no_improve = 0
                else:
                    no_improve += 1
                log.append(IterationRecord("grasp", run, i, inc_val, elapsed_ms()))
                if inc_val == 0 or (cfg.time_limit is not None and elapsed_ms() > 1e3 * cfg.time_limit):
                    stop = True
                if stop or (cfg.no_improve_limit is not None and no_improve >= cfg.no_improve_limit):
                    break
            if stop:
                break
    finally:
        if executor is not None:
            executor.shutdown()

    schedule = schedule_from_assignment(inst, inc_assign, inc_nb)
    pr_best = None
    if cfg.pr_iters > 0 and len(pool) >= 2 and inc_val > 0:
        pr_rng = np.random.default_rng([int(cfg.seed), 1 << 20])
        entry = run_path_relinking(pool, cfg.pr_iters, pr_rng, evaluator)
        pr_best = entry.tardy_count
        if entry.tardy_count < inc_val:
            schedule = evaluator.schedule(entry.sequence)
            inc_val = schedule.tardy_count
        log.append(IterationRecord("path_relinking", 0, cfg.pr_iters, inc_val, elapsed_ms()))

    return SolveReport(
        schedule=schedule,
        construction_best=construction_best,
        local_search_best=ls_best,
        path_relinking_best=pr_best,
        first_iteration=first_iteration,
        iteration_log=log,
        elapsed=time.perf_counter() - t0,
        iterations_run=iterations_run,
        config=cfg,
    )
