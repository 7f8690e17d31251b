"""Command line interface: ``tardybatch <command> ...``.

Exit codes: 0 ok, 1 usage error, 2 validation error, 3 internal error.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .construction import RclConfig
from .errors import SchedulingError, TooLarge, ValidationError
from .generator import GenConfig, generate
from .grasp import GraspConfig, best_construction_baseline, improvement_pct, solve
from .instance import evaluate, load_instance, load_solution, save_instance, save_solution
from .milp import build_model, write_lp_text
from .oracle import exhaustive_optimum, golden_record, moore_hodgson, singleton_reduction_check

log = logging.getLogger("tardybatch")

EXIT_OK, EXIT_USAGE, EXIT_VALIDATION, EXIT_INTERNAL = 0, 1, 2, 3
DEFAULT_GAMMAS = (0.2, 0.33, 0.5)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _non_negative_int(text):
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text}")
    return v


def _rcl(text):
    try:
        return RclConfig.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _emit(args, payload: dict, text: str) -> None:
    if args.json:
        print(json.dumps(payload, sort_keys=True))
    elif not args.quiet:
        print(text)


# --- commands ---------------------------------------------------------------


def cmd_generate(args) -> int:
    lo, hi = args.size_range
    cfg = GenConfig(n=args.n, capacity=args.capacity, gamma=args.gamma, seed=args.seed, size_range=(lo, hi))
    inst = generate(cfg)
    save_instance(inst, args.out)
    _emit(args, {"out": str(args.out), "n": inst.n}, f"wrote {inst.n}-job instance to {args.out}")
    return EXIT_OK


def _grasp_config(args) -> GraspConfig:
    return GraspConfig(
        max_iters=args.iters,
        pr_iters=args.pr_iters,
        rcl=args.rcl,
        alpha=args.alpha,
        ls_budget=args.ls_budget,
        num_runs=args.runs,
        no_improve_limit=args.no_improve,
        seed=args.seed,
        threads=args.threads,
        time_limit=args.time_limit,
    )


def cmd_solve(args) -> int:
    inst = load_instance(args.instance)
    report = solve(inst, _grasp_config(args))
    extra = {"report": report.to_dict()}
    if args.out:
        save_solution(report.schedule, args.out, extra)
    if args.log:
        report.write_log_csv(args.log)
    payload = {**report.schedule.to_dict(), **extra}
    _emit(
        args,
        payload,
        f"tardy={report.tardy_count} batches={len(report.schedule.batches)} "
        f"makespan={report.schedule.makespan} time={report.elapsed:.2f}s",
    )
    return EXIT_OK


def cmd_verify(args) -> int:
    inst = load_instance(args.instance)
    sol = load_solution(args.solution)
    if "batches" not in sol:
        raise ValidationError("solution file has no 'batches'")
    sched, summary = evaluate(inst, sol["batches"])
    payload = {"feasible": True, "tardy_count": summary.tardy_count, "tardy_jobs": list(summary.tardy_job_ids)}
    text = f"feasible, tardy={summary.tardy_count}"
    claimed = sol.get("tardy_count")
    if claimed is not None and claimed != summary.tardy_count:
        payload["claimed_tardy_count"] = claimed
        text += f" (file claims {claimed})"
    if inst.n <= args.limit:
        opt = exhaustive_optimum(inst, args.limit).optimum_tardy
        payload.update(optimum=opt, gap=summary.tardy_count - opt)
        text += f", optimum={opt}, gap={summary.tardy_count - opt}"
    _emit(args, payload, text)
    if claimed is not None and claimed != summary.tardy_count:
        return EXIT_VALIDATION
    return EXIT_OK


def cmd_oracle(args) -> int:
    inst = load_instance(args.instance)
    res = exhaustive_optimum(inst, args.limit)
    payload = golden_record(inst, res)
    payload["nodes_explored"] = res.nodes_explored
    text = f"optimum={res.optimum_tardy} witness={[list(b) for b in res.witness.batches]}"
    if singleton_reduction_check(inst):
        mh = moore_hodgson([(j.p, j.d) for j in inst.jobs])[2]
        payload["moore_hodgson"] = mh
        text += f" moore_hodgson={mh}"
    if args.golden:
        Path(args.golden).write_text(json.dumps(payload, indent=1) + "\n")
    _emit(args, payload, text)
    return EXIT_OK


def cmd_export_milp(args) -> int:
    inst = load_instance(args.instance)
    model = build_model(inst, symmetry_cuts=args.symmetry_cuts)
    write_lp_text(model, args.out)
    _emit(
        args,
        {"out": str(args.out), "rows": len(model.rows), "binaries": len(model.binaries), "continuous": len(model.continuous)},
        f"wrote {len(model.rows)} rows, {len(model.variables)} variables to {args.out}",
    )
    return EXIT_OK


@dataclass(frozen=True)
class BenchSpec:
    cells: tuple[tuple[int, float, int], ...]  # (n, gamma, replications)
    grasp: GraspConfig
    out: Path
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        for n, gamma, reps in self.cells:
            if n < 1 or reps < 1 or gamma <= 0:
                raise ValueError(f"bad bench cell {(n, gamma, reps)}")


def replication_seed(master: int, cell: int, rep: int) -> int:
    return int(np.random.SeedSequence([master, cell, rep]).generate_state(1)[0])


def _bench_one(task):
    n, gamma, cell, rep, seed, grasp = task
    inst = generate(GenConfig(n=n, gamma=gamma, seed=seed))
    t0 = time.perf_counter()
    base, _ = best_construction_baseline(inst, grasp)
    t1 = time.perf_counter()
    report = solve(inst, grasp)
    t2 = time.perf_counter()
    return {
        "n": n,
        "gamma": gamma,
        "rep": rep,
        "seed": seed,
        "baseline_tardy": base,
        "grasp_tardy": report.tardy_count,
        "improvement_pct": improvement_pct(base, report.tardy_count),
        "baseline_s": t1 - t0,
        "grasp_s": t2 - t1,
    }


def run_bench(spec: BenchSpec) -> list[dict]:
    """Rows per replication plus one aggregate row per cell (``rep="mean"``).

    The baseline is the best-of-rules construction from the same draws GRASP
    starts with, so GRASP can only match or beat it.
    """
    tasks = []
    for c, (n, gamma, reps) in enumerate(spec.cells):
        for r in range(reps):
            seed = replication_seed(spec.seed, c, r)
            tasks.append((n, gamma, c, r, seed, replace(spec.grasp, seed=seed)))
    if spec.workers > 1:
        with ProcessPoolExecutor(spec.workers) as ex:
            rows = list(ex.map(_bench_one, tasks))
    else:
        rows = [_bench_one(t) for t in tasks]
    out = []
    for c, (n, gamma, reps) in enumerate(spec.cells):
        cell_rows = [row for row, t in zip(rows, tasks) if t[2] == c]
        out.extend(cell_rows)
        imps = [r["improvement_pct"] for r in cell_rows if r["improvement_pct"] is not None]
        out.append(
            {
                "n": n,
                "gamma": gamma,
                "rep": "mean",
                "seed": "",
                "baseline_tardy": float(np.mean([r["baseline_tardy"] for r in cell_rows])),
                "grasp_tardy": float(np.mean([r["grasp_tardy"] for r in cell_rows])),
                "improvement_pct": float(np.mean(imps)) if imps else None,
                "baseline_s": float(np.mean([r["baseline_s"] for r in cell_rows])),
                "grasp_s": float(np.mean([r["grasp_s"] for r in cell_rows])),
            }
        )
    return out


BENCH_FIELDS = [
    "n", "gamma", "rep", "seed", "baseline_tardy", "grasp_tardy", "improvement_pct", "baseline_s", "grasp_s",
]


def write_bench_csv(rows: list[dict], path: Path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write("# baseline = best improved construction over all rules, first iteration\n")
        w = csv.DictWriter(fh, fieldnames=BENCH_FIELDS)
        w.writeheader()
        for r in rows:
            r = dict(r)
            r["improvement_pct"] = "n/a" if r["improvement_pct"] is None else f"{r['improvement_pct']:.6f}"
            w.writerow(r)


def cmd_bench(args) -> int:
    gammas = args.gamma or list(DEFAULT_GAMMAS)
    cells = tuple((n, g, args.reps) for n in args.n for g in gammas)
    spec = BenchSpec(cells, _grasp_config(args), Path(args.out), args.seed, args.workers)
    out = spec.out
    if out.suffix.lower() != ".csv":
        out.mkdir(parents=True, exist_ok=True)
        out = out / "bench.csv"
    rows = run_bench(spec)
    write_bench_csv(rows, out)
    means = [r for r in rows if r["rep"] == "mean"]
    text = "\n".join(
        f"n={r['n']} gamma={r['gamma']}: baseline={r['baseline_tardy']:.2f} grasp={r['grasp_tardy']:.2f} "
        f"improvement={'n/a' if r['improvement_pct'] is None else format(r['improvement_pct'], '.2%')}"
        for r in means
    )
    _emit(args, {"out": str(out), "cells": means}, text)
    return EXIT_OK


# --- parser -----------------------------------------------------------------


def _add_solver_flags(p):
    p.add_argument("--rcl", type=_rcl, default=RclConfig(0.10, "fraction"), help="RCL size: '3' or '10%%'")
    p.add_argument("--iters", type=_positive_int, default=1000)
    p.add_argument("--pr-iters", type=_non_negative_int, default=1000)
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--ls-budget", type=_non_negative_int, default=None, help="moves per local-search sweep (default 50n)")
    p.add_argument("--runs", type=_positive_int, default=1)
    p.add_argument("--no-improve", type=_positive_int, default=None)
    p.add_argument("--threads", type=_positive_int, default=1)
    p.add_argument("--time-limit", type=float, default=None)


def build_parser() -> argparse.ArgumentParser:
    def global_flags(suppress: bool):
        # subcommands repeat the global flags without defaults, so a value
        # given before the subcommand is not reset
        g = argparse.ArgumentParser(add_help=False)
        kw = {"default": argparse.SUPPRESS} if suppress else {}
        g.add_argument("--seed", "-seed", type=int, **(kw or {"default": 0}))
        g.add_argument("--quiet", action="store_true", **kw)
        g.add_argument("--json", action="store_true", help="print machine-readable JSON", **kw)
        return g

    common = global_flags(True)
    parser = _Parser(prog="tardybatch", description=__doc__, parents=[global_flags(False)])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("generate", parents=[common], help="write a random instance")
    p.add_argument("-n", type=_positive_int, required=True)
    p.add_argument("--capacity", type=_positive_int, default=40)
    p.add_argument("--gamma", "-gamma", type=float, default=0.5)
    p.add_argument("--size-range", type=int, nargs=2, default=(1, 30), metavar=("LO", "HI"))
    p.add_argument("-o", "--out", required=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("solve", parents=[common], help="run GRASP with path relinking")
    p.add_argument("instance")
    _add_solver_flags(p)
    p.add_argument("-o", "--out", help="solution file (JSON)")
    p.add_argument("--log", help="iteration log (CSV)")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", parents=[common], help="re-evaluate a solution file")
    p.add_argument("instance")
    p.add_argument("solution")
    p.add_argument("--limit", type=int, default=9, help="largest n compared against the exact optimum")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("oracle", parents=[common], help="exact optimum of a small instance")
    p.add_argument("instance")
    p.add_argument("--limit", type=int, default=9)
    p.add_argument("--golden", help="write a golden record (JSON)")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("export-milp", parents=[common], help="write the MILP as LP text")
    p.add_argument("instance")
    p.add_argument("-o", "--out", required=True)
    p.add_argument("--symmetry-cuts", action="store_true")
    p.set_defaults(func=cmd_export_milp)

    p = sub.add_parser("bench", parents=[common], help="GRASP vs construction-only sweep")
    p.add_argument("--n", type=_positive_int, nargs="+", default=[50])
    p.add_argument("--gamma", type=float, nargs="+", default=None)
    p.add_argument("--reps", type=_positive_int, default=10)
    p.add_argument("--workers", type=_positive_int, default=1)
    p.add_argument("-o", "--out", required=True, help="CSV file or output directory")
    _add_solver_flags(p)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # usage errors and --help
        return int(exc.code or 0)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO, format="%(message)s")
    try:
        return args.func(args)
    except (ValidationError, TooLarge) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (SchedulingError, ValueError) as exc:  # includes malformed JSON
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except Exception as exc:  # pragma: no cover
        log.exception("internal error")
        print(f"internal error: {exc!r}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
