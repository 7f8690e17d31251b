"""Minimize the number of tardy jobs on a single capacitated batch machine.

GRASP with path relinking, exact small-instance oracles, a random instance
generator and a MILP exporter.
"""
from .construction import (
    ALL_RULES,
    PriorityRule,
    RclConfig,
    classic_greedy,
    construct_all,
    decode,
    improved_greedy,
    pick_sequence,
    priority_sequence,
    rcl_pick,
)
from .errors import *  # noqa: F401,F403
from .generator import GenConfig, fblpt_makespan, generate
from .grasp import GraspConfig, SolveReport, improvement_pct, solve
from .instance import (
    BatchSchedule,
    Instance,
    Job,
    SolutionSummary,
    evaluate,
    load_instance,
    save_instance,
    tardy_count_of_sequence,
    validate_instance,
)
from .local_search import NEW_BATCH, batch_interchange, insert_a, insert_b, local_search
from .milp import build_model, write_lp_text
from .oracle import exhaustive_optimum, moore_hodgson, singleton_reduction_check
from .path_relinking import EliteEntry, ElitePool, SequenceEvaluator, pool_insert, relink, run_path_relinking

__version__ = "0.1.0"
