import sys
from pathlib import Path

import numpy as np
import pytest

from tardybatch import GenConfig, Instance, Job, generate

sys.path.insert(0, str(Path(__file__).parent))

GOLDEN = Path(__file__).parent / "golden"


def make_instance(sizes, times, dues, capacity=40):
    return Instance(tuple(Job(i + 1, p=p, s=s, d=d) for i, (s, p, d) in enumerate(zip(sizes, times, dues))), capacity)


@pytest.fixture(scope="session")
def nine_jobs():
    # nine jobs with tight, clustered due dates, capacity 40
    return make_instance(
        sizes=[17, 13, 27, 7, 15, 14, 27, 2, 28],
        times=[19, 28, 44, 14, 16, 23, 37, 10, 43],
        dues=[36, 35, 32, 32, 34, 36, 36, 37, 36],
    )


@pytest.fixture(scope="session")
def moves_instance():
    # 9-job instance used for the neighbourhood moves, capacity 40
    return make_instance(
        sizes=[37, 18, 5, 12, 9, 2, 10, 4, 25],
        times=[22, 4, 3, 2, 24, 50, 8, 5, 10],
        dues=[35, 10, 12, 21, 26, 15, 17, 36, 24],
    )


# known pick traces (1-based RCL index per step, RCL size 3)
CLASSIC_TRACE = [3, 2, 1, 2, 3, 1, 3, 2, 1]
IMPROVED_TRACE = [2, 3, 2, 2, 1, 2, 3, 2, 1]


def zero_based(trace):
    return [i - 1 for i in trace]


def random_instances(count, n_range=(10, 50), seed=0, gammas=(0.2, 0.33, 0.5), **kw):
    rng = np.random.default_rng(seed)
    for i in range(count):
        n = int(rng.integers(n_range[0], n_range[1] + 1))
        yield generate(GenConfig(n=n, gamma=gammas[i % len(gammas)], seed=int(rng.integers(2**31)), **kw))


# acceptance criteria outcomes, printed once at the end of the run
ACCEPTANCE: dict[int, tuple[str, bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE):
        title, ok, detail = ACCEPTANCE[num]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] #{num} {title}: {detail}")
