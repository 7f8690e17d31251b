import pytest
from hypothesis import given, settings, strategies as st

from tardybatch import Instance, Job, build_model, decode, evaluate, exhaustive_optimum, write_lp_text
from tardybatch.milp import encode_schedule, lp_text, read_lp_text

from conftest import make_instance, random_instances

scipy = pytest.importorskip("scipy")
from oracles import milp_optimum_from_lp  # noqa: E402


def test_two_job_counts():
    model = build_model(make_instance([4, 4], [5, 3], [5, 5], capacity=10))
    assert len(model.binaries) == 6 and len(model.continuous) == 6
    assert len(model.rows_of("ptime")) == 4
    assert len(model.rows_of("assign")) == 2
    assert len(model.rows_of("cap")) == 2
    assert len(model.rows_of("late")) == len(model.rows_of("early")) == 2
    assert model.M == 8 + 5 and model.e == 1


def test_single_job_file():
    text = lp_text(build_model(Instance((Job(1, 4, 2, 9),), 5)))
    parsed = read_lp_text(text)
    assert [v for v in parsed["binaries"] if v.startswith("NT_")] == ["NT_1"]
    assert [v for v in parsed["binaries"] if v.startswith("X_")] == ["X_1_1"]


@pytest.mark.parametrize("p, d, expected", [(4, 9, 0), (9, 9, 0), (10, 9, 1)])
def test_single_job_optimum(p, d, expected):
    assert milp_optimum_from_lp(lp_text(build_model(Instance((Job(1, p, 2, d),), 5)))) == expected


def test_bytes_deterministic(tmp_path, nine_jobs):
    a = write_lp_text(build_model(nine_jobs), tmp_path / "a.lp").read_bytes()
    b = write_lp_text(build_model(nine_jobs), tmp_path / "b.lp").read_bytes()
    assert a == b


@pytest.mark.parametrize("cuts", [False, True])
def test_parse_back_matches(nine_jobs, cuts):
    model = build_model(nine_jobs, symmetry_cuts=cuts)
    parsed = read_lp_text(lp_text(model))
    assert len(parsed["rows"]) == len(model.rows)
    assert parsed["binaries"] == model.binaries
    assert len(parsed["bounds"]) == len(model.continuous)
    for (name, coeffs, sense, rhs), row in zip(parsed["rows"], model.rows):
        assert name == row.name and sense == row.sense and rhs == row.rhs
        assert coeffs == [(v, float(c)) for v, c in row.coeffs]


def test_known_schedules_encode_feasibly(nine_jobs):
    model = build_model(nine_jobs, symmetry_cuts=True)
    for batches in ([[5, 4, 1], [3, 2], [7, 8], [9], [6]], [[4, 2, 5, 8], [1, 6], [3], [7], [9]]):
        sched, summary = evaluate(nine_jobs, batches)
        values = encode_schedule(model, sched)
        assert model.violated_rows(values) == []
        assert model.check_domains(values) == []
        assert model.objective_value(values) == summary.tardy_count


def test_tampered_encoding_is_caught(nine_jobs):
    model = build_model(nine_jobs)
    sched, _ = evaluate(nine_jobs, [[5, 4, 1], [3, 2], [7, 8], [9], [6]])
    values = encode_schedule(model, sched)
    values["NT_2"] = 0.0  # job 2 is late
    assert [r.name for r in model.violated_rows(values)] == ["late_2"]


@st.composite
def tiny(draw):
    n = draw(st.integers(1, 6))
    cap = draw(st.integers(3, 20))
    jobs = tuple(
        Job(i + 1, p=draw(st.integers(1, 20)), s=draw(st.integers(1, cap)), d=draw(st.integers(1, 70)))
        for i in range(n)
    )
    return Instance(jobs, cap), draw(st.permutations(list(range(1, n + 1))))


@settings(max_examples=100, deadline=None)
@given(tiny())
def test_any_schedule_encodes(data):
    inst, seq = data
    model = build_model(inst)
    for mode in ("classic", "improved"):
        sched = decode(inst, seq, mode)
        values = encode_schedule(model, sched)
        assert model.violated_rows(values) == []
        assert model.objective_value(values) == sched.tardy_count


def test_external_solver_agrees_with_oracle():
    for inst in random_instances(6, n_range=(3, 5), seed=21, capacity=40):
        text = lp_text(build_model(inst, symmetry_cuts=True))
        assert milp_optimum_from_lp(text) == exhaustive_optimum(inst).optimum_tardy
