"""Mixed-integer model of the batching problem, written as LP text.

Batch slots are indexed 1..n. Variable names: ``NT_j`` (job j tardy),
``X_j_b`` (job j in slot b), ``c_j`` (job completion), ``Cb_b`` and ``P_b``
(slot completion and processing time). Rows are tagged with the constraint
family they belong to:

========  ==========================================================
assign    each job in exactly one slot
cap       slot load within capacity
ptime     slot processing time covers each member's p
first     completion of slot 1 equals its processing time
chain     slot completion at least previous completion plus own time
jobc      job completion at least its slot's completion
late      job on time unless flagged tardy
early     tardy flag only when completion exceeds the due date by ``e``
sym       optional: slot b+1 used only if slot b is used
========  ==========================================================
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

from .instance import BatchSchedule, Instance


@dataclass(frozen=True)
class Row:
    name: str
    family: str
    coeffs: tuple[tuple[str, float], ...]
    sense: str  # "<=", ">=", "="
    rhs: float

    def activity(self, values: Mapping[str, float]) -> float:
        return sum(c * values.get(v, 0.0) for v, c in self.coeffs)

    def satisfied(self, values: Mapping[str, float], tol: float = 1e-9) -> bool:
        a = self.activity(values)
        if self.sense == "<=":
            return a <= self.rhs + tol
        if self.sense == ">=":
            return a >= self.rhs - tol
        return abs(a - self.rhs) <= tol


@dataclass
class MilpModel:
    binaries: list[str]
    continuous: list[str]
    objective: list[tuple[str, float]]
    rows: list[Row]
    M: int
    e: int
    n: int
    meta: dict = field(default_factory=dict)

    @property
    def variables(self) -> list[str]:
        return self.binaries + self.continuous

    def rows_of(self, family: str) -> list[Row]:
        return [r for r in self.rows if r.family == family]

    def objective_value(self, values: Mapping[str, float]) -> float:
        return sum(c * values.get(v, 0.0) for v, c in self.objective)

    def violated_rows(self, values: Mapping[str, float], tol: float = 1e-9) -> list[Row]:
        bad = [r for r in self.rows if not r.satisfied(values, tol)]
        return bad

    def check_domains(self, values: Mapping[str, float], tol: float = 1e-9) -> list[str]:
        out = []
        for v in self.binaries:
            x = values.get(v, 0.0)
            if min(abs(x), abs(x - 1)) > tol:
                out.append(f"{v}={x} is not binary")
        for v in self.continuous:
            if values.get(v, 0.0) < -tol:
                out.append(f"{v}={values[v]} is negative")
        return out


def build_model(instance: Instance, symmetry_cuts: bool = False) -> MilpModel:
    n = instance.n
    ids = instance.ids
    slots = range(1, n + 1)
    M = int(instance.p.sum() + instance.d.max())
    e = 1
    NT = {j: f"NT_{j}" for j in ids}
    X = {(j, b): f"X_{j}_{b}" for j in ids for b in slots}
    c = {j: f"c_{j}" for j in ids}
    Cb = {b: f"Cb_{b}" for b in slots}
    P = {b: f"P_{b}" for b in slots}
    rows: list[Row] = []

    def add(name, family, coeffs, sense, rhs):
        rows.append(Row(name, family, tuple(coeffs), sense, rhs))

    for j in ids:
        add(f"assign_{j}", "assign", [(X[j, b], 1) for b in slots], "=", 1)
    for b in slots:
        add(f"cap_{b}", "cap", [(X[j, b], instance.job(j).s) for j in ids], "<=", instance.capacity)
    for j in ids:
        for b in slots:
            add(f"ptime_{j}_{b}", "ptime", [(P[b], 1), (X[j, b], -instance.job(j).p)], ">=", 0)
    add("first", "first", [(Cb[1], 1), (P[1], -1)], "=", 0)
    for b in slots:
        if b > 1:
            add(f"chain_{b}", "chain", [(Cb[b], 1), (Cb[b - 1], -1), (P[b], -1)], ">=", 0)
    for j in ids:
        for b in slots:
            add(f"jobc_{j}_{b}", "jobc", [(c[j], 1), (Cb[b], -1), (X[j, b], -M)], ">=", -M)
    for j in ids:
        dj = instance.job(j).d
        add(f"late_{j}", "late", [(c[j], 1), (NT[j], -M)], "<=", dj)
        add(f"early_{j}", "early", [(c[j], 1), (NT[j], -M)], ">=", dj + e - M)
    if symmetry_cuts:
        for b in slots:
            if b < n:
                for j in ids:
                    add(f"sym_{b}_{j}", "sym", [*((X[i, b], 1) for i in ids), (X[j, b + 1], -1)], ">=", 0)
    return MilpModel(
        binaries=list(NT.values()) + list(X.values()),
        continuous=list(c.values()) + list(Cb.values()) + list(P.values()),
        objective=[(NT[j], 1) for j in ids],
        rows=rows,
        M=M,
        e=e,
        n=n,
        meta={"instance": instance.fingerprint(), "capacity": int(instance.capacity)},
    )


def _num(x: float) -> str:
    return str(int(x)) if float(x).is_integer() else repr(float(x))


def _expr(coeffs) -> str:
    parts = []
    for k, (v, coef) in enumerate(coeffs):
        sign = "-" if coef < 0 else "+"
        mag = abs(coef)
        term = v if mag == 1 else f"{_num(mag)} {v}"
        if k == 0:
            parts.append(term if sign == "+" else f"- {term}")
        else:
            parts.append(f"{sign} {term}")
    return " ".join(parts) if parts else "0"


def lp_text(model: MilpModel) -> str:
    lines = [
        f"\\ batch scheduling, minimize tardy jobs; n={model.n} M={model.M} e={model.e}",
        f"\\ instance {model.meta.get('instance', '')}",
        "Minimize",
        f" obj: {_expr(model.objective)}",
        "Subject To",
    ]
    for r in model.rows:
        lines.append(f" {r.name}: {_expr(r.coeffs)} {r.sense} {_num(r.rhs)}")
    lines.append("Bounds")
    for v in model.continuous:
        lines.append(f" {v} >= 0")
    lines.append("Binaries")
    for k in range(0, len(model.binaries), 8):
        lines.append(" " + " ".join(model.binaries[k : k + 8]))
    lines.append("End")
    return "\n".join(lines) + "\n"


def write_lp_text(model: MilpModel, destination: str | Path) -> Path:
    path = Path(destination)
    path.write_text(lp_text(model))
    return path


_ROW = re.compile(r"^\s*(\w+):\s*(.*?)\s*(<=|>=|=)\s*(\S+)\s*$")
_TERM = re.compile(r"([+-]?)\s*(\d+(?:\.\d*)?(?:[eE][+-]?\d+)?)?\s*([A-Za-z_]\w*)")


def _parse_expr(text: str) -> list[tuple[str, float]]:
    out = []
    for sign, coef, var in _TERM.findall(text):
        val = float(coef) if coef else 1.0
        out.append((var, -val if sign == "-" else val))
    return out


def read_lp_text(text: str) -> dict:
    """Parse LP text produced by :func:`lp_text` (not a general LP reader).

    Returns ``{"objective": [...], "rows": [(name, coeffs, sense, rhs)],
    "bounds": [...], "binaries": [...]}``.
    """
    section = None
    out = {"objective": [], "rows": [], "bounds": [], "binaries": []}
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("\\"):
            continue
        low = line.lower()
        if low in ("minimize", "subject to", "bounds", "binaries", "end"):
            section = low
            continue
        if section == "minimize":
            out["objective"] = _parse_expr(line.split(":", 1)[1])
        elif section == "subject to":
            m = _ROW.match(line)
            if m is None:
                raise ValueError(f"cannot parse constraint line: {line!r}")
            name, expr, sense, rhs = m.groups()
            out["rows"].append((name, _parse_expr(expr), sense, float(rhs)))
        elif section == "bounds":
            out["bounds"].append(line)
        elif section == "binaries":
            out["binaries"].extend(line.split())
    return out


def encode_schedule(model: MilpModel, schedule: BatchSchedule) -> dict[str, float]:
    """Variable values representing ``schedule`` (slot b = batch position b)."""
    inst = schedule.instance
    values: dict[str, float] = {v: 0.0 for v in model.variables}
    nb = len(schedule.batches)
    for b, batch in enumerate(schedule.batches, start=1):
        values[f"P_{b}"] = schedule.batch_times[b - 1]
        values[f"Cb_{b}"] = schedule.completion_times[b - 1]
        for j in batch:
            values[f"X_{j}_{b}"] = 1.0
            values[f"c_{j}"] = schedule.completion_times[b - 1]
            values[f"NT_{j}"] = 1.0 if j in schedule.tardy else 0.0
    for b in range(nb + 1, inst.n + 1):
        values[f"P_{b}"] = 0.0
        values[f"Cb_{b}"] = schedule.makespan
    return values
