"""Reproduction report: recompute each fixture's headline numbers and compare to its reference block."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from importlib import resources as _res
from pathlib import Path
from typing import Iterable

import numpy as np

from .grover import plan
from .oracle import allocate_registers, build_grover_circuit
from .resources import summarize
from .sim import MAX_DENSE_WIDTH, extract_winners, run_dense, run_phase
from .topology import Topology, chromatic_acyclic_count, enumerate_causal, load_topology, loop_clauses

THETA_TOL = 0.05
SUCCESS_TOL = 0.005
DEPTH_TOL = 2

# Known, analysed departures from the reference values.
NOTES: dict[str, list[str]] = {
    "one-eloop-3": [
        "reference angle 37.7 is the exact 37.76 truncated, not rounded",
    ],
    "two-eloop-5": [
        "the outer square clause is implied by the two triangles; it is kept (clause_set full) "
        "to match the reference register size",
    ],
    "two-eloop-6": [
        "reference success 0.87 is the exact 0.877 truncated, not rounded",
    ],
    "four-eloop-u-9": [
        "reference depth 32 needs every X toggle hidden under clause layers; "
        "the greedy schedule leaves 2 toggle layers per compute section (+4)",
    ],
    "four-eloop-c-16": [
        "one padding qubit plus 13 clauses gives 31 qubits; the reference total 30 "
        "is one short of its own |e|=17 and 13 clauses",
        "reference success 0.98 is the exact 0.9857 truncated, not rounded",
        "greedy toggle scheduling packs the 26 compute patterns tighter than the "
        "reference circuit (-6); no single ordering rule reproduces every reference depth",
    ],
    "five-eloop-10": [
        "reference angle 28.9 and success 0.99 are the exact 28.955 and 0.997 truncated",
        "reference depth 42 matches fully sequential X sandwiches (--schedule sequential "
        "gives 44); greedy overlaps the toggles and reaches 20",
    ],
}


def fixture_dir() -> Path:
    return Path(str(_res.files("causalflow") / "fixtures"))


def bundled_fixtures(directory: Path | None = None) -> list[Path]:
    return sorted((directory or fixture_dir()).glob("*.json"))


@dataclass
class ReportRow:
    fixture: str
    n_edges: int
    e_qubits: int
    a_qubits: int
    total_qubits: int
    oracle_mcx: int
    x_gates: int
    depth: int
    theta_deg: float
    predicted_success: float
    causal_count: int
    extracted_count: int
    chromatic: int
    backend: str
    schedule: str
    reference: dict = field(default_factory=dict)
    matches: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(self.matches.values())

    def to_dict(self) -> dict:
        d = asdict(self)
        d["ok"] = self.ok
        return d


def _compare(row: ReportRow) -> dict[str, bool]:
    ref = row.reference
    m: dict[str, bool] = {}
    if "causal_states" in ref:
        m["causal_states"] = row.causal_count == row.extracted_count == ref["causal_states"]
    if "clauses" in ref:
        m["clauses"] = row.a_qubits == ref["clauses"]
    if "e_qubits" in ref:
        m["e_qubits"] = row.e_qubits == ref["e_qubits"]
    if "total_qubits" in ref:
        m["total_qubits"] = row.total_qubits == ref["total_qubits"]
    if "theta_deg" in ref:
        m["theta_deg"] = abs(row.theta_deg - ref["theta_deg"]) <= THETA_TOL
    if "success" in ref:
        m["success"] = abs(row.predicted_success - ref["success"]) <= SUCCESS_TOL
    if "depth" in ref:
        m["depth"] = abs(row.depth - ref["depth"]) <= ref.get("depth_tol", DEPTH_TOL)
    return m


def build_row(t: Topology, *, backend: str = "phase", schedule: str = "greedy",
              iterations: int | None = None) -> tuple[ReportRow, np.ndarray]:
    """Recompute one fixture; also returns the e-register distribution used for extraction."""
    clauses = loop_clauses(t)
    layout = allocate_registers(t, clauses)
    p = plan(t, clauses, iterations=iterations)
    if backend == "auto":
        backend = "dense" if layout.width <= MAX_DENSE_WIDTH else "phase"
    if backend == "dense":
        circ = build_grover_circuit(t, clauses, iterations=p.t, schedule=schedule, layout=layout)
        probs, _ = run_dense(circ)
    elif backend == "phase":
        probs = run_phase(t, clauses, p.t, layout=layout)
    else:
        raise ValueError(f"unknown backend {backend!r}")
    found = extract_winners(probs, p, t, clauses, mirror=False, layout=layout)
    res = summarize(t, clauses, schedule=schedule)
    row = ReportRow(
        fixture=t.name, n_edges=t.n_edges, e_qubits=res.e_qubits, a_qubits=res.a_qubits,
        total_qubits=res.total_qubits, oracle_mcx=res.oracle_mcx, x_gates=res.x_gates,
        depth=res.depth, theta_deg=p.theta_deg, predicted_success=p.predicted_success,
        causal_count=enumerate_causal(t).count, extracted_count=found.count,
        chromatic=chromatic_acyclic_count(t), backend=backend, schedule=schedule,
        reference=dict(t.meta),
    )
    row.matches = _compare(row)
    if not row.ok:
        row.notes = list(NOTES.get(t.name, [])) or ["unexplained mismatch"]
    return row, probs


def build_report(paths: Iterable[Path], *, backend: str = "phase", schedule: str = "greedy"
                 ) -> list[tuple[ReportRow, np.ndarray]]:
    out = [build_row(load_topology(p), backend=backend, schedule=schedule) for p in paths]
    return sorted(out, key=lambda rp: rp[0].fixture)


COLUMNS = ("fixture", "e_qubits", "a_qubits", "total_qubits", "oracle_mcx", "x_gates", "depth",
           "theta_deg", "predicted_success", "causal_count", "extracted_count", "chromatic")


def _ref(row: ReportRow, key: str):
    return row.reference.get(key, "")


def to_csv(rows: list[ReportRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([*COLUMNS, "ref_total_qubits", "ref_clauses", "ref_depth", "ref_theta_deg",
                "ref_success", "ref_causal_states", "ref_toffoli", "ref_not_gates", "mismatches", "ok"])
    for r in rows:
        vals = [getattr(r, c) for c in COLUMNS]
        vals[7] = f"{r.theta_deg:.3f}"
        vals[8] = f"{r.predicted_success:.4f}"
        bad = ";".join(k for k, v in r.matches.items() if not v)
        w.writerow([*vals, _ref(r, "total_qubits"), _ref(r, "clauses"), _ref(r, "depth"),
                    _ref(r, "theta_deg"), _ref(r, "success"), _ref(r, "causal_states"),
                    _ref(r, "toffoli"), _ref(r, "not_gates"), bad, r.ok])
    return buf.getvalue()


def to_json(rows: list[ReportRow]) -> str:
    return json.dumps({"rows": [r.to_dict() for r in rows],
                       "tolerances": {"theta_deg": THETA_TOL, "success": SUCCESS_TOL, "depth": DEPTH_TOL},
                       "ok": all(r.ok for r in rows)}, indent=2, sort_keys=True) + "\n"


def to_text(rows: list[ReportRow]) -> str:
    def cell(r: ReportRow, label: str, value, key: str, fmt: str = "{}") -> str:
        ref = r.reference.get(key)
        mark = "" if r.matches.get(label, True) else "*"
        shown = fmt.format(value)
        return f"{shown}{mark}" if ref is None else f"{shown}/{ref}{mark}"

    head = ["fixture", "qubits", "clauses", "depth", "theta", "success", "causal", "mcx", "ok"]
    lines = []
    table = []
    for r in rows:
        table.append([
            r.fixture,
            cell(r, "total_qubits", r.total_qubits, "total_qubits"),
            cell(r, "clauses", r.a_qubits, "clauses"),
            cell(r, "depth", r.depth, "depth"),
            cell(r, "theta_deg", r.theta_deg, "theta_deg", "{:.2f}"),
            cell(r, "success", r.predicted_success, "success", "{:.3f}"),
            cell(r, "causal_states", r.extracted_count, "causal_states"),
            str(r.oracle_mcx),
            "yes" if r.ok else "NO",
        ])
    widths = [max(len(h), *(len(row[i]) for row in table)) for i, h in enumerate(head)]
    lines.append("  ".join(h.ljust(w) for h, w in zip(head, widths)))
    lines.append("  ".join("-" * w for w in widths))
    lines.extend("  ".join(c.ljust(w) for c, w in zip(row, widths)) for row in table)
    lines.append("")
    lines.append("computed/reference; * marks a value outside tolerance "
                 f"(theta {THETA_TOL} deg, success {SUCCESS_TOL}, depth +-{DEPTH_TOL})")
    for r in rows:
        for n in r.notes:
            lines.append(f"  {r.fixture}: {n}")
    return "\n".join(lines) + "\n"


def truncated(value: float, digits: int) -> float:
    """``value`` cut (not rounded) to ``digits`` decimals."""
    f = 10 ** digits
    return math.floor(value * f + 1e-9) / f
