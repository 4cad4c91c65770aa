from __future__ import annotations

import csv
import io
import json

import pytest

from causalflow.report import NOTES, ReportRow, _compare, build_row, to_csv, to_json, to_text, truncated
from causalflow.resources import FAMILIES, family_budget, subdivide, summarize
from causalflow.topology import TopologyError, set_level_graph

from conftest import fixture


def test_summary_two_eloop_6():
    s = summarize(fixture("two-eloop-6"))
    assert (s.e_qubits, s.a_qubits, s.total_qubits) == (6, 3, 10)
    assert s.depth == 14
    assert s.circuit_mcx == s.oracle_mcx + 1  # plus the diffuser's MCX


def test_depth_is_twice_compute_plus_four():
    for name in ("two-eloop-6", "three-eloop-6", "four-eloop-c-12"):
        s = summarize(fixture(name))
        assert s.depth == 2 * s.compute_depth + 4


def test_sequential_schedule_five_eloop():
    assert summarize(fixture("five-eloop-10"), schedule="sequential").depth == 44


def test_subdivide_builds_valid_paths():
    j, ends = FAMILIES["three"]
    t = subdivide("k4", j, ends, [2, 1, 3, 1, 1, 2])
    assert t.n_edges == 10 and t.vertex_count == 4 + 4
    assert [len(se.path) for se in set_level_graph(t).set_edges] == [2, 1, 3, 1, 1, 2]


def test_family_budget_shape():
    b = family_budget("three")
    assert (b.a_min, b.a_max) == (4, 7)
    assert "n+(5 to 9)" in b.describe()


def row(**over) -> ReportRow:
    base = dict(fixture="x", n_edges=6, e_qubits=6, a_qubits=3, total_qubits=10, oracle_mcx=9, x_gates=1,
                depth=14, theta_deg=36.83, predicted_success=0.877, causal_count=23, extracted_count=23,
                chromatic=46, backend="phase", schedule="greedy",
                reference={"total_qubits": 10, "depth": 14, "theta_deg": 36.8, "success": 0.88,
                           "causal_states": 23, "clauses": 3})
    base.update(over)
    r = ReportRow(**base)
    r.matches = _compare(r)
    return r


def test_match_flags_use_tolerances():
    assert row().ok
    assert not row(depth=17).matches["depth"]
    assert row(depth=16).matches["depth"]
    assert not row(theta_deg=36.86).matches["theta_deg"]
    assert not row(extracted_count=22).matches["causal_states"]
    r = row(depth=15, reference={"depth": 14, "depth_tol": 0})
    assert not r.ok


def test_outputs_parse():
    rows = [row(), row(fixture="y", depth=30)]
    data = json.loads(to_json(rows))
    assert data["ok"] is False and len(data["rows"]) == 2
    parsed = list(csv.DictReader(io.StringIO(to_csv(rows))))
    assert parsed[1]["mismatches"] == "depth" and parsed[0]["ok"] == "True"
    text = to_text(rows)
    assert "30/14*" in text and text.splitlines()[0].startswith("fixture")


def test_build_row_dense_and_phase_agree():
    t = fixture("three-eloop-6")
    r1, p1 = build_row(t, backend="dense")
    r2, p2 = build_row(t, backend="phase")
    assert r1.ok and r2.ok
    assert abs(p1 - p2).max() < 1e-10
    with pytest.raises(ValueError):
        build_row(t, backend="gpu")


def test_failing_rows_carry_notes():
    r, _ = build_row(fixture("one-eloop-3"))
    assert not r.ok and r.notes == NOTES["one-eloop-3"]


def test_truncated():
    assert truncated(37.761, 1) == 37.7
    assert truncated(0.8774, 2) == 0.87
    assert truncated(0.99, 2) == 0.99
