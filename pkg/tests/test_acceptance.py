"""Acceptance gate: one test per criterion, each recording a PASS/FAIL line."""
from __future__ import annotations

import math
import time

import numpy as np

from causalflow import circuit as C
from causalflow.circuit import Circuit, MCX
from causalflow.cli import REFERENCE_NATIVE_GATES, REFERENCE_TOFFOLI_DEPTH
from causalflow.grover import plan
from causalflow.oracle import allocate_registers, build_grover_circuit
from causalflow.report import NOTES
from causalflow.resources import FAMILIES, family_budget, subdivide, summarize
from causalflow.sim import extract_winners, run_dense, run_phase, winner_mask
from causalflow.topology import (
    acyclic_mask,
    chromatic_acyclic_count,
    complement,
    enumerate_causal,
    enumerate_cycles,
    loop_clauses,
    minimize_clauses,
    set_level_graph,
    violation_mask,
)
from causalflow.transpile import MODES, check_equivalence, decompose_mcx, decompose_toffoli

from conftest import fixture, record
from test_circuit import dag_depth, random_circuit

ORDER = ["one-eloop-3", "two-eloop-5", "three-eloop-6", "four-eloop-c-8", "four-eloop-ts-9", "four-eloop-u-9",
         "two-eloop-6", "three-eloop-9", "three-eloop-12", "four-eloop-c-12", "four-eloop-c-16", "five-eloop-10"]
CAUSAL = [3, 9, 12, 39, 102, 115, 23, 170, 1804, 1199, 28343, 240]
ANGLES = [(37.7, 0.84), (32.0, 0.99), (25.7, 0.95), (33.5, 0.97), (26.5, 0.97), (28.3, 0.99), (36.8, 0.87),
          (35.2, 0.93), (28.0, 0.99), (32.8, 0.98), (27.7, 0.98), (28.9, 0.99)]
QUBITS = [5, 9, 11, 13, 15, 19, 10, 14, 21, 18, None, 17]  # four-eloop-c-16 is flagged, not asserted
FLAGGED_QUBITS = {"four-eloop-c-16": 30}
CLAUSES = [1, 3, 4, 5, 5, 9, 3, 4, 7, 5, 13, 6]
DEPTHS = [6, 12, 18, 16, 20, 32, 14, 18, 32, 16, 46, 42]
EXACT_DEPTH = {"two-eloop-6"}
BUDGETS = {"three": (5, 9), "four": (6, 15), "five": (6, 22)}
DENSE_LIMIT = 21


def _finish(criterion: int, failures: list[str], summary: str) -> None:
    ok = not failures
    record(criterion, ok, summary if ok else f"{summary}; failing: {'; '.join(failures)}")
    assert ok, failures


def _winners(name):
    t = fixture(name)
    clauses = loop_clauses(t)
    probs = run_phase(t, clauses)
    return t, clauses, probs, extract_winners(probs, plan(t, clauses), t, clauses, mirror=False)


def test_criterion_1_causal_counts():
    failures = []
    for name, want in zip(ORDER, CAUSAL):
        start = time.perf_counter()
        brute = enumerate_causal(fixture(name)).count
        *_, found = _winners(name)
        elapsed = time.perf_counter() - start
        if not brute == found.count == want:
            failures.append(f"{name} brute {brute} extracted {found.count} want {want}")
        if elapsed >= 60:
            failures.append(f"{name} took {elapsed:.1f}s")
    _finish(1, failures, "causal counts, brute force and extraction, 12 fixtures")


def test_criterion_2_angles_and_success():
    failures = []
    for name, (theta, success) in zip(ORDER, ANGLES):
        p = plan(fixture(name))
        if abs(p.theta_deg - theta) > 0.05:
            failures.append(f"{name} theta {p.theta_deg:.3f} vs {theta}")
        if abs(p.predicted_success - success) > 0.005:
            failures.append(f"{name} success {p.predicted_success:.4f} vs {success}")
    _finish(2, failures, "theta within 0.05 deg and success within 0.005")


def test_criterion_3_qubit_budgets():
    failures, flagged = [], []
    for name, want in zip(ORDER, QUBITS):
        t = fixture(name)
        total = allocate_registers(t, loop_clauses(t)).width
        if want is None:
            flagged.append(f"{name} {total} vs {FLAGGED_QUBITS[name]} (flagged)")
        elif total != want:
            failures.append(f"{name} {total} vs {want}")
    for family, (lo, hi) in BUDGETS.items():
        b = family_budget(family)
        if (b.extra_min, b.extra_max) != (lo, hi):
            failures.append(f"{family} budget n+({b.extra_min} to {b.extra_max}) vs n+({lo} to {hi})")
    for name in ORDER:
        t = fixture(name)
        family = name.split("-")[0]
        # the family ranges assume an edge register of n or n + 1 qubits
        if family in BUDGETS and t.fixed_strategy != "exclude":
            b = family_budget(family)
            total = allocate_registers(t, loop_clauses(t)).width
            if not b.extra_min <= total - t.n_edges <= b.extra_max:
                failures.append(f"{name} total {total} outside its family range")
    _finish(3, failures, "qubit totals and family budgets; " + ", ".join(flagged))


def test_criterion_4_minimized_clause_sets():
    failures = []
    for name, want in zip(ORDER, CLAUSES):
        t = fixture(name)
        g = set_level_graph(t)
        full = enumerate_cycles(g, t.fixed_set)
        mini = minimize_clauses(t, full)
        used = loop_clauses(t)
        a = len(allocate_registers(t, used).a_qubits)
        if len(mini) != want or a != want:
            failures.append(f"{name} minimized {len(mini)}, |a| {a}, want {want}")
        # soundness over every orientation: retained clauses fire exactly when the full set does
        full_hit = np.logical_or.reduce([violation_mask(t, g, c, both=True) for c in full])
        mini_hit = np.logical_or.reduce([violation_mask(t, g, c, both=True) for c in mini])
        if not (np.array_equal(full_hit, mini_hit) and np.array_equal(full_hit, ~acyclic_mask(t))):
            failures.append(f"{name} minimized set is not equivalent to the full cycle set")
    _finish(4, failures, "minimized clause counts with exhaustive soundness check")


def test_criterion_5_chromatic_oracle():
    failures = []
    for name in ORDER:
        t = fixture(name)
        chrom, brute = chromatic_acyclic_count(t), int(acyclic_mask(t).sum())
        if chrom != brute:
            failures.append(f"{name} chromatic {chrom} vs brute {brute}")
    for family, want in (("three", 24), ("four", 78), ("five", 240)):
        j, ends = FAMILIES[family]
        got = chromatic_acyclic_count(subdivide(family, j, ends, [1] * len(ends)))
        if got != want:
            failures.append(f"{family} single-edge graph {got} vs {want}")
    _finish(5, failures, "|P(G,-1)| equals the brute-force acyclic count")


def test_criterion_6_grover_exactness():
    failures = []
    dense_checked = 0
    for name in ORDER:
        t, clauses, probs, _ = _winners(name)
        p = plan(t, clauses)
        layout = allocate_registers(t, clauses)
        mass = probs[winner_mask(t, clauses, layout)].sum()
        if abs(mass - math.sin(3 * p.theta) ** 2) > 1e-9:
            failures.append(f"{name} winner mass {mass} vs {p.predicted_success}")
        if layout.width <= DENSE_LIMIT:
            dense, _ = run_dense(build_grover_circuit(t, clauses, layout=layout))
            dense_checked += 1
            if np.max(np.abs(dense - probs)) > 1e-10:
                failures.append(f"{name} dense/phase differ by {np.max(np.abs(dense - probs)):.2e}")
    _finish(6, failures, f"winner mass = sin^2(3 theta); dense = phase on {dense_checked} fixtures")


def test_criterion_7_depth():
    failures = []
    rng = np.random.default_rng(7)
    for _ in range(1000):
        c = random_circuit(rng, int(rng.integers(2, 7)), int(rng.integers(0, 30)))
        if C.depth(c) != dag_depth(c):
            failures.append("random circuit depth disagrees with DAG oracle")
            break
    for name, want in zip(ORDER, DEPTHS):
        d = summarize(fixture(name)).depth
        tol = 0 if name in EXACT_DEPTH else 2
        if abs(d - want) > tol:
            documented = "documented" if NOTES.get(name) else "UNDOCUMENTED"
            failures.append(f"{name} depth {d} vs {want} ({documented})")
    _finish(7, failures, "depth metric vs DAG oracle on 1000 circuits; fixture depths within 2")


def test_criterion_8_transpiler():
    failures = []
    if not check_equivalence(Circuit(3, {}, [MCX([0, 1], 2)]), decompose_toffoli()):
        failures.append("Toffoli decomposition")
    for k in range(2, 6):
        target = Circuit(k + 1, {}, [MCX(list(range(k)), k)])
        for mode in MODES:
            if not check_equivalence(target, decompose_mcx(k, mode)):
                failures.append(f"k={k} {mode}")
        n_toff = C.gate_counts(decompose_mcx(k, "v-chain"))["TOFFOLI"]
        if k > 2 and n_toff != 2 * (k - 2) + 1:
            failures.append(f"k={k} v-chain uses {n_toff} Toffolis")
    if (REFERENCE_TOFFOLI_DEPTH, REFERENCE_NATIVE_GATES) != (19, 900):
        failures.append("reference figures not recorded")
    _finish(8, failures, "MCX decompositions equivalent for k<=5; v-chain 2(k-2)+1 Toffolis")


def test_criterion_9_mirror_property():
    failures = []
    for name in ORDER:
        t = fixture(name)
        full = frozenset(int(o) for o in np.flatnonzero(acyclic_mask(t)))
        if t.halved:
            *_, found = _winners(name)
            if found.mirrored().members != full:
                failures.append(f"{name} winners plus mirrors differ from the causal set")
        elif any(complement(o, t.n_edges) not in full for o in full):
            failures.append(f"{name} causal set not closed under complement")
    _finish(9, failures, "mirror closure and halved-winner completion")
