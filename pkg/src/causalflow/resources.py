"""Qubit, gate and depth accounting for fixture circuits, plus family-level qubit budgets."""
from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Sequence

from .circuit import Circuit, depth, gate_counts, mcx_count
from .oracle import allocate_registers, build_clause_gates, build_grover_circuit, build_oracle
from .topology import CycleClause, Edge, Topology, enumerate_cycles, loop_clauses, minimize_clauses, set_level_graph


@dataclass(frozen=True)
class ResourceSummary:
    e_qubits: int
    a_qubits: int
    total_qubits: int
    padding: int
    depth: int
    compute_depth: int
    oracle_mcx: int
    circuit_mcx: int
    x_gates: int
    gate_counts: dict

    def to_dict(self) -> dict:
        return asdict(self)


def summarize(t: Topology, clauses: Sequence[CycleClause] | None = None, *, schedule: str = "greedy",
              circuit: Circuit | None = None) -> ResourceSummary:
    """Resources of the search circuit. ``oracle_mcx`` counts compute + marker + uncompute
    for one round; ``circuit_mcx`` counts every MCX in the full circuit, diffusers included."""
    clauses = loop_clauses(t) if clauses is None else clauses
    layout = allocate_registers(t, clauses)
    c = circuit or build_grover_circuit(t, clauses, schedule=schedule, layout=layout)
    oracle = build_oracle(t, clauses, layout, schedule=schedule)
    compute = build_clause_gates(t, clauses, layout, schedule=schedule)
    counts = gate_counts(c, expand=True)
    return ResourceSummary(
        e_qubits=len(layout.e_qubits),
        a_qubits=len(layout.a_qubits),
        total_qubits=layout.width,
        padding=len(layout.padding),
        depth=depth(c),
        compute_depth=depth(compute),
        oracle_mcx=mcx_count(oracle),
        circuit_mcx=mcx_count(c, expand=True),
        x_gates=counts["X"],
        gate_counts=counts,
    )


# --------------------------------------------------------------------------
# family budgets

# set-level skeletons of the bundled multi-eloop families (junction count, directed set edges)
FAMILIES: dict[str, tuple[int, tuple[tuple[int, int], ...]]] = {
    "three": (4, ((0, 1), (1, 2), (2, 0), (3, 0), (3, 1), (3, 2))),
    "four": (5, ((0, 1), (1, 2), (2, 3), (3, 0), (4, 0), (4, 1), (4, 2), (4, 3))),
    "five": (6, ((0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (5, 0), (5, 1), (5, 2), (5, 3), (5, 4))),
}


def subdivide(name: str, junctions: int, set_ends: Sequence[tuple[int, int]], sizes: Sequence[int], *,
              fixed_edge: int | None = 0, strategy: str = "marker", padding: int = 0) -> Topology:
    """Topology whose set ``j`` is a path of ``sizes[j]`` edges from ``set_ends[j][0]`` to ``[1]``."""
    edges, sets, nxt = [], [], junctions
    for (a, b), k in zip(set_ends, sizes):
        members, prev = [], a
        for step in range(k):
            if step == k - 1:
                head = b
            else:
                head, nxt = nxt, nxt + 1
            members.append(len(edges))
            edges.append(Edge(len(edges), prev, head))
            prev = head
        sets.append(tuple(members))
    return Topology(name, nxt, tuple(edges), tuple(sets),
                    fixed_edge if strategy != "none" else None, strategy, padding)


@dataclass(frozen=True)
class FamilyBudget:
    family: str
    a_min: int
    a_max: int
    extra_min: int  # total qubits = n + extra, n = number of edges
    extra_max: int

    def describe(self) -> str:
        return f"{self.family}: |a| {self.a_min} to {self.a_max}, total n+({self.extra_min} to {self.extra_max})"


def family_budget(family: str) -> FamilyBudget:
    """Clause range over a family: fewest clauses with one edge per set, most with
    every set subdivided; the edge register holds ``n`` or ``n + 1`` qubits, plus
    one marker qubit."""
    junctions, ends = FAMILIES[family]
    counts = []
    for size in (1, 2):
        t = subdivide(f"{family}-{size}", junctions, ends, [size] * len(ends))
        full = enumerate_cycles(set_level_graph(t), t.fixed_set)
        counts.append(len(minimize_clauses(t, full)))
    a_min, a_max = min(counts), max(counts)
    return FamilyBudget(family, a_min, a_max, a_min + 1, a_max + 2)
