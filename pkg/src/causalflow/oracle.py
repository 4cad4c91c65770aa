"""Grover oracle, diffuser and full search circuit for a topology's loop clauses.

Register layout: edge qubits (non-excluded edges in id order, then padding),
one clause qubit per retained clause, then the marker qubit.

Negated literals are realised with X gates on the edge qubits. Inversions are
tracked across clauses, so an X is only emitted when a qubit's current
polarity differs from the one the next multicontrolled X needs. The clause
section is undone gate-for-gate in reverse after the marker.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .circuit import Circuit, Gate, H, MEASURE, MCX, X
from .topology import CycleClause, SetGraph, Topology, set_level_graph

SCHEDULES = ("greedy", "sequential")


class OracleError(ValueError):
    pass


@dataclass(frozen=True)
class RegisterLayout:
    edge_qubits: dict[int, int]
    padding: tuple[int, ...]
    a_qubits: tuple[int, ...]
    out_qubit: int
    excluded_edges: tuple[int, ...]
    marker_edge: int | None

    @property
    def e_qubits(self) -> tuple[int, ...]:
        return tuple(self.edge_qubits.values()) + self.padding

    @property
    def width(self) -> int:
        return len(self.e_qubits) + len(self.a_qubits) + 1

    def registers(self) -> dict[str, tuple[int, int]]:
        return {"e": (0, len(self.e_qubits)), "a": (len(self.e_qubits), len(self.a_qubits)),
                "out": (self.out_qubit, 1)}

    def empty(self) -> Circuit:
        return Circuit(self.width, self.registers())

    def to_dict(self) -> dict:
        return {"e": len(self.e_qubits), "a": len(self.a_qubits), "out": 1, "total": self.width,
                "padding": len(self.padding), "excluded_edges": list(self.excluded_edges)}


def allocate_registers(t: Topology, clauses: Sequence[CycleClause]) -> RegisterLayout:
    excluded = (t.fixed_edge,) if t.fixed_strategy == "exclude" else ()
    edges = [e.id for e in t.edges if e.id not in excluded]
    edge_qubits = {e: q for q, e in enumerate(edges)}
    padding = tuple(range(len(edges), len(edges) + t.padding_qubits))
    n_e = len(edges) + t.padding_qubits
    a = tuple(range(n_e, n_e + len(clauses)))
    marker = t.fixed_edge if t.fixed_strategy == "marker" else None
    return RegisterLayout(edge_qubits, padding, a, n_e + len(clauses), excluded, marker)


def build_state_prep(layout: RegisterLayout) -> Circuit:
    c = layout.empty()
    c.extend(H(q) for q in layout.e_qubits)
    c.extend(X(q) for q in layout.a_qubits)
    c.extend([X(layout.out_qubit), H(layout.out_qubit)])
    return c


@dataclass(frozen=True)
class _Pattern:
    clause: int
    direction: int
    controls: tuple[int, ...]
    inverted: frozenset[int]


def clause_patterns(t: Topology, clauses: Sequence[CycleClause], layout: RegisterLayout,
                    g: SetGraph | None = None) -> list[_Pattern]:
    """Directed-cycle patterns in canonical order (clause order, canonical direction first).

    An excluded edge is the constant 1, so it drops out of the controls, and a
    direction that needs it reversed can never fire and is omitted.
    """
    g = g or set_level_graph(t)
    out = []
    for j, clause in enumerate(clauses):
        for d, pol in enumerate(clause.directions()):
            controls, inverted, impossible = [], set(), False
            for s, p in sorted(pol.items()):
                se = g.set_edges[s]
                for edge, aligned in zip(se.path, se.aligned):
                    want_one = aligned == (p > 0)
                    if edge in layout.excluded_edges:
                        impossible |= not want_one
                        continue
                    q = layout.edge_qubits[edge]
                    controls.append(q)
                    if not want_one:
                        inverted.add(q)
            if impossible:
                continue
            if not controls:
                raise OracleError(f"clause {clause.label} has no controls left after exclusion")
            out.append(_Pattern(j, d, tuple(controls), frozenset(inverted)))
    return out


def build_clause_gates(t: Topology, clauses: Sequence[CycleClause], layout: RegisterLayout, *,
                       schedule: str = "greedy") -> Circuit:
    """Clause-detection section: X toggles plus one MCX per tested direction.

    ``sequential`` keeps the canonical pattern order. ``greedy`` is a list
    scheduler over the same (mutually commuting) patterns: it repeatedly emits
    the pending pattern that would land in the earliest layer, counting the X
    toggles it needs, with ties going to the canonical order.
    """
    if schedule not in SCHEDULES:
        raise OracleError(f"unknown schedule {schedule!r}")
    pending = clause_patterns(t, clauses, layout)
    c = layout.empty()
    layer = {q: 1 for q in layout.e_qubits + layout.a_qubits}  # after state preparation
    inverted: set[int] = set()

    def cost(p: _Pattern) -> int:
        ready = [layer[q] + ((q in inverted) != (q in p.inverted)) for q in p.controls]
        return 1 + max(max(ready), layer[layout.a_qubits[p.clause]])

    while pending:
        k = 0 if schedule == "sequential" else min(range(len(pending)), key=lambda i: (cost(pending[i]), i))
        p = pending.pop(k)
        for q in p.controls:
            if (q in inverted) != (q in p.inverted):
                c.append(X(q))
                inverted ^= {q}
                layer[q] += 1
        target = layout.a_qubits[p.clause]
        lvl = 1 + max(layer[q] for q in p.controls + (target,))
        for q in p.controls + (target,):
            layer[q] = lvl
        c.append(MCX(p.controls, target))
    # the marker reads the fixed edge, so it must be back in its true state
    if layout.marker_edge is not None:
        q = layout.edge_qubits[layout.marker_edge]
        if q in inverted:
            c.append(X(q))
    return c


def marker_gate(layout: RegisterLayout) -> Gate:
    controls = list(layout.a_qubits)
    if layout.marker_edge is not None:
        controls.append(layout.edge_qubits[layout.marker_edge])
    controls.extend(layout.padding)
    if not controls:
        raise OracleError("marker has no controls")
    return MCX(controls, layout.out_qubit)


def build_oracle(t: Topology, clauses: Sequence[CycleClause], layout: RegisterLayout, *,
                 schedule: str = "greedy") -> Circuit:
    """Clause section, marker, then the clause section reversed (uncompute).

    The phase is ``-1`` exactly when no clause fires, the fixed edge (marker
    strategy) is 1 and every padding qubit is 1.
    """
    compute = build_clause_gates(t, clauses, layout, schedule=schedule)
    c = layout.empty()
    c.extend(compute.gates)
    c.append(marker_gate(layout))
    c.extend(reversed(compute.gates))
    return c


def build_diffuser(layout: RegisterLayout) -> Circuit:
    """Reflection about the uniform state on the edge register (up to global phase)."""
    e = list(layout.e_qubits)
    if len(e) < 2:
        raise OracleError("diffuser needs at least two edge qubits")
    last = e[-1]
    c = layout.empty()
    c.extend(H(q) for q in e)
    c.extend(X(q) for q in e)
    c.append(H(last))
    c.append(MCX(e[:-1], last))
    c.append(H(last))
    c.extend(X(q) for q in e)
    c.extend(H(q) for q in e)
    return c


def build_grover_circuit(t: Topology, clauses: Sequence[CycleClause], *, iterations: int | None = None,
                         schedule: str = "greedy", measure: bool = True,
                         layout: RegisterLayout | None = None) -> Circuit:
    layout = layout or allocate_registers(t, clauses)
    iterations = t.iterations if iterations is None else iterations
    c = build_state_prep(layout)
    oracle = build_oracle(t, clauses, layout, schedule=schedule)
    diffuser = build_diffuser(layout).block("diffuser")
    for _ in range(iterations):
        c.extend(oracle.gates)
        c.append(diffuser)
    if measure:
        c.extend(MEASURE(q) for q in layout.e_qubits)
    return c


def winner_patterns(t: Topology, clauses: Sequence[CycleClause], layout: RegisterLayout,
                    g: SetGraph | None = None) -> tuple[list[tuple[int, int]], int, int]:
    """Classical form of the oracle over e-register basis indices.

    Returns ``(patterns, must_mask, must_value)``: a basis state is marked when
    it matches none of the ``(mask, value)`` patterns and ``state & must_mask ==
    must_value``.
    """
    pats = []
    for p in clause_patterns(t, clauses, layout, g):
        mask = value = 0
        for q in p.controls:
            mask |= 1 << q
            if q not in p.inverted:
                value |= 1 << q
        pats.append((mask, value))
    must = 0
    if layout.marker_edge is not None:
        must |= 1 << layout.edge_qubits[layout.marker_edge]
    for q in layout.padding:
        must |= 1 << q
    return pats, must, must
