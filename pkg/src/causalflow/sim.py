"""Exact simulation of the search: dense statevector and reduced phase-oracle backends.

Basis index bit ``q`` is qubit ``q``; e-register bitstrings are written with
qubit 0 (edge 0) as the rightmost character.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .circuit import Circuit, apply_gate
from .grover import GroverPlan
from .oracle import RegisterLayout, allocate_registers, winner_patterns
from .topology import CausalSet, CycleClause, Topology

MAX_DENSE_WIDTH = 24
MAX_PHASE_QUBITS = 26
NORM_TOL = 1e-10


class SimulationError(RuntimeError):
    pass


@dataclass
class Histogram:
    counts: dict[str, int]
    shots: int
    seed: int | None
    probabilities: dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"shots": self.shots, "seed": self.seed, "counts": dict(sorted(self.counts.items()))}

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["bitstring", "count", "probability"])
        for b in sorted(self.counts):
            w.writerow([b, self.counts[b], repr(self.probabilities.get(b, 0.0))])
        return buf.getvalue()


def sample(probs: np.ndarray, shots: int, seed: int | None) -> Histogram:
    n_bits = max(1, int(probs.size).bit_length() - 1)
    rng = np.random.default_rng(seed)
    p = np.clip(probs, 0.0, None)
    draws = rng.multinomial(shots, p / p.sum())
    counts = {format(i, f"0{n_bits}b"): int(k) for i, k in enumerate(draws) if k}
    pr = {format(i, f"0{n_bits}b"): float(probs[i]) for i in np.flatnonzero(draws)}
    return Histogram(counts, shots, seed, pr)


def _measured_qubits(c: Circuit) -> list[int]:
    measured = [g.qubits[0] for g in c.gates if g.kind == "MEASURE"]
    if measured:
        return measured
    if "e" in c.registers:
        return c.register("e")
    return list(range(c.width))


def run_dense(c: Circuit, shots: int = 0, seed: int | None = None, *, cap: int = MAX_DENSE_WIDTH,
              check_every_gate: bool = False) -> tuple[np.ndarray, Histogram | None]:
    """Statevector run from ``|0...0>``; returns measured-register marginals and a sample.

    MEASURE gates must come last; they only select which qubits are read out.
    """
    n = c.width
    if n > cap:
        raise SimulationError(f"width {n} exceeds the dense cap of {cap}; use the phase backend")
    gates = c.gates
    k = len(gates)
    while k and gates[k - 1].kind == "MEASURE":
        k -= 1
    if any(g.kind in ("MEASURE", "RESET") for g in gates[:k]):
        raise SimulationError("mid-circuit MEASURE/RESET is not supported")
    state = np.zeros((2,) * n, dtype=complex)
    state[(0,) * n] = 1.0
    for g in gates[:k]:
        apply_gate(state, n, g)
        if check_every_gate:
            _check_norm(state)
    _check_norm(state)

    measured = _measured_qubits(c)
    full = np.abs(state) ** 2
    # axis of qubit q is n-1-q; order kept axes so measured[0] is the least significant bit
    keep = [n - 1 - q for q in reversed(measured)]
    drop = tuple(ax for ax in range(n) if ax not in keep)
    marg = full.sum(axis=drop) if drop else full
    order = sorted(keep)
    marg = np.transpose(marg, [order.index(ax) for ax in keep]).reshape(-1)
    hist = sample(marg, shots, seed) if shots else None
    return marg, hist


def _check_norm(state: np.ndarray) -> None:
    norm = float(np.sum(np.abs(state) ** 2))
    if abs(norm - 1.0) > NORM_TOL:
        raise SimulationError(f"state norm drifted to {norm!r}")


def winner_mask(t: Topology, clauses: Sequence[CycleClause], layout: RegisterLayout | None = None) -> np.ndarray:
    """Boolean array over e-register basis states that the oracle marks."""
    layout = layout or allocate_registers(t, clauses)
    n_e = len(layout.e_qubits)
    idx = np.arange(1 << n_e, dtype=np.int64)
    pats, must_mask, must_value = winner_patterns(t, clauses, layout)
    ok = (idx & must_mask) == must_value
    for mask, value in pats:
        ok &= (idx & mask) != value
    return ok


def run_phase(t: Topology, clauses: Sequence[CycleClause], iterations: int | None = None, *,
              layout: RegisterLayout | None = None, cap: int = MAX_PHASE_QUBITS) -> np.ndarray:
    """Grover on the e-register alone: sign flip on winners, then inversion about the mean.

    Valid because the clause qubits are uncomputed, so the oracle acts on the
    edge register as a diagonal phase.
    """
    layout = layout or allocate_registers(t, clauses)
    n_e = len(layout.e_qubits)
    if n_e > cap:
        raise SimulationError(f"{n_e} edge qubits exceeds the phase-backend cap of {cap}")
    iterations = t.iterations if iterations is None else iterations
    win = winner_mask(t, clauses, layout)
    amp = np.full(1 << n_e, 1 / np.sqrt(1 << n_e))
    for _ in range(iterations):
        amp[win] *= -1
        amp = 2 * amp.mean() - amp
    return amp ** 2


def register_to_orientation(t: Topology, layout: RegisterLayout, index: int) -> int:
    """Map an e-register basis index to an edge bitmask (excluded edges read as 1)."""
    o = 0
    for edge, q in layout.edge_qubits.items():
        if (index >> q) & 1:
            o |= 1 << edge
    for edge in layout.excluded_edges:
        o |= 1 << edge
    return o


def extract_winners(probs: np.ndarray, plan: GroverPlan, t: Topology, clauses: Sequence[CycleClause], *,
                    separation: float = 2.0, mirror: bool = True,
                    layout: RegisterLayout | None = None) -> CausalSet:
    """Read the amplified states off the distribution.

    States with probability above ``separation / N`` are winners; padding bits
    are stripped. With ``mirror`` and a halved query, reversed-flow mirrors are
    added to give the full causal set.
    """
    layout = layout or allocate_registers(t, clauses)
    if probs.size != plan.N:
        raise SimulationError(f"distribution has {probs.size} entries, plan expects N={plan.N}")
    hits = probs > separation / plan.N
    if not hits.any() or hits.all():
        raise SimulationError("no separation between amplified and background states")
    if probs[hits].min() <= probs[~hits].max() * separation:
        raise SimulationError("amplified states are not separated from the background")
    members = frozenset(register_to_orientation(t, layout, int(i)) for i in np.flatnonzero(hits))
    found = CausalSet(len(members), members, t.halved, t.n_edges)
    return found.mirrored() if mirror and t.halved else found


def probabilities_to_dict(probs: np.ndarray, n_bits: int, *, threshold: float = 0.0) -> dict[str, float]:
    return {format(i, f"0{n_bits}b"): float(p) for i, p in enumerate(probs) if p > threshold}


def dumps_probabilities(probs: np.ndarray, n_bits: int) -> str:
    return json.dumps(probabilities_to_dict(probs, n_bits), indent=2)
