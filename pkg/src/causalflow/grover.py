"""Amplitude-amplification analytics: winner ratio, mixing angle, success after t rounds."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Sequence

from .oracle import allocate_registers
from .topology import CycleClause, Topology, enumerate_causal, loop_clauses

LOW_SUCCESS = 0.8


class PlanError(ValueError):
    pass


def mixing_angle(r: int, n_states: int) -> float:
    """``arcsin(sqrt(r / N))`` in radians."""
    if not 0 < r < n_states:
        raise PlanError(f"winner count {r} must lie strictly between 0 and N={n_states}")
    return math.asin(math.sqrt(r / n_states))


def predicted_success(theta: float, t: int) -> float:
    """Probability of measuring a winner after ``t`` Grover rounds: ``sin^2((2t+1) theta)``."""
    if not 0 < theta < math.pi / 2:
        raise PlanError("theta must lie in (0, pi/2)")
    if t < 0:
        raise PlanError("iteration count must be nonnegative")
    return math.sin((2 * t + 1) * theta) ** 2


@dataclass(frozen=True)
class GroverPlan:
    n_e: int
    n_a: int
    N: int
    r: int
    theta: float
    t: int
    predicted_success: float

    @property
    def theta_deg(self) -> float:
        return math.degrees(self.theta)

    @property
    def low_success(self) -> bool:
        return self.predicted_success < LOW_SUCCESS

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("theta")
        return {"n_e": d["n_e"], "n_a": d["n_a"], "N": d["N"], "r": d["r"],
                "theta_deg": round(self.theta_deg, 1), "t": d["t"],
                "predicted_success": round(self.predicted_success, 2),
                "theta_deg_exact": self.theta_deg,
                "predicted_success_exact": self.predicted_success,
                "low_success": self.low_success}


def plan(t: Topology, clauses: Sequence[CycleClause] | None = None, *, r: int | None = None,
         iterations: int | None = None) -> GroverPlan:
    """Search plan for a topology; ``r`` defaults to the brute-force causal count."""
    clauses = loop_clauses(t) if clauses is None else clauses
    layout = allocate_registers(t, clauses)
    n_e = len(layout.e_qubits)
    n_states = 1 << n_e
    if r is None:
        r = enumerate_causal(t).count
    iterations = t.iterations if iterations is None else iterations
    if iterations < 1:
        raise PlanError("iterations must be positive")
    theta = mixing_angle(r, n_states)
    return GroverPlan(n_e, len(layout.a_qubits), n_states, r, theta, iterations,
                      predicted_success(theta, iterations))
