"""In-place gate kernels on tensors of shape ``(2,) * n + batch``.

Qubit ``q`` is bit ``q`` of the basis index, i.e. tensor axis ``n - 1 - q``.
"""
from __future__ import annotations

import math

import numpy as np

_S2 = 1 / math.sqrt(2)

MATRICES = {
    "H": np.array([[_S2, _S2], [_S2, -_S2]], dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
    "SX": 0.5 * np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]], dtype=complex),
}


def rz(angle: float) -> np.ndarray:
    return np.array([[np.exp(-0.5j * angle), 0], [0, np.exp(0.5j * angle)]], dtype=complex)


def single_qubit_matrix(kind: str, angle: float | None = None) -> np.ndarray:
    if kind == "RZ":
        return rz(angle)
    return MATRICES[kind]


def _index(n: int, ndim: int, fixed: dict[int, int]) -> tuple:
    idx: list = [slice(None)] * ndim
    for q, bit in fixed.items():
        idx[n - 1 - q] = bit
    return tuple(idx)


def apply_single(state: np.ndarray, n: int, q: int, u: np.ndarray) -> None:
    i0 = _index(n, state.ndim, {q: 0})
    i1 = _index(n, state.ndim, {q: 1})
    a0 = state[i0].copy()
    a1 = state[i1]
    state[i0] = u[0, 0] * a0 + u[0, 1] * a1
    state[i1] = u[1, 0] * a0 + u[1, 1] * a1


def apply_x(state: np.ndarray, n: int, controls, target: int) -> None:
    fixed = {c: 1 for c in controls}
    i0 = _index(n, state.ndim, {**fixed, target: 0})
    i1 = _index(n, state.ndim, {**fixed, target: 1})
    tmp = state[i0].copy()
    state[i0] = state[i1]
    state[i1] = tmp


def apply_z(state: np.ndarray, n: int, controls, target: int) -> None:
    fixed = {c: 1 for c in controls}
    fixed[target] = 1
    state[_index(n, state.ndim, fixed)] *= -1
