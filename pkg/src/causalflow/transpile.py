"""Multicontrolled-X decompositions and rebasing onto a native {RZ, SX, X, CX} basis."""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .circuit import CX, RZ, SX, Circuit, CircuitError, Gate, H, X, unitary_of

MODES = ("v-chain", "no-ancilla")
EQUIV_TOL = 1e-8


class TranspileError(ValueError):
    pass


@dataclass(frozen=True)
class NativeBasis:
    kinds: frozenset[str] = frozenset({"RZ", "SX", "X", "CX"})

    def __post_init__(self):
        if "CX" not in self.kinds:
            raise TranspileError("basis needs CX as its entangling gate")
        if not {"RZ", "SX"} <= self.kinds:
            raise TranspileError("basis needs RZ and SX for single-qubit synthesis")

    @classmethod
    def parse(cls, text: str) -> NativeBasis:
        return cls(frozenset(k.strip().upper() for k in text.split(",") if k.strip()))


IBM_BASIS = NativeBasis()


def decompose_toffoli(c0: int = 0, c1: int = 1, t: int = 2, width: int | None = None) -> Circuit:
    """Six-CX Toffoli over {H, CX, T = RZ(pi/4), T^dagger}; equal up to global phase."""
    T, Td = math.pi / 4, -math.pi / 4
    c = Circuit(width or max(c0, c1, t) + 1)
    c.extend([
        H(t), CX(c1, t), RZ(Td, t), CX(c0, t), RZ(T, t), CX(c1, t), RZ(Td, t), CX(c0, t),
        RZ(T, c1), RZ(T, t), H(t), CX(c0, c1), RZ(T, c0), RZ(Td, c1), CX(c0, c1),
    ])
    return c


def _toffoli(c0: int, c1: int, t: int) -> Gate:
    return Gate("MCX", (c0, c1, t))


def decompose_mcx(k: int, mode: str = "v-chain") -> Circuit:
    """MCX with ``k`` controls (qubits ``0..k-1``) on target ``k``.

    ``v-chain`` uses ``k - 2`` clean ancillas (qubits ``k+1..``) and
    ``2(k-2)+1`` Toffolis. ``no-ancilla`` recurses through controlled phases.
    """
    if k < 2:
        raise TranspileError("decomposition needs at least two controls")
    if mode not in MODES:
        raise TranspileError(f"unknown mode {mode!r}")
    controls, target = list(range(k)), k
    if k == 2:
        return Circuit(3, {"q": (0, 3)}, [_toffoli(0, 1, 2)])
    if mode == "v-chain":
        anc = list(range(k + 1, k + 1 + (k - 2)))
        c = Circuit(k + 1 + len(anc), {"q": (0, k + 1), "anc": (k + 1, len(anc))})
        up = [_toffoli(controls[0], controls[1], anc[0])]
        for i in range(2, k - 1):
            up.append(_toffoli(controls[i], anc[i - 2], anc[i - 1]))
        c.extend(up)
        c.append(_toffoli(controls[k - 1], anc[k - 3], target))
        c.extend(reversed(up))
        return c
    c = Circuit(k + 1, {"q": (0, k + 1)})
    c.extend(_mcx_no_ancilla(controls, target))
    return c


def _phase(angle: float, q: int) -> list[Gate]:
    # diag(1, e^{i angle}) equals RZ(angle) up to a global phase
    return [RZ(angle, q)]


def _cphase(angle: float, a: int, b: int) -> list[Gate]:
    return [*_phase(angle / 2, a), CX(a, b), *_phase(-angle / 2, b), CX(a, b), *_phase(angle / 2, b)]


def _mcphase(angle: float, qubits: list[int]) -> list[Gate]:
    """Phase ``angle`` on the all-ones state of ``qubits``, built recursively."""
    if len(qubits) == 1:
        return _phase(angle, qubits[0])
    if len(qubits) == 2:
        return _cphase(angle, *qubits)
    *rest, x, t = qubits
    flip = _mcx_no_ancilla(rest, x)
    return [*_cphase(angle / 2, x, t), *flip, *_cphase(-angle / 2, x, t), *flip,
            *_mcphase(angle / 2, rest + [t])]


def _mcx_no_ancilla(controls: list[int], target: int) -> list[Gate]:
    if not controls:
        return [X(target)]
    if len(controls) == 1:
        return [CX(controls[0], target)]
    return [H(target), *_mcphase(math.pi, controls + [target]), H(target)]


def expand_mcx(c: Circuit, mode: str = "v-chain") -> Circuit:
    """Replace MCX/MCZ (and blocks) by CX-level gates; v-chain ancillas are appended."""
    flat = c.flatten()
    need = 0
    if mode == "v-chain":
        need = max((len(g.controls) - 2 for g in flat.gates if g.kind in ("MCX", "MCZ")), default=0)
        need = max(need, 0)
    width = c.width + need
    regs = dict(c.registers)
    if need:
        regs["anc"] = (c.width, need)
    out = Circuit(width, regs)
    anc = list(range(c.width, width))
    for g in flat.gates:
        if g.kind not in ("MCX", "MCZ"):
            out.append(g)
            continue
        ctrl, t = list(g.controls), g.target
        if g.kind == "MCZ":
            out.append(H(t))
        out.extend(_mcx_gates(ctrl, t, anc, mode))
        if g.kind == "MCZ":
            out.append(H(t))
    return out


def _mcx_gates(ctrl: list[int], t: int, anc: list[int], mode: str) -> list[Gate]:
    k = len(ctrl)
    if k == 1:
        return [CX(ctrl[0], t)]
    if k == 2:
        return list(decompose_toffoli(ctrl[0], ctrl[1], t).gates)
    if mode == "no-ancilla":
        return _mcx_no_ancilla(ctrl, t)
    template = decompose_mcx(k, "v-chain")
    qmap = ctrl + [t] + anc[: k - 2]
    out = []
    for g in template.gates:
        a, b, c = (qmap[q] for q in g.qubits)
        out.extend(decompose_toffoli(a, b, c).gates)
    return out


def euler_zsx(u: np.ndarray) -> list[tuple[str, float | None]]:
    """``u`` (2x2) as RZ(a) SX RZ(b) SX RZ(c) in time order, up to global phase."""
    det = np.linalg.det(u)
    su = u / cmath.sqrt(det)
    # ZYZ: su = RZ(phi) RY(theta) RZ(lam)
    theta = 2 * math.atan2(abs(su[1, 0]), abs(su[0, 0]))
    s = cmath.phase(su[1, 1]) if abs(su[1, 1]) > 1e-12 else 0.0
    d = cmath.phase(su[1, 0]) if abs(su[1, 0]) > 1e-12 else 0.0
    if abs(su[1, 0]) < 1e-12:
        phi, lam = 2 * s, 0.0
    elif abs(su[0, 0]) < 1e-12:
        phi, lam = 2 * d, 0.0
    else:
        phi, lam = s + d, s - d
    # U3(theta, phi, lam) ~ RZ(phi + pi) SX RZ(theta + pi) SX RZ(lam), rightmost first
    return [("RZ", lam), ("SX", None), ("RZ", theta + math.pi), ("SX", None), ("RZ", phi + math.pi)]


def _rebase_single(g: Gate, basis: NativeBasis) -> list[Gate]:
    q = g.qubits[0]
    if g.kind in basis.kinds:
        return [g]
    if g.kind == "H":
        return [RZ(math.pi / 2, q), SX(q), RZ(math.pi / 2, q)]
    if g.kind == "Z":
        return [RZ(math.pi, q)]
    if g.kind == "X":
        return [SX(q), SX(q)]
    u = _kernels.single_qubit_matrix(g.kind, g.angle)
    return [RZ(a, q) if k == "RZ" else SX(q) for k, a in euler_zsx(u)]


def cancel_adjacent(c: Circuit) -> Circuit:
    """Merge neighbouring RZs and drop adjacent self-inverse pairs (X X, CX CX, H H)."""
    out: list[Gate | None] = []
    last: dict[int, int] = {}
    for g in c.gates:
        prev_idx = {last.get(q) for q in g.qubits}
        prev = out[prev_idx.pop()] if len(prev_idx) == 1 and None not in prev_idx else None
        if prev is not None and prev.qubits == g.qubits:
            i = last[g.qubits[0]]
            if g.kind == prev.kind and g.kind in ("X", "CX", "H", "Z"):
                out[i] = None
                for q in g.qubits:
                    last.pop(q, None)
                    _restore_last(out, last, q, i)
                continue
            if g.kind == prev.kind == "RZ":
                angle = math.remainder(prev.angle + g.angle, 4 * math.pi)
                if abs(angle) < 1e-12:
                    out[i] = None
                    last.pop(g.qubits[0], None)
                    _restore_last(out, last, g.qubits[0], i)
                else:
                    out[i] = RZ(angle, g.qubits[0])
                continue
        out.append(g)
        for q in g.qubits:
            last[q] = len(out) - 1
    return Circuit(c.width, dict(c.registers), [g for g in out if g is not None])


def _restore_last(out, last, q, before):
    for j in range(before - 1, -1, -1):
        g = out[j]
        if g is not None and q in g.qubits:
            last[q] = j
            return


def rebase_native(c: Circuit, basis: NativeBasis = IBM_BASIS, *, mode: str = "v-chain",
                  optimize: bool = True) -> Circuit:
    """Rewrite into ``basis``: MCX decomposed, single-qubit gates via RZ/SX synthesis."""
    expanded = expand_mcx(c, mode)
    if optimize:
        expanded = cancel_adjacent(expanded)
    out = Circuit(expanded.width, dict(expanded.registers))
    for g in expanded.gates:
        if g.kind in ("H", "X", "Z", "RZ", "SX"):
            out.extend(_rebase_single(g, basis))
        elif g.kind in ("CX", "MEASURE", "RESET"):
            if g.kind == "CX" and "CX" not in basis.kinds:
                raise TranspileError("basis lacks CX")
            out.append(g)
        else:
            raise TranspileError(f"cannot rebase {g.kind}")
    return cancel_adjacent(out) if optimize else out


def _project(u: np.ndarray, width: int, keep: int) -> np.ndarray:
    """Block of ``u`` with qubits ``keep..width-1`` (ancillas) in |0> on both sides."""
    return u[: 1 << keep, : 1 << keep]


def check_equivalence(c1: Circuit, c2: Circuit, *, tol: float = EQUIV_TOL, cap: int = 10) -> bool:
    """Unitary equality up to global phase; extra high qubits of the wider circuit are
    treated as clean ancillas (|0> in and out)."""
    if max(c1.width, c2.width) > cap:
        raise CircuitError(f"width exceeds the equivalence cap of {cap}")
    k = min(c1.width, c2.width)
    u1 = _project(unitary_of(c1.flatten(), cap=cap), c1.width, k)
    u2 = _project(unitary_of(c2.flatten(), cap=cap), c2.width, k)
    i, j = np.unravel_index(np.argmax(np.abs(u1)), u1.shape)
    if abs(u2[i, j]) < 1e-12:
        return False
    phase = u1[i, j] / u2[i, j]
    if abs(abs(phase) - 1) > tol:
        return False
    return bool(np.max(np.abs(u1 - phase * u2)) <= tol)
