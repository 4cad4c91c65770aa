"""Gate-level circuit IR: depth metric, gate counts, unitaries and a text format.

A ``BLOCK`` gate wraps a sub-circuit over the same qubit indices. It occupies a
single layer in :func:`depth`, the way an appended composite instruction does
in common circuit toolkits; :meth:`Circuit.flatten` expands it.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import _kernels

KINDS = ("H", "X", "Z", "RZ", "SX", "CX", "MCX", "MCZ", "MEASURE", "RESET", "BLOCK")
SINGLE = ("H", "X", "Z", "RZ", "SX")
MAX_UNITARY_WIDTH = 10


class CircuitError(ValueError):
    pass


@dataclass(frozen=True)
class Gate:
    """One instruction; for controlled kinds the target is the last qubit."""

    kind: str
    qubits: tuple[int, ...]
    angle: float | None = None
    body: tuple["Gate", ...] = ()
    label: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise CircuitError(f"unknown gate kind {self.kind!r}")
        if len(set(self.qubits)) != len(self.qubits):
            raise CircuitError(f"{self.kind} repeats a qubit: {self.qubits}")
        arity = len(self.qubits)
        if self.kind in SINGLE + ("MEASURE", "RESET") and arity != 1:
            raise CircuitError(f"{self.kind} acts on one qubit")
        if self.kind == "CX" and arity != 2:
            raise CircuitError("CX acts on two qubits")
        if self.kind in ("MCX", "MCZ") and arity < 2:
            raise CircuitError(f"{self.kind} needs at least one control")
        if self.kind == "RZ" and (self.angle is None or not math.isfinite(self.angle)):
            raise CircuitError("RZ needs a finite angle")

    @property
    def controls(self) -> tuple[int, ...]:
        return self.qubits[:-1] if self.kind in ("CX", "MCX", "MCZ") else ()

    @property
    def target(self) -> int:
        return self.qubits[-1]


def H(q: int) -> Gate:
    return Gate("H", (q,))


def X(q: int) -> Gate:
    return Gate("X", (q,))


def Z(q: int) -> Gate:
    return Gate("Z", (q,))


def SX(q: int) -> Gate:
    return Gate("SX", (q,))


def RZ(angle: float, q: int) -> Gate:
    return Gate("RZ", (q,), angle=float(angle))


def CX(c: int, t: int) -> Gate:
    return Gate("CX", (c, t))


def MCX(controls: Sequence[int], target: int) -> Gate:
    return Gate("MCX", (*controls, target))


def MCZ(controls: Sequence[int], target: int) -> Gate:
    return Gate("MCZ", (*controls, target))


def MEASURE(q: int) -> Gate:
    return Gate("MEASURE", (q,))


@dataclass
class Circuit:
    width: int
    registers: dict[str, tuple[int, int]] = field(default_factory=dict)
    gates: list[Gate] = field(default_factory=list)

    def __post_init__(self):
        spans = sorted(self.registers.values())
        for (s0, n0), (s1, _) in zip(spans, spans[1:]):
            if s0 + n0 > s1:
                raise CircuitError("register spans overlap")
        for s, size in spans:
            if s < 0 or size < 0 or s + size > self.width:
                raise CircuitError("register span outside circuit width")
        for g in self.gates:
            self._check(g)

    def _check(self, g: Gate) -> None:
        if any(not 0 <= q < self.width for q in g.qubits):
            raise CircuitError(f"{g.kind} on {g.qubits} exceeds width {self.width}")
        for sub in g.body:
            if not set(sub.qubits) <= set(g.qubits):
                raise CircuitError("block body acts outside the block's qubits")

    def append(self, g: Gate) -> Circuit:
        self._check(g)
        self.gates.append(g)
        return self

    def extend(self, gates: Iterable[Gate]) -> Circuit:
        for g in gates:
            self.append(g)
        return self

    def register(self, name: str) -> list[int]:
        start, size = self.registers[name]
        return list(range(start, start + size))

    def compose(self, other: Circuit) -> Circuit:
        """``self`` followed by ``other`` (same width)."""
        if other.width != self.width:
            raise CircuitError("compose needs equal widths")
        return Circuit(self.width, dict(self.registers), self.gates + other.gates)

    def block(self, label: str) -> Gate:
        qubits = sorted({q for g in self.gates for q in g.qubits})
        return Gate("BLOCK", tuple(qubits), body=tuple(self.gates), label=label)

    def flatten(self) -> Circuit:
        return Circuit(self.width, dict(self.registers), list(_flat(self.gates)))

    def inverse(self) -> Circuit:
        return Circuit(self.width, dict(self.registers), [_inverse(g) for g in reversed(self.gates)])


def _flat(gates: Iterable[Gate]):
    for g in gates:
        if g.kind == "BLOCK":
            yield from _flat(g.body)
        else:
            yield g


def _inverse(g: Gate) -> Gate:
    if g.kind == "RZ":
        return RZ(-g.angle, g.qubits[0])
    if g.kind == "SX":
        # SX^-1 = RZ(pi) SX RZ(pi) up to phase would change gate count; keep exact form
        raise CircuitError("SX has no inverse in the gate set; invert at the matrix level")
    if g.kind == "BLOCK":
        return Gate("BLOCK", g.qubits, body=tuple(_inverse(s) for s in reversed(g.body)), label=g.label)
    if g.kind in ("MEASURE", "RESET"):
        raise CircuitError(f"{g.kind} is not invertible")
    return g


def depth(c: Circuit) -> int:
    """Longest qubit-wise dependency chain; gates on disjoint qubits share a layer."""
    layer: dict[int, int] = {}
    best = 0
    for g in c.gates:
        lvl = 1 + max((layer.get(q, 0) for q in g.qubits), default=0)
        for q in g.qubits:
            layer[q] = lvl
        best = max(best, lvl)
    return best


def layers(c: Circuit) -> list[int]:
    """Per-gate layer index (1-based), same rule as :func:`depth`."""
    layer: dict[int, int] = {}
    out = []
    for g in c.gates:
        lvl = 1 + max((layer.get(q, 0) for q in g.qubits), default=0)
        for q in g.qubits:
            layer[q] = lvl
        out.append(lvl)
    return out


def count_key(g: Gate) -> str:
    if g.kind == "MCX":
        k = len(g.controls)
        return "CX" if k == 1 else "TOFFOLI" if k == 2 else "MCX"
    if g.kind == "BLOCK":
        return f"BLOCK:{g.label}"
    return g.kind


def gate_counts(c: Circuit, *, expand: bool = False) -> dict[str, int]:
    """Per-kind totals. MCX with one control counts as CX, with two as TOFFOLI.

    Without ``expand`` a block counts once under ``BLOCK:<label>``.
    """
    gates = _flat(c.gates) if expand else c.gates
    counts = Counter(count_key(g) for g in gates)
    for k in ("H", "X", "Z", "RZ", "SX", "CX", "TOFFOLI", "MCX", "MCZ", "MEASURE", "RESET"):
        counts.setdefault(k, 0)
    return dict(sorted(counts.items()))


def mcx_count(c: Circuit, *, expand: bool = False) -> int:
    """Multicontrolled-X family (every MCX gate, whatever its control count)."""
    gates = _flat(c.gates) if expand else c.gates
    return sum(1 for g in gates if g.kind == "MCX")


def apply_gate(state: np.ndarray, n: int, g: Gate) -> None:
    if g.kind in SINGLE:
        _kernels.apply_single(state, n, g.qubits[0], _kernels.single_qubit_matrix(g.kind, g.angle))
    elif g.kind in ("CX", "MCX"):
        _kernels.apply_x(state, n, g.controls, g.target)
    elif g.kind == "MCZ":
        _kernels.apply_z(state, n, g.controls, g.target)
    elif g.kind == "BLOCK":
        for sub in g.body:
            apply_gate(state, n, sub)
    else:
        raise CircuitError(f"{g.kind} is not a unitary gate")


def unitary_of(c: Circuit, *, cap: int = MAX_UNITARY_WIDTH) -> np.ndarray:
    """Dense ``2**width`` matrix; column ``j`` is the image of basis state ``j``."""
    n = c.width
    if n > cap:
        raise CircuitError(f"width {n} exceeds the unitary cap of {cap}")
    dim = 1 << n
    u = np.eye(dim, dtype=complex).reshape((2,) * n + (dim,))
    for g in c.gates:
        apply_gate(u, n, g)
    return u.reshape(dim, dim)


# --------------------------------------------------------------------------
# text format


def dumps(c: Circuit) -> str:
    """Line-oriented text: header, then one ``KIND q0 q1 ... [angle]`` per gate."""
    lines = [f"width {c.width}"]
    for name, (start, size) in c.registers.items():
        lines.append(f"register {name} {start} {size}")
    _dump_gates(c.gates, lines, "")
    return "\n".join(lines) + "\n"


def _dump_gates(gates, lines, indent):
    for g in gates:
        qs = " ".join(str(q) for q in g.qubits)
        if g.kind == "BLOCK":
            lines.append(f"{indent}BLOCK {g.label} {qs}")
            _dump_gates(g.body, lines, indent + "  ")
            lines.append(f"{indent}END")
        elif g.kind == "RZ":
            lines.append(f"{indent}RZ {qs} {g.angle!r}")
        else:
            lines.append(f"{indent}{g.kind} {qs}")


def loads(text: str) -> Circuit:
    width = None
    registers: dict[str, tuple[int, int]] = {}
    stack: list[tuple[str, tuple[int, ...], list[Gate]]] = [("", (), [])]
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, *rest = line.split()
        try:
            if head == "width":
                width = int(rest[0])
            elif head == "register":
                registers[rest[0]] = (int(rest[1]), int(rest[2]))
            elif head == "BLOCK":
                stack.append((rest[0], tuple(int(q) for q in rest[1:]), []))
            elif head == "END":
                label, qs, body = stack.pop()
                stack[-1][2].append(Gate("BLOCK", qs, body=tuple(body), label=label))
            elif head == "RZ":
                stack[-1][2].append(RZ(float(rest[1]), int(rest[0])))
            else:
                stack[-1][2].append(Gate(head, tuple(int(q) for q in rest)))
        except (IndexError, ValueError) as exc:
            raise CircuitError(f"line {lineno}: cannot parse {raw!r}: {exc}") from exc
    if width is None:
        raise CircuitError("missing 'width' header")
    if len(stack) != 1:
        raise CircuitError("unterminated BLOCK")
    return Circuit(width, registers, stack[0][2])
