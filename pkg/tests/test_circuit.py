from __future__ import annotations

import math

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from causalflow import circuit as C
from causalflow.circuit import CX, H, MCX, MCZ, MEASURE, RZ, SX, X, Z, Circuit, CircuitError, Gate


def dag_depth(c: Circuit) -> int:
    """Independent oracle: longest path (in nodes) of the gate dependency DAG."""
    g = nx.DiGraph()
    last: dict[int, int] = {}
    for i, gate in enumerate(c.gates):
        g.add_node(i)
        for q in gate.qubits:
            if q in last:
                g.add_edge(last[q], i)
            last[q] = i
    if not c.gates:
        return 0
    return nx.dag_longest_path_length(g) + 1


def random_circuit(rng: np.random.Generator, width: int, n: int) -> Circuit:
    c = Circuit(width)
    for _ in range(n):
        kind = rng.choice(["H", "X", "Z", "RZ", "SX", "CX", "MCX", "BLOCK"])
        if kind in ("H", "X", "Z", "SX"):
            c.append(Gate(kind, (int(rng.integers(width)),)))
        elif kind == "RZ":
            c.append(RZ(float(rng.uniform(-4, 4)), int(rng.integers(width))))
        elif kind == "CX":
            a, b = rng.choice(width, 2, replace=False)
            c.append(CX(int(a), int(b)))
        elif kind == "MCX":
            k = int(rng.integers(2, width + 1))
            qs = [int(q) for q in rng.choice(width, k, replace=False)]
            c.append(MCX(qs[:-1], qs[-1]))
        else:
            k = int(rng.integers(1, width + 1))
            qs = [int(q) for q in rng.choice(width, k, replace=False)]
            inner = Circuit(width, {}, [H(q) for q in qs] + ([CX(qs[0], qs[1])] if k > 1 else []))
            c.append(inner.block("blk"))
    return c


def test_depth_matches_dag_oracle_on_random_circuits():
    rng = np.random.default_rng(2024)
    for _ in range(1000):
        width = int(rng.integers(1, 7))
        if width == 1:
            c = Circuit(1, {}, [H(0)] * int(rng.integers(0, 5)))
        else:
            c = random_circuit(rng, width, int(rng.integers(0, 25)))
        assert C.depth(c) == dag_depth(c)
        assert max(C.layers(c), default=0) == C.depth(c)


def test_depth_basics():
    c = Circuit(3, {}, [H(0), H(1), H(2), CX(0, 1), X(2), MCX([0, 1], 2)])
    assert C.depth(c) == 3
    assert C.layers(c) == [1, 1, 1, 2, 2, 3]
    assert C.depth(Circuit(2)) == 0


def test_block_counts_as_one_layer():
    body = Circuit(3, {}, [H(0), H(1), H(2), X(0), MCX([0, 1], 2), X(0)])
    c = Circuit(3, {}, [body.block("diffuser")])
    assert C.depth(c) == 1
    assert C.depth(c.flatten()) == 4
    assert C.gate_counts(c)["BLOCK:diffuser"] == 1
    assert C.gate_counts(c, expand=True)["TOFFOLI"] == 1


def test_count_keys():
    c = Circuit(4, {}, [MCX([0], 1), MCX([0, 1], 2), MCX([0, 1, 2], 3), CX(0, 1), MEASURE(0)])
    counts = C.gate_counts(c)
    assert counts["CX"] == 2 and counts["TOFFOLI"] == 1 and counts["MCX"] == 1 and counts["MEASURE"] == 1
    assert C.mcx_count(c) == 3


@pytest.mark.parametrize("bad", [
    lambda: Gate("FOO", (0,)),
    lambda: Gate("H", (0, 1)),
    lambda: Gate("CX", (0,)),
    lambda: Gate("MCX", (0,)),
    lambda: Gate("CX", (1, 1)),
    lambda: Gate("RZ", (0,)),
    lambda: RZ(math.inf, 0),
    lambda: Circuit(2, {}, [H(2)]),
    lambda: Circuit(2, {"a": (0, 2), "b": (1, 1)}),
    lambda: Circuit(2, {"a": (1, 2)}),
])
def test_invalid_construction(bad):
    with pytest.raises(CircuitError):
        bad()


def test_register_lookup_and_compose():
    a = Circuit(3, {"e": (0, 2), "out": (2, 1)}, [H(0)])
    b = Circuit(3, {}, [X(2)])
    assert a.register("e") == [0, 1]
    assert [g.kind for g in a.compose(b).gates] == ["H", "X"]
    with pytest.raises(CircuitError):
        a.compose(Circuit(2))


def perm_matrix(n: int, f) -> np.ndarray:
    dim = 1 << n
    m = np.zeros((dim, dim))
    for j in range(dim):
        m[f(j), j] = 1
    return m


def test_unitary_bit_order():
    # qubit 0 is the least significant bit of the basis index
    u = C.unitary_of(Circuit(2, {}, [X(0)]))
    assert np.allclose(u, perm_matrix(2, lambda j: j ^ 1))
    u = C.unitary_of(Circuit(2, {}, [CX(0, 1)]))
    assert np.allclose(u, perm_matrix(2, lambda j: j ^ 2 if j & 1 else j))


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_mcx_and_mcz_unitaries(k):
    n = k + 1
    full = (1 << k) - 1
    u = C.unitary_of(Circuit(n, {}, [MCX(list(range(k)), k)]))
    assert np.allclose(u, perm_matrix(n, lambda j: j ^ (1 << k) if j & full == full else j))
    u = C.unitary_of(Circuit(n, {}, [MCZ(list(range(k)), k)]))
    assert np.allclose(u, np.diag([-1 if j == (1 << n) - 1 else 1 for j in range(1 << n)]))


def test_single_qubit_matrices():
    s2 = 1 / math.sqrt(2)
    assert np.allclose(C.unitary_of(Circuit(1, {}, [H(0)])), [[s2, s2], [s2, -s2]])
    assert np.allclose(C.unitary_of(Circuit(1, {}, [Z(0)])), np.diag([1, -1]))
    sx = C.unitary_of(Circuit(1, {}, [SX(0)]))
    assert np.allclose(sx @ sx, [[0, 1], [1, 0]])
    rz = C.unitary_of(Circuit(1, {}, [RZ(0.3, 0)]))
    assert np.allclose(rz, np.diag([np.exp(-0.15j), np.exp(0.15j)]))


def test_inverse_gives_identity():
    rng = np.random.default_rng(5)
    for _ in range(20):
        c = random_circuit(rng, 4, 15)
        c.gates = [g for g in c.gates if g.kind != "SX"]
        u = C.unitary_of(c.compose(c.inverse()))
        assert np.allclose(u, np.eye(16), atol=1e-10)
    with pytest.raises(CircuitError):
        Circuit(1, {}, [SX(0)]).inverse()


def test_unitary_cap():
    with pytest.raises(CircuitError):
        C.unitary_of(Circuit(11))


def test_text_roundtrip_random():
    rng = np.random.default_rng(9)
    for _ in range(100):
        c = random_circuit(rng, 5, 20)
        c.registers = {"e": (0, 3), "a": (3, 2)}
        again = C.loads(C.dumps(c))
        assert again == c
        assert C.dumps(again) == C.dumps(c)


def test_text_format_shape():
    c = Circuit(2, {"e": (0, 2)}, [H(0), RZ(0.5, 1), MCX([0], 1)])
    assert C.dumps(c) == "width 2\nregister e 0 2\nH 0\nRZ 1 0.5\nMCX 0 1\n"


@pytest.mark.parametrize("text", ["H 0\n", "width 2\nH\n", "width 2\nBLOCK b 0\nH 0\n", "width 2\nRZ 0 abc\n",
                                  "width 1\nCX 0 1\n", "width 2\nEND\n"])
def test_loads_errors(text):
    with pytest.raises(CircuitError):
        C.loads(text)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.sampled_from(["H", "X", "CX"]), st.integers(0, 3), st.integers(0, 3)), max_size=30))
def test_depth_property(ops):
    c = Circuit(4)
    for kind, a, b in ops:
        if kind == "CX":
            if a != b:
                c.append(CX(a, b))
        else:
            c.append(Gate(kind, (a,)))
    assert C.depth(c) == dag_depth(c)
    assert C.depth(c) <= len(c.gates)
    # a depth-d circuit needs at least ceil(len/width) layers
    assert C.depth(c) >= math.ceil(len(c.gates) / 4)
