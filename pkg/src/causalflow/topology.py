"""Multiloop topologies as edge-set multigraphs, loop clauses and classical causal oracles.

An orientation is an integer bitmask over edges: bit ``i`` set means edge ``i``
flows along its reference direction (the qubit state ``|1>``).
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

MAX_EXHAUSTIVE_EDGES = 24
MAX_CHROMATIC_EDGES = 20

FIXED_STRATEGIES = ("marker", "exclude", "none")
CLAUSE_SETS = ("minimal", "full")


class TopologyError(ValueError):
    """Raised for malformed or unsupported topology documents."""


class CapExceeded(RuntimeError):
    """Raised when an exhaustive computation would exceed its configured size cap."""


@dataclass(frozen=True)
class Edge:
    id: int
    tail: int
    head: int


@dataclass(frozen=True)
class Topology:
    name: str
    vertex_count: int
    edges: tuple[Edge, ...]
    sets: tuple[tuple[int, ...], ...]
    fixed_edge: int | None = None
    fixed_strategy: str = "none"
    padding_qubits: int = 0
    iterations: int = 1
    clause_set: str = "minimal"
    meta: dict = field(default_factory=dict, compare=False, hash=False)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def halved(self) -> bool:
        return self.fixed_strategy != "none"

    def set_of_edge(self, edge_id: int) -> int:
        for j, members in enumerate(self.sets):
            if edge_id in members:
                return j
        raise KeyError(edge_id)

    @property
    def fixed_set(self) -> int | None:
        if self.fixed_edge is None or self.fixed_strategy == "none":
            return None
        return self.set_of_edge(self.fixed_edge)


def _validate(t: Topology) -> None:
    n = t.n_edges
    if n == 0:
        raise TopologyError("topology has no edges")
    if [e.id for e in t.edges] != list(range(n)):
        raise TopologyError("edge ids must be 0..n-1 in order")
    for e in t.edges:
        for v in (e.tail, e.head):
            if not 0 <= v < t.vertex_count:
                raise TopologyError(f"edge {e.id} references vertex {v} outside 0..{t.vertex_count - 1}")
        if e.tail == e.head:
            raise TopologyError(f"edge {e.id} is a self-loop")
    seen: dict[int, int] = {}
    for j, members in enumerate(t.sets):
        if not members:
            raise TopologyError(f"set {j} is empty")
        for i in members:
            if not 0 <= i < n:
                raise TopologyError(f"set {j} references unknown edge {i}")
            if i in seen:
                raise TopologyError(f"edge {i} appears in sets {seen[i]} and {j}")
            seen[i] = j
    missing = sorted(set(range(n)) - set(seen))
    if missing:
        raise TopologyError(f"edges {missing} belong to no set")
    if t.fixed_strategy not in FIXED_STRATEGIES:
        raise TopologyError(f"unknown fixed_strategy {t.fixed_strategy!r}")
    if t.fixed_strategy != "none":
        if t.fixed_edge is None:
            raise TopologyError(f"fixed_strategy {t.fixed_strategy!r} needs a fixed_edge")
        if not 0 <= t.fixed_edge < n:
            raise TopologyError(f"fixed_edge {t.fixed_edge} is not an edge id")
    if t.clause_set not in CLAUSE_SETS:
        raise TopologyError(f"unknown clause_set {t.clause_set!r}")
    if t.padding_qubits < 0:
        raise TopologyError("padding_qubits must be nonnegative")
    if t.iterations < 1:
        raise TopologyError("iterations must be positive")
    # connectivity over vertices touched by edges; isolated vertices are dangling
    adj: dict[int, set[int]] = {v: set() for v in range(t.vertex_count)}
    for e in t.edges:
        adj[e.tail].add(e.head)
        adj[e.head].add(e.tail)
    stack, reached = [0], {0}
    while stack:
        v = stack.pop()
        for w in adj[v]:
            if w not in reached:
                reached.add(w)
                stack.append(w)
    if len(reached) != t.vertex_count:
        raise TopologyError("graph is disconnected")


def topology_from_dict(doc: dict) -> Topology:
    try:
        edges = tuple(Edge(int(e["id"]), int(e["from"]), int(e["to"])) for e in doc["edges"])
        edges = tuple(sorted(edges, key=lambda e: e.id))
        t = Topology(
            name=str(doc["name"]),
            vertex_count=int(doc["vertices"]),
            edges=edges,
            sets=tuple(tuple(int(i) for i in s) for s in doc["sets"]),
            fixed_edge=None if doc.get("fixed_edge") is None else int(doc["fixed_edge"]),
            fixed_strategy=str(doc.get("fixed_strategy", "none")),
            padding_qubits=int(doc.get("padding_qubits", 0)),
            iterations=int(doc.get("iterations", 1)),
            clause_set=str(doc.get("clause_set", "minimal")),
            meta=dict(doc.get("reference", {})),
        )
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, TopologyError):
            raise
        raise TopologyError(f"malformed topology document: {exc}") from exc
    _validate(t)
    return t


def parse_topology(text: str) -> Topology:
    """Parse and validate a JSON topology document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise TopologyError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise TopologyError("topology document must be a JSON object")
    return topology_from_dict(doc)


def load_topology(path: str | Path) -> Topology:
    return parse_topology(Path(path).read_text(encoding="utf-8"))


def topology_to_dict(t: Topology) -> dict:
    doc = {
        "name": t.name,
        "vertices": t.vertex_count,
        "edges": [{"id": e.id, "from": e.tail, "to": e.head} for e in t.edges],
        "sets": [list(s) for s in t.sets],
        "fixed_edge": t.fixed_edge,
        "fixed_strategy": t.fixed_strategy,
        "padding_qubits": t.padding_qubits,
        "iterations": t.iterations,
        "clause_set": t.clause_set,
    }
    if t.meta:
        doc["reference"] = t.meta
    return doc


# --------------------------------------------------------------------------
# set-level graph


@dataclass(frozen=True)
class SetEdge:
    """A contracted edge set running ``start -> end`` along its canonical direction.

    ``aligned[k]`` tells whether member edge ``path[k]`` points along that direction.
    """

    index: int
    start: int
    end: int
    path: tuple[int, ...]
    aligned: tuple[bool, ...]


@dataclass(frozen=True)
class SetGraph:
    junctions: tuple[int, ...]
    set_edges: tuple[SetEdge, ...]


def set_level_graph(t: Topology) -> SetGraph:
    """Contract each edge set into one edge between its two junction endpoints."""
    degree = [0] * t.vertex_count
    touching: list[set[int]] = [set() for _ in range(t.vertex_count)]
    for e in t.edges:
        j = t.set_of_edge(e.id)
        for v in (e.tail, e.head):
            degree[v] += 1
            touching[v].add(j)
    junction = [degree[v] != 2 or len(touching[v]) > 1 for v in range(t.vertex_count)]

    fixed_set = t.fixed_set
    set_edges = []
    for j, members in enumerate(t.sets):
        ends: dict[int, list[int]] = {}
        for i in members:
            e = t.edges[i]
            ends.setdefault(e.tail, []).append(i)
            ends.setdefault(e.head, []).append(i)
        endpoints = [v for v, inc in ends.items() if len(inc) == 1]
        if len(endpoints) != 2 or any(len(inc) > 2 for inc in ends.values()):
            raise TopologyError(f"set {j} is not a simple path")
        interior = [v for v, inc in ends.items() if len(inc) == 2]
        if any(junction[v] for v in interior):
            raise TopologyError(f"set {j} passes through a junction vertex")
        if not all(junction[v] for v in endpoints):
            raise TopologyError(f"set {j} ends on a non-junction vertex")

        # canonical direction follows the anchor edge (e0 for the fixed set)
        anchor = t.fixed_edge if j == fixed_set else min(members)
        a = t.edges[anchor]
        # walk the path from one end, then orient it so the anchor is aligned
        start = min(endpoints)
        path, walk, v, used = [], [], start, set()
        while len(path) < len(members):
            i = next(i for i in ends[v] if i not in used)
            used.add(i)
            e = t.edges[i]
            nxt = e.head if e.tail == v else e.tail
            path.append(i)
            walk.append(e.tail == v)
            v = nxt
        end = v
        if not walk[path.index(anchor)]:
            start, end = end, start
            path.reverse()
            walk = [not w for w in reversed(walk)]
        set_edges.append(SetEdge(j, start, end, tuple(path), tuple(walk)))
        assert a.id in path
    junctions = tuple(v for v in range(t.vertex_count) if junction[v])
    return SetGraph(junctions, tuple(set_edges))


# --------------------------------------------------------------------------
# cycle clauses


@dataclass(frozen=True)
class CycleClause:
    """A simple set-level cycle; ``literals`` pairs set index with polarity (+1/-1)."""

    literals: tuple[tuple[int, int], ...]
    mode: str
    label: str = ""

    @property
    def sets(self) -> tuple[int, ...]:
        return tuple(j for j, _ in self.literals)

    def directions(self) -> list[dict[int, int]]:
        """Polarity maps for each tested direction, canonical first."""
        pos = dict(self.literals)
        if self.mode == "single":
            return [pos]
        return [pos, {j: -p for j, p in pos.items()}]

    def describe(self) -> str:
        body = " & ".join(f"s{j}" if p > 0 else f"~s{j}" for j, p in self.literals)
        op = "toff" if self.mode == "single" else "Toff"
        return f"{self.label} = {op}({body})"

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "mode": self.mode,
            "literals": [{"set": j, "negated": p < 0} for j, p in self.literals],
            "text": self.describe(),
        }


def _simple_cycles(g: SetGraph) -> list[list[tuple[int, int]]]:
    """All simple cycles as lists of (set index, +1 forward / -1 backward) steps.

    Each cycle is returned once; its traversal starts at the lowest vertex.
    """
    adj: dict[int, list[tuple[int, int, int]]] = {}
    for se in g.set_edges:
        adj.setdefault(se.start, []).append((se.end, se.index, 1))
        adj.setdefault(se.end, []).append((se.start, se.index, -1))
    found: dict[frozenset, list[tuple[int, int]]] = {}
    for s in sorted(adj):
        stack = [(s, [], {s})]
        while stack:
            v, steps, visited = stack.pop()
            used = {j for j, _ in steps}
            for w, j, d in adj[v]:
                if j in used or w < s:
                    continue
                if w == s:
                    cyc = steps + [(j, d)]
                    key = frozenset(k for k, _ in cyc)
                    found.setdefault(key, cyc)
                elif w not in visited:
                    stack.append((w, steps + [(j, d)], visited | {w}))
    return list(found.values())


def enumerate_cycles(g: SetGraph, fixed_set: int | None = None) -> list[CycleClause]:
    """Every simple cycle of the set-level multigraph as a canonically oriented clause.

    The cycle is oriented so that its anchor set (``fixed_set`` when on the
    cycle, otherwise the lowest set index) is traversed along its canonical
    direction. Clauses containing ``fixed_set`` test that single direction.
    """
    clauses = []
    for steps in _simple_cycles(g):
        sets = [j for j, _ in steps]
        anchor = fixed_set if fixed_set in sets else min(sets)
        flip = dict(steps)[anchor] < 0
        pol = {j: (-d if flip else d) for j, d in steps}
        mode = "single" if fixed_set is not None and fixed_set in pol else "both"
        clauses.append(CycleClause(tuple(sorted(pol.items())), mode))
    clauses.sort(key=_clause_key)
    return [CycleClause(c.literals, c.mode, f"a_{k}") for k, c in enumerate(clauses)]


def _clause_key(c: CycleClause):
    return (len(c.literals), c.sets, tuple(p for _, p in c.literals))


def direction_pattern(t: Topology, g: SetGraph, polarity: dict[int, int]) -> tuple[int, int]:
    """(mask, value) over edge bits: the directed cycle is present iff ``o & mask == value``."""
    mask = value = 0
    for j, p in polarity.items():
        se = g.set_edges[j]
        for i, al in zip(se.path, se.aligned):
            mask |= 1 << i
            if al == (p > 0):
                value |= 1 << i
    return mask, value


def clause_patterns(t: Topology, g: SetGraph, c: CycleClause) -> list[tuple[int, int]]:
    return [direction_pattern(t, g, d) for d in c.directions()]


def _orientation_space(n: int, cap: int) -> np.ndarray:
    if n > cap:
        raise CapExceeded(f"{n} edges exceeds the exhaustive cap of {cap}")
    dtype = np.uint32 if n <= 32 else np.uint64
    return np.arange(1 << n, dtype=dtype)


def violation_mask(t: Topology, g: SetGraph, c: CycleClause, *, both: bool = False,
                   cap: int = MAX_EXHAUSTIVE_EDGES) -> np.ndarray:
    """Boolean array over all 2**n orientations flagging those the clause detects.

    ``both=True`` ignores the clause mode and tests both directions.
    """
    o = _orientation_space(t.n_edges, cap)
    out = np.zeros(o.shape, dtype=bool)
    dirs = CycleClause(c.literals, "both").directions() if both else c.directions()
    for d in dirs:
        mask, value = direction_pattern(t, g, d)
        out |= (o & mask) == value
    return out


def minimize_clauses(t: Topology, clauses: Sequence[CycleClause], *,
                     cap: int = MAX_EXHAUSTIVE_EDGES) -> list[CycleClause]:
    """Drop clauses whose detected orientations are already covered by the others.

    Candidates are tried for removal longest-first, so shorter cycles survive
    ties. Coverage is checked exhaustively over all 2**n orientations with both
    directions of every cycle (equivalent to the single-direction check on the
    fixed half by mirror symmetry).
    """
    g = set_level_graph(t)
    masks = {c.sets: violation_mask(t, g, c, both=True, cap=cap) for c in clauses}
    keep = sorted(clauses, key=_clause_key)
    for c in sorted(clauses, key=_clause_key, reverse=True):
        others = [d for d in keep if d.sets != c.sets]
        if not others:
            continue
        cover = np.logical_or.reduce([masks[d.sets] for d in others])
        if not np.any(masks[c.sets] & ~cover):
            keep = others
    return [CycleClause(c.literals, c.mode, f"a_{k}") for k, c in enumerate(keep)]


def loop_clauses(t: Topology, *, minimize: bool | None = None) -> list[CycleClause]:
    """Clauses the oracle tests; ``minimize`` defaults to the topology's ``clause_set``."""
    g = set_level_graph(t)
    full = enumerate_cycles(g, t.fixed_set)
    if minimize is None:
        minimize = t.clause_set == "minimal"
    return minimize_clauses(t, full) if minimize else full


def clause_violated(t: Topology, g: SetGraph, clauses: Iterable[CycleClause], o: int) -> bool:
    for c in clauses:
        for mask, value in clause_patterns(t, g, c):
            if o & mask == value:
                return True
    return False


# --------------------------------------------------------------------------
# classical oracles


def is_acyclic(t: Topology, o: int | str | Sequence[int]) -> bool:
    """Depth-first search for a directed cycle in the graph induced by orientation ``o``.

    ``o`` may be an int bitmask, a bitstring with edge 0 rightmost (as printed
    everywhere else), or a bit sequence indexed by edge id.
    """
    bits = _as_bits(t, o)
    succ: list[list[int]] = [[] for _ in range(t.vertex_count)]
    for e, b in zip(t.edges, bits):
        if b:
            succ[e.tail].append(e.head)
        else:
            succ[e.head].append(e.tail)
    color = [0] * t.vertex_count  # 0 new, 1 on stack, 2 done
    for root in range(t.vertex_count):
        if color[root]:
            continue
        stack = [(root, iter(succ[root]))]
        color[root] = 1
        while stack:
            v, it = stack[-1]
            w = next(it, None)
            if w is None:
                color[v] = 2
                stack.pop()
            elif color[w] == 1:
                return False
            elif color[w] == 0:
                color[w] = 1
                stack.append((w, iter(succ[w])))
    return True


def _as_bits(t: Topology, o) -> list[int]:
    n = t.n_edges
    if isinstance(o, (int, np.integer)):
        if not 0 <= int(o) < (1 << n):
            raise ValueError(f"orientation {o} out of range for {n} edges")
        return [(int(o) >> i) & 1 for i in range(n)]
    if isinstance(o, str):
        if len(o) != n or set(o) - {"0", "1"}:
            raise ValueError(f"orientation string must have {n} binary digits")
        return [int(c) for c in reversed(o)]
    bits = [int(b) for b in o]
    if len(bits) != n:
        raise ValueError(f"orientation has length {len(bits)}, expected {n}")
    return bits


def acyclic_mask(t: Topology, *, cap: int = MAX_EXHAUSTIVE_EDGES) -> np.ndarray:
    """Boolean array over all 2**n orientations, True where the digraph is a DAG.

    Vectorised sink peeling: a vertex is removed once no alive vertex is
    reachable along one of its outgoing edges; a DAG loses every vertex.
    """
    o = _orientation_space(t.n_edges, cap)
    fwd = [((o >> e.id) & 1).astype(bool) for e in t.edges]
    alive = np.ones((t.vertex_count, o.size), dtype=bool)
    for _ in range(t.vertex_count):
        has_out = np.zeros_like(alive)
        for e, f in zip(t.edges, fwd):
            has_out[e.tail] |= f & alive[e.head]
            has_out[e.head] |= ~f & alive[e.tail]
        sinks = alive & ~has_out
        if not sinks.any():
            break
        alive &= ~sinks
    return ~alive.any(axis=0)


def complement(o: int, n: int) -> int:
    return ~o & ((1 << n) - 1)


@dataclass(frozen=True)
class CausalSet:
    count: int
    members: frozenset[int]
    halved: bool
    n_edges: int

    def bitstrings(self) -> list[str]:
        """Members as strings with edge 0 as the rightmost (least significant) character."""
        return [format(m, f"0{self.n_edges}b") for m in sorted(self.members)]

    def mirrored(self) -> CausalSet:
        full = set(self.members) | {complement(m, self.n_edges) for m in self.members}
        return CausalSet(len(full), frozenset(full), False, self.n_edges)

    def to_dict(self) -> dict:
        return {"count": self.count, "halved": self.halved, "n_edges": self.n_edges,
                "members": self.bitstrings()}


def enumerate_causal(t: Topology, *, cap: int = MAX_EXHAUSTIVE_EDGES) -> CausalSet:
    """All acyclic orientations; restricted to bit(e0) = 1 when an edge is fixed."""
    ok = acyclic_mask(t, cap=cap)
    if t.halved:
        o = np.arange(ok.size, dtype=np.int64)
        ok &= ((o >> t.fixed_edge) & 1).astype(bool)
    members = frozenset(int(i) for i in np.flatnonzero(ok))
    return CausalSet(len(members), members, t.halved, t.n_edges)


def _simple_edges(t: Topology) -> tuple[int, frozenset[frozenset[int]]]:
    # parallel edges must share a direction in any acyclic orientation, so they collapse
    return t.vertex_count, frozenset(frozenset((e.tail, e.head)) for e in t.edges)


def chromatic_polynomial(n_vertices: int, edges: frozenset[frozenset[int]]) -> tuple[int, ...]:
    """Integer coefficients (lowest degree first) by deletion-contraction."""
    return _chromatic(n_vertices, edges)


@lru_cache(maxsize=None)
def _chromatic(nv: int, edges: frozenset[frozenset[int]]) -> tuple[int, ...]:
    if not edges:
        return tuple([0] * nv + [1])
    e = min(edges, key=lambda x: tuple(sorted(x)))
    u, v = sorted(e)
    deleted = edges - {e}
    # contract v into u, relabel to keep vertices 0..nv-2
    relabel = {w: (u if w == v else (w if w < v else w - 1)) for w in range(nv)}
    contracted = frozenset(
        frozenset(relabel[w] for w in x) for x in deleted if len({relabel[w] for w in x}) == 2
    )
    a = _chromatic(nv, deleted)
    b = _chromatic(nv - 1, contracted)
    out = list(a)
    for k, c in enumerate(b):
        out[k] -= c
    return tuple(out)


def chromatic_acyclic_count(t: Topology, *, cap: int = MAX_CHROMATIC_EDGES) -> int:
    """Number of acyclic orientations as ``|P(G, -1)|`` of the underlying simple graph."""
    nv, edges = _simple_edges(t)
    if len(edges) > cap:
        raise CapExceeded(f"{len(edges)} edges exceeds the deletion-contraction cap of {cap}")
    poly = chromatic_polynomial(nv, edges)
    return abs(sum(c * (-1) ** k for k, c in enumerate(poly)))
