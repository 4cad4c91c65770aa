"""Regenerate the bundled topology fixtures under src/causalflow/fixtures/."""
from __future__ import annotations

import json
from pathlib import Path

OUT = Path(__file__).resolve().parents[1] / "src" / "causalflow" / "fixtures"


def build(name, junctions, set_ends, sizes, *, fixed_edge=0, strategy="marker", padding=0, reference=None,
          clause_set="minimal"):
    """Subdivide set-level edges ``start -> end`` into ``size`` aligned edges each."""
    edges, sets, nxt = [], [], junctions
    for (a, b), k in zip(set_ends, sizes):
        members, prev = [], a
        for step in range(k):
            if step == k - 1:
                head = b
            else:
                head, nxt = nxt, nxt + 1
            members.append(len(edges))
            edges.append({"id": len(edges), "from": prev, "to": head})
            prev = head
        sets.append(members)
    doc = {
        "name": name,
        "vertices": nxt,
        "edges": edges,
        "sets": sets,
        "fixed_edge": fixed_edge if strategy != "none" else None,
        "fixed_strategy": strategy,
        "padding_qubits": padding,
        "iterations": 1,
        "clause_set": clause_set,
        "reference": reference or {},
    }
    (OUT / f"{name}.json").write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")


THETA = [(0, 1), (0, 1), (1, 0)]
DIAMOND = [(0, 2), (2, 1), (0, 3), (3, 1), (1, 0)]
K4 = [(0, 1), (1, 2), (2, 0), (3, 0), (3, 1), (3, 2)]
W4 = [(0, 1), (1, 2), (2, 3), (3, 0), (4, 0), (4, 1), (4, 2), (4, 3)]
W5 = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (5, 0), (5, 1), (5, 2), (5, 3), (5, 4)]
PRISM = [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (0, 3), (1, 4), (2, 5)]
K33 = [(0, 3), (0, 4), (0, 5), (1, 3), (1, 4), (1, 5), (2, 3), (2, 4), (2, 5)]


def ref(qubits, depth, theta, success, causal, clauses, **extra):
    ref = {"total_qubits": qubits, "depth": depth, "theta_deg": theta,
           "success": success, "causal_states": causal, "clauses": clauses}
    ref.update(extra)
    return ref


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    build("one-eloop-3", 3, [(0, 1), (1, 2), (2, 0)], [1, 1, 1],
          reference=ref(5, 6, 37.7, 0.84, 3, 1))
    # two loops on four vertices with one edge per set is the diamond K4 - e;
    # the reference circuit keeps the outer square even though the chord makes it redundant
    build("two-eloop-5", 4, DIAMOND, [1] * 5, clause_set="full",
          reference=ref(9, 12, 32.0, 0.99, 9, 3))
    build("three-eloop-6", 4, K4, [1] * 6,
          reference=ref(11, 18, 25.7, 0.95, 12, 4))
    build("four-eloop-c-8", 5, W4, [1] * 8, strategy="exclude",
          reference=ref(13, 16, 33.5, 0.97, 39, 5))
    build("four-eloop-ts-9", 6, PRISM, [1] * 9,
          reference=ref(15, 20, 26.5, 0.97, 102, 5))
    build("four-eloop-u-9", 6, K33, [1] * 9,
          reference=ref(19, 32, 28.3, 0.99, 115, 9))
    build("two-eloop-6", 2, THETA, [2, 2, 2],
          reference=ref(10, 14, 36.8, 0.87, 23, 3, depth_tol=0))
    build("three-eloop-9", 4, K4, [2, 2, 2, 1, 1, 1],
          reference=ref(14, 18, 35.2, 0.93, 170, 4, e_qubits=9, toffoli=14, not_gates=45))
    build("three-eloop-12", 4, K4, [2] * 6, padding=1,
          reference=ref(21, 32, 28.0, 0.99, 1804, 7, e_qubits=13, toffoli=21, not_gates=48))
    build("four-eloop-c-12", 5, W4, [2] * 4 + [1] * 4,
          reference=ref(18, 16, 32.8, 0.98, 1199, 5, e_qubits=12, toffoli=37, not_gates=66))
    build("four-eloop-c-16", 5, W4, [2] * 8, padding=1,
          reference=ref(30, 46, 27.7, 0.98, 28343, 13, e_qubits=17, toffoli=37, not_gates=85))
    build("five-eloop-10", 6, W5, [1] * 10, strategy="none",
          reference=ref(17, 42, 28.9, 0.99, 240, 6, e_qubits=10, toffoli=25, not_gates=37))


if __name__ == "__main__":
    main()
