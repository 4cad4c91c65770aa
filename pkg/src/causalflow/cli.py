"""Command-line front end: ``causalflow <command> ...``."""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import circuit as circ
from . import transpile as tp
from .grover import PlanError, plan
from .oracle import OracleError, allocate_registers, build_grover_circuit
from .report import bundled_fixtures, build_report, fixture_dir, to_csv, to_json, to_text
from .resources import summarize
from .sim import SimulationError, extract_winners, run_dense, run_phase, sample
from .topology import (CapExceeded, TopologyError, chromatic_acyclic_count, enumerate_causal,
                       enumerate_cycles, load_topology, loop_clauses, set_level_graph)

EXIT_OK, EXIT_ERROR, EXIT_INVALID, EXIT_MISMATCH = 0, 1, 2, 3
ENV_FIXTURES = "CAUSALFLOW_FIXTURES"
ALIASES = {"triangle": "one-eloop-3", "five-eloop": "five-eloop-10", "two-eloop": "two-eloop-6"}

# routed single-Toffoli depth and full-circuit native count quoted for a real device; not targets
REFERENCE_TOFFOLI_DEPTH = 19
REFERENCE_NATIVE_GATES = 900


class UsageError(Exception):
    pass


def _fixtures_root(args) -> Path:
    if args.fixtures_dir:
        return Path(args.fixtures_dir)
    env = os.environ.get(ENV_FIXTURES)
    return Path(env) if env else fixture_dir()


def resolve(target: str, root: Path) -> Path:
    """A file path, or a fixture name (with or without ``.json``) under ``root``."""
    p = Path(target)
    if p.is_file():
        return p
    stem = ALIASES.get(p.stem, p.stem)
    for cand in (root / f"{stem}.json", fixture_dir() / f"{stem}.json"):
        if cand.is_file():
            return cand
    raise UsageError(f"unknown fixture or missing file: {target}")


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _topology(args):
    return load_topology(resolve(args.path, _fixtures_root(args)))


def cmd_validate(args) -> int:
    t = _topology(args)
    g = set_level_graph(t)
    _emit({"ok": True, "name": t.name, "edges": t.n_edges, "vertices": t.vertex_count,
           "sets": len(t.sets), "junctions": len(g.junctions), "fixed_edge": t.fixed_edge,
           "fixed_strategy": t.fixed_strategy, "halved": t.halved, "padding_qubits": t.padding_qubits})
    return EXIT_OK


def cmd_enumerate(args) -> int:
    t = _topology(args)
    cs = enumerate_causal(t)
    out = {"count": cs.count, "chromatic": chromatic_acyclic_count(t), "halved": t.halved,
           "full_count": cs.mirrored().count if t.halved else cs.count}
    if args.list:
        out["bitstrings"] = cs.bitstrings()
    _emit(out)
    return EXIT_OK


def cmd_clauses(args) -> int:
    t = _topology(args)
    full = enumerate_cycles(set_level_graph(t), t.fixed_set)
    minimal = loop_clauses(t, minimize=True)
    _emit({"full": [c.describe() for c in full], "minimal": [c.describe() for c in minimal],
           "used": t.clause_set})
    return EXIT_OK


def cmd_plan(args) -> int:
    t = _topology(args)
    _emit(plan(t, iterations=args.t).to_dict())
    return EXIT_OK


def cmd_run(args) -> int:
    t = _topology(args)
    clauses = loop_clauses(t)
    layout = allocate_registers(t, clauses)
    p = plan(t, clauses, iterations=args.t)
    if args.backend == "dense":
        c = build_grover_circuit(t, clauses, iterations=p.t, schedule=args.schedule, layout=layout)
        probs, _ = run_dense(c)
    else:
        probs = run_phase(t, clauses, p.t, layout=layout)
    hist = sample(probs, args.shots, args.seed) if args.shots else None
    found = extract_winners(probs, p, t, clauses, mirror=False, layout=layout)
    out = {"backend": args.backend, "plan": p.to_dict(), "winners": found.bitstrings(),
           "count": found.count, "winner_mass": float(probs[probs > 2.0 / p.N].sum())}
    if t.halved:
        out["full_count"] = found.mirrored().count
    if hist:
        out["histogram"] = hist.to_dict()
    if args.out:
        d = Path(args.out)
        d.mkdir(parents=True, exist_ok=True)
        (d / "run.json").write_text(json.dumps(out, indent=2, sort_keys=True) + "\n")
        if hist:
            from .plots import histogram_figure
            (d / "histogram.csv").write_text(hist.to_csv())
            histogram_figure(hist, d / "histogram.png")
    _emit(out)
    return EXIT_OK


def cmd_resources(args) -> int:
    t = _topology(args)
    clauses = loop_clauses(t)
    c = build_grover_circuit(t, clauses, iterations=args.t, schedule=args.schedule)
    out = summarize(t, clauses, schedule=args.schedule, circuit=c).to_dict()
    out["reference"] = t.meta
    if args.circuit_out:
        Path(args.circuit_out).write_text(circ.dumps(c))
    _emit(out)
    return EXIT_OK


def _load_circuit(target: str, args) -> circ.Circuit:
    if target == "toffoli":
        return circ.Circuit(3, {"q": (0, 3)}, [circ.MCX([0, 1], 2)])
    if target.startswith("mcx"):
        k = int(target[3:] or 3)
        return circ.Circuit(k + 1, {"q": (0, k + 1)}, [circ.MCX(list(range(k)), k)])
    p = resolve(target, _fixtures_root(args)) if not Path(target).is_file() else Path(target)
    text = p.read_text()
    if text.lstrip().startswith("{"):
        t = load_topology(p)
        return build_grover_circuit(t, loop_clauses(t), iterations=args.t, schedule=args.schedule)
    return circ.loads(text)


def cmd_transpile(args) -> int:
    src = _load_circuit(args.path, args)
    basis = tp.NativeBasis.parse(args.basis)
    native = tp.rebase_native(src, basis, mode=args.mode)
    counts = {k: v for k, v in circ.gate_counts(native).items() if v}
    out = {"input": {"width": src.width, "depth": circ.depth(src), "gates": len(src.flatten().gates)},
           "native": {"width": native.width, "depth": circ.depth(native),
                      "gates": sum(v for k, v in counts.items() if k != "MEASURE"), "counts": counts},
           "basis": sorted(basis.kinds), "mode": args.mode,
           "reference": {"toffoli_routed_depth": REFERENCE_TOFFOLI_DEPTH,
                         "four_eloop_native_gates": REFERENCE_NATIVE_GATES, "binding": False}}
    if native.width <= args.check_cap and not any(g.kind == "MEASURE" for g in src.gates):
        out["equivalent"] = tp.check_equivalence(src, native, cap=args.check_cap)
    if args.out:
        Path(args.out).write_text(circ.dumps(native))
    _emit(out)
    return EXIT_OK


def cmd_report(args) -> int:
    root = _fixtures_root(args)
    if args.fixtures == ["all"]:
        paths = bundled_fixtures(root)
    else:
        paths = [resolve(f, root) for f in args.fixtures]
    if not paths:
        raise UsageError(f"no fixtures found under {root}")
    built = build_report(paths, backend=args.backend, schedule=args.schedule)
    rows = [r for r, _ in built]
    rendered = {"text": to_text(rows), "csv": to_csv(rows), "json": to_json(rows)}
    sys.stdout.write(rendered[args.format])
    if args.out:
        d = Path(args.out)
        d.mkdir(parents=True, exist_ok=True)
        (d / "report.txt").write_text(rendered["text"])
        (d / "report.csv").write_text(rendered["csv"])
        (d / "report.json").write_text(rendered["json"])
        if not args.no_figures:
            from . import plots
            plots.depth_figure(rows, d / "depth.png")
            plots.qubit_figure(rows, d / "qubits.png")
            plots.success_figure(rows, d / "success.png")
            for r, probs in built:
                plots.distribution_figure(r.fixture, probs, 2.0 / probs.size, d / f"distribution-{r.fixture}.png")
    return EXIT_OK if all(r.ok for r in rows) else EXIT_MISMATCH


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="causalflow", description="Grover search for causal orientations of loop graphs.")
    ap.add_argument("--fixtures-dir", help=f"fixture directory (default: ${ENV_FIXTURES} or bundled)")
    sub = ap.add_subparsers(dest="command", required=True)

    def topo(name, fn, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("path", help="topology JSON file or bundled fixture name")
        p.set_defaults(fn=fn)
        return p

    topo("validate", cmd_validate, "check a topology file")
    p = topo("enumerate", cmd_enumerate, "brute-force causal configurations")
    p.add_argument("--list", action="store_true", help="include the bitstrings")
    topo("clauses", cmd_clauses, "full and minimized loop clauses")
    p = topo("plan", cmd_plan, "winner count, mixing angle and predicted success")
    p.add_argument("--t", type=int, help="override the iteration count")

    p = topo("run", cmd_run, "simulate the search and extract winners")
    p.add_argument("--backend", choices=("dense", "phase"), default="phase")
    p.add_argument("--shots", type=int, default=0)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--t", type=int)
    p.add_argument("--schedule", choices=("greedy", "sequential"), default="greedy")
    p.add_argument("--out", help="directory for run.json, histogram.csv and histogram.png")

    p = topo("resources", cmd_resources, "qubits, gate counts and depth")
    p.add_argument("--t", type=int)
    p.add_argument("--schedule", choices=("greedy", "sequential"), default="greedy")
    p.add_argument("--circuit-out", help="write the circuit text format here")

    p = sub.add_parser("transpile", help="rebase a circuit onto a native gate set")
    p.add_argument("path", help="topology JSON, circuit text file, 'toffoli' or 'mcxK'")
    p.add_argument("--basis", default="RZ,SX,X,CX")
    p.add_argument("--mode", choices=tp.MODES, default="v-chain")
    p.add_argument("--t", type=int)
    p.add_argument("--schedule", choices=("greedy", "sequential"), default="greedy")
    p.add_argument("--check-cap", type=int, default=10, help="largest width to equivalence-check")
    p.add_argument("--out", help="write the native circuit text here")
    p.set_defaults(fn=cmd_transpile)

    p = sub.add_parser("report", help="recompute fixtures and compare with their reference values")
    p.add_argument("--fixtures", nargs="+", default=["all"])
    p.add_argument("--backend", choices=("dense", "phase", "auto"), default="phase")
    p.add_argument("--schedule", choices=("greedy", "sequential"), default="greedy")
    p.add_argument("--format", choices=("text", "csv", "json"), default="text")
    p.add_argument("--out", help="directory for report.{txt,csv,json} and figures")
    p.add_argument("--no-figures", action="store_true")
    p.set_defaults(fn=cmd_report)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (TopologyError, UsageError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (CapExceeded, SimulationError) as exc:
        hint = " (try --backend phase)" if getattr(args, "backend", None) == "dense" else ""
        print(f"error: {exc}{hint}", file=sys.stderr)
        return EXIT_ERROR
    except (PlanError, OracleError, circ.CircuitError, tp.TranspileError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
