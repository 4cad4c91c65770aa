"""Matplotlib figures written to files (Agg backend, no display needed)."""
from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .report import ReportRow  # noqa: E402
from .sim import Histogram  # noqa: E402


def _save(fig, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    # fixed metadata keeps reruns byte-identical
    fig.savefig(path, dpi=110, metadata={"Software": None})
    plt.close(fig)
    return path


def _paired_bars(rows: Sequence[ReportRow], attr: str, ref_key: str, ylabel: str, path: Path) -> Path:
    names = [r.fixture for r in rows]
    ours = [getattr(r, attr) for r in rows]
    refs = [r.reference.get(ref_key, np.nan) for r in rows]
    x = np.arange(len(rows))
    fig, ax = plt.subplots(figsize=(max(6, 0.7 * len(rows)), 4))
    ax.bar(x - 0.2, ours, 0.4, label="computed")
    ax.bar(x + 0.2, refs, 0.4, label="reference", alpha=0.7)
    ax.set_xticks(x, names, rotation=45, ha="right")
    ax.set_ylabel(ylabel)
    ax.legend()
    return _save(fig, path)


def depth_figure(rows: Sequence[ReportRow], path: Path) -> Path:
    return _paired_bars(rows, "depth", "depth", "circuit depth (layers)", path)


def qubit_figure(rows: Sequence[ReportRow], path: Path) -> Path:
    return _paired_bars(rows, "total_qubits", "total_qubits", "total qubits", path)


def success_figure(rows: Sequence[ReportRow], path: Path) -> Path:
    fig, ax = plt.subplots(figsize=(6, 4))
    th = [r.theta_deg for r in rows]
    ax.scatter(th, [r.predicted_success for r in rows], label="computed", zorder=3)
    ax.scatter([r.reference.get("theta_deg", np.nan) for r in rows],
               [r.reference.get("success", np.nan) for r in rows], marker="x", label="reference", zorder=3)
    grid = np.linspace(min(th) - 3, max(th) + 3, 200)
    ax.plot(grid, np.sin(3 * np.radians(grid)) ** 2, lw=0.8, color="grey", label="sin^2(3 theta)")
    ax.set_xlabel("mixing angle (deg)")
    ax.set_ylabel("success probability, t = 1")
    ax.legend()
    return _save(fig, path)


def distribution_figure(name: str, probs: np.ndarray, threshold: float, path: Path) -> Path:
    """Sorted e-register probabilities with the winner threshold."""
    fig, ax = plt.subplots(figsize=(6, 3.5))
    p = np.sort(probs)[::-1]
    ax.semilogy(np.arange(1, p.size + 1), np.clip(p, 1e-18, None), drawstyle="steps-mid")
    ax.axhline(threshold, color="red", lw=0.8, ls="--", label="winner threshold")
    ax.set_xlabel("rank")
    ax.set_ylabel("probability")
    ax.set_title(name)
    ax.legend()
    return _save(fig, path)


def histogram_figure(h: Histogram, path: Path, *, top: int = 40) -> Path:
    items = sorted(h.counts.items(), key=lambda kv: (-kv[1], kv[0]))[:top]
    fig, ax = plt.subplots(figsize=(max(6, 0.25 * len(items)), 4))
    ax.bar(range(len(items)), [v for _, v in items])
    ax.set_xticks(range(len(items)), [k for k, _ in items], rotation=90, fontsize=7)
    ax.set_ylabel(f"counts ({h.shots} shots)")
    return _save(fig, path)
