from __future__ import annotations

from functools import lru_cache
from pathlib import Path

import pytest

from causalflow.report import bundled_fixtures
from causalflow.topology import Topology, load_topology

FIXTURE_PATHS = {p.stem: p for p in bundled_fixtures()}
NAMES = sorted(FIXTURE_PATHS)


@lru_cache(maxsize=None)
def fixture(name: str) -> Topology:
    return load_topology(FIXTURE_PATHS[name])


def triangle_doc(**over) -> dict:
    doc = {
        "name": "tri",
        "vertices": 3,
        "edges": [{"id": 0, "from": 0, "to": 1}, {"id": 1, "from": 1, "to": 2}, {"id": 2, "from": 2, "to": 0}],
        "sets": [[0], [1], [2]],
        "fixed_edge": 0,
        "fixed_strategy": "marker",
    }
    doc.update(over)
    return doc


@pytest.fixture
def fixture_paths() -> dict[str, Path]:
    return dict(FIXTURE_PATHS)


ACCEPTANCE_LINES: list[str] = []


def record(criterion: int, ok: bool, detail: str) -> str:
    line = f"criterion {criterion}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    return line


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
