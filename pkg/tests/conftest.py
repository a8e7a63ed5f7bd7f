from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest

from zetagaps.arithmetic import build_tables
from zetagaps.zeta import find_zeros

DATA = Path(__file__).resolve().parent / "data"


@pytest.fixture(scope="session")
def zeros_1e4():
    table = find_zeros(0.0, 1.0e4)
    assert table.certified
    return table


@pytest.fixture(scope="session")
def zeros_600():
    return find_zeros(0.0, 600.0)


@pytest.fixture(scope="session")
def tables_1e4():
    return build_tables(10_000)


@pytest.fixture(scope="session")
def oracle_zeros_100():
    return np.loadtxt(DATA / "oracle_zeros_100.txt")


@pytest.fixture(scope="session")
def oracle_zeros_1100():
    return np.loadtxt(DATA / "oracle_zeros_1100.txt")


@pytest.fixture(scope="session")
def oracle_stats():
    return json.loads((DATA / "oracle_stats_1000.json").read_text())


# -- acceptance reporting -------------------------------------------------

ACCEPTANCE_LINES: dict[int, str] = {}


@pytest.fixture
def report():
    """report(n, ok, text) records the one-line verdict for criterion n."""

    def _record(number: int, ok: bool, text: str, seconds: float | None = None) -> bool:
        took = f" ({seconds:.2f} s)" if seconds is not None else ""
        ACCEPTANCE_LINES[number] = f"{'PASS' if ok else 'FAIL'}  criterion {number:>2}: {text}{took}"
        return ok

    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[n])
