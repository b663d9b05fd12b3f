from __future__ import annotations

from functools import reduce

import numpy as np
import pytest

# Filled by tests/test_acceptance.py; printed after the run.
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def kron_all(*ops):
    return reduce(np.kron, ops)


def dense_local(op, site, n, d=2):
    """Brute-force embedding of a one-site operator (1-based site)."""
    eye = np.eye(d)
    return kron_all(*[op if k == site else eye for k in range(1, n + 1)])


UP = np.array([1, 0], dtype=complex)
DOWN = np.array([0, 1], dtype=complex)

R2 = np.sqrt(2)
# Hand-expanded Bell kets, indexed --, -+, +-, ++
KETS = [
    np.array([0, 1, -1, 0]) / R2,
    np.array([1, 0, 0, -1]) / R2,
    np.array([0, 1, 1, 0]) / R2,
    np.array([1, 0, 0, 1]) / R2,
]
XS = [
    np.eye(2),
    np.array([[0, 1], [1, 0]]),
    np.array([[-1, 0], [0, 1]]),
    np.array([[0, 1], [-1, 0]]),
]
# Six axis states
AXIS = [
    np.array([1, 0]),
    np.array([0, 1]),
    np.array([1, 1]) / R2,
    np.array([1, -1]) / R2,
    np.array([1, 1j]) / R2,
    np.array([1, -1j]) / R2,
]
