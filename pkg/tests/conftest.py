from __future__ import annotations

import numpy as np
import pytest

from attractors.torus import TorusCharge

I3 = np.eye(3, dtype=np.int64)
Z3 = np.zeros((3, 3), dtype=np.int64)


def charge(p0, P, Q, q0) -> TorusCharge:
    return TorusCharge(p0, np.asarray(P), np.asarray(Q), q0)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)


@pytest.fixture
def unit_charge() -> TorusCharge:
    """``(1, 0, I, 0)``: attracts to ``iI`` with ``C = 1``."""
    return charge(1, Z3, I3, 0)


@pytest.fixture
def moore_charge() -> TorusCharge:
    """``(1, I, I, -1)``: attracts to ``iI`` with ``C = 1 - i``."""
    return charge(1, I3, I3, -1)


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
