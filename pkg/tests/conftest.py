from __future__ import annotations

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from relaxlab.fv_solver import solve
from relaxlab.model import make_canonical_scenario, quadratic_traffic

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def traffic():
    return quadratic_traffic()


@pytest.fixture(scope="session")
def canonical2():
    """Non-integrable canonical run data used across the suite."""
    return make_canonical_scenario(2.0, 0.8, 0.2, 0.5, 1.0)


@pytest.fixture(scope="session")
def canonical_half():
    return make_canonical_scenario(0.5, 0.8, 0.2, 0.5, 1.0)


@pytest.fixture(scope="session")
def equilibrium():
    return make_canonical_scenario(2.0, 0.5, 0.5, 0.5, 0.5)


@pytest.fixture(scope="session")
def canonical2_dense(canonical2):
    return solve(canonical2, 128, [canonical2.T], dense=True)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


# ------------------------------------------------------------ acceptance lines

ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def criterion():
    """record(n, ok, detail) stores one pass/fail line for acceptance criterion n."""

    def record(n: int, ok: bool, detail: str) -> bool:
        ACCEPTANCE[n] = (bool(ok), detail)
        return bool(ok)

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
