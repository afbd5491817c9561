from __future__ import annotations

import numpy as np
import pytest

from relaxlab.diagnostics import (
    ENTROPY_SLACK_C,
    TestFunctionFamily,
    calibrate_slack,
    constant_field,
    default_k_grid,
    entropy_residual,
    glued_riemann_field,
    kruzhkov_residuals,
    smooth_manufactured,
)
from relaxlab.fv_solver import Field, Grid, solve
from relaxlab.model import make_canonical_scenario, riemann_scenario
from relaxlab.report import FAIL, INFO


def _single(T, time_name="t-initial", space_name="x-bump(0.5)", boundary=False):
    fam = TestFunctionFamily.default(T, boundary=boundary)
    return [m for m in fam.members() if m.time.name == time_name and m.space.name == space_name]


def test_default_k_grid_covers_data(canonical2):
    k = default_k_grid(canonical2)
    assert len(k) >= 21 and k.min() == pytest.approx(0.2) and k.max() == pytest.approx(0.8)
    assert 0.5 in k  # critical point of the traffic flux


def test_equilibrium_residual_vanishes(equilibrium):
    fld = constant_field(equilibrium, 0.5, 64, np.linspace(0, 0.5, 33))
    R = kruzhkov_residuals(fld, equilibrium).R
    assert np.nanmax(np.abs(R)) < 1e-12


@pytest.mark.parametrize("k", [0.25, 0.5, 0.75])
def test_stationary_shock_closed_form(k):
    """Glued (0, 1): the time terms cancel and only 2 J(k) b(1/2) int a survives."""
    T = 0.5
    fld, s = glued_riemann_field(0.0, 1.0, 128, T, 256)
    R = kruzhkov_residuals(fld, s, [k], _single(T)).R[0, 0]
    exact = 2 * k * (1 - k) * T * 16 / 35
    assert R == pytest.approx(exact, rel=1e-3)
    assert R > 0


def test_stationary_shock_passes():
    fld, s = glued_riemann_field(0.0, 1.0, 128, 0.5, 128)
    assert entropy_residual(fld, s).passed


def test_expansion_shock_fails():
    fld, s = glued_riemann_field(1.0, 0.0, 128, 0.5, 128)
    rep = entropy_residual(fld, s)
    assert not rep.passed
    assert any("x-bump(0.5)" in c.name for c in rep.by_status(FAIL))


def test_expansion_value_is_negative_mirror():
    T = 0.5
    fld, s = glued_riemann_field(1.0, 0.0, 128, T, 256)
    R = kruzhkov_residuals(fld, s, [0.5], _single(T)).R[0, 0]
    assert R == pytest.approx(-2 * 0.25 * T * 16 / 35, rel=1e-3)


def test_smooth_manufactured_first_order():
    res = []
    for n in (32, 64, 128, 256):
        fld, s = smooth_manufactured(n)
        res.append(np.nanmax(np.abs(kruzhkov_residuals(fld, s).R)))
    res = np.array(res)
    assert np.all(res[:-1] > res[1:])
    order = np.log2(res[1] / res[3]) / 2
    assert order > 0.8


def test_fv_solution_passes(canonical2_dense, canonical2):
    assert entropy_residual(canonical2_dense, canonical2).passed


def test_boundary_tests_skipped_in_non_integrable_regime(canonical2_dense, canonical2):
    tests = TestFunctionFamily.default(canonical2.T, boundary=True)
    table = kruzhkov_residuals(canonical2_dense, canonical2, tests=tests)
    edge = [n for n in table.names if "edge" in n or "x-one" in n]
    assert edge and all(n in table.skipped for n in edge)
    rep = entropy_residual(canonical2_dense, canonical2, tests=tests)
    assert all(rep[f"entropy[{n}]"].status == INFO for n in edge)
    assert np.all(np.isnan(table.violation()[[table.names.index(n) for n in edge]]))


def test_boundary_tests_evaluated_when_integrable(canonical_half):
    fld = solve(canonical_half, 128, [canonical_half.T], dense=True)
    table = kruzhkov_residuals(fld, canonical_half)
    assert any("x-one" in n for n in table.names) and not table.skipped


def test_needs_history(canonical2):
    fld = Field(Grid.uniform(32, canonical2), np.full(32, 0.5), 0.0)
    with pytest.raises(ValueError, match="history"):
        kruzhkov_residuals(fld, canonical2)


def test_calibrate_slack_under_frozen_constant():
    runs = []
    for a, b in ((0.0, 1.0), (1.0, 0.0), (0.2, 0.7), (0.9, 0.3)):
        s = riemann_scenario(a, b, 0.25)
        runs.append((solve(s, 128, [0.25], dense=True), s))
    C = calibrate_slack(runs)
    assert 0 <= C <= ENTROPY_SLACK_C
