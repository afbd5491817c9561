from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from relaxlab.fv_solver import solve
from relaxlab.model import PiecewiseConstant, Step, make_canonical_scenario
from relaxlab.viscous_solver import (
    energy_estimate,
    h1_norm,
    mollify_data,
    smoothing_width,
    viscous_solve,
    weak_residual,
)


def _l2(f, g, t=0.0):
    x = np.linspace(0, 1, 20001)
    return np.sqrt(integrate.trapezoid((f(t, x) - g(t, x)) ** 2, x))


def test_constant_rho_is_fixed():
    s = make_canonical_scenario(2.0, 0.3, 0.3, 0.3, 1.0)
    for eps in (0.1, 0.01, 0.001):
        u0e, rhoe = mollify_data(s, eps)
        x = np.linspace(0, 1, 101)
        assert np.allclose(rhoe(0.5, x), 0.3, atol=1e-14)
        assert np.allclose(u0e(x), 0.3, atol=1e-14)


def test_canonical_rho_sup_and_boundary_values(canonical2):
    u0e, rhoe = mollify_data(canonical2, 0.01)
    x = np.linspace(0, 1, 2001)
    r = rhoe(0.0, x)
    assert r.max() <= 0.8 and r.min() >= 0.2
    assert rhoe(0.0, 0.0) == pytest.approx(0.8, abs=1e-14) and rhoe(0.0, 1.0) == pytest.approx(0.2, abs=1e-14)


def test_initial_matches_boundary_data():
    s = make_canonical_scenario(2.0, 0.9, 0.1, Step(0.2, 0.7), 1.0)
    u0e, _ = mollify_data(s, 0.01)
    assert u0e(0.0) == pytest.approx(0.9, abs=1e-14) and u0e(1.0) == pytest.approx(0.1, abs=1e-14)


def test_mollification_error_halves(canonical2):
    eps_list = [0.02, 0.01, 0.005, 0.0025]
    errs = [_l2(mollify_data(canonical2, e)[1], canonical2.boundary.rho) for e in eps_list]
    ratios = np.array(errs[:-1]) / np.array(errs[1:])
    assert np.all((ratios > 2 * 0.7) & (ratios < 2 * 1.3)), ratios


def test_smoothing_width_cap():
    assert smoothing_width(0.01) == pytest.approx(0.05)
    assert smoothing_width(10.0) == pytest.approx(1 / 6)
    with pytest.raises(ValueError):
        mollify_data(make_canonical_scenario(2.0, 0.5, 0.5, 0.5, 1.0), 0.0)


def test_h1_norm_of_sine():
    assert h1_norm(lambda x: np.sin(np.pi * x)) == pytest.approx(np.sqrt(0.5 + np.pi**2 / 2), rel=1e-5)


def test_constant_equilibrium():
    s = make_canonical_scenario(2.0, 0.4, 0.4, 0.4, 0.5)
    run = viscous_solve(s, 0.01, 64, [0.25, 0.5])
    assert all(np.max(np.abs(u - 0.4)) <= 1e-14 for u in run.field.history_u)
    assert energy_estimate(run) == pytest.approx((0.0, 0.0), abs=1e-25)


@settings(max_examples=15)
@given(st.integers(0, 2**31))
def test_maximum_principle(seed):
    rng = np.random.default_rng(seed)
    a, b = (float(v) for v in rng.uniform(0, 1, 2))
    s = make_canonical_scenario(float(rng.choice([0.5, 2.0])), a, b, PiecewiseConstant.random(rng, 8), 0.1)
    run = viscous_solve(s, float(rng.choice([0.02, 0.005])), 32, [0.05, 0.1], dense=True)
    U = run.field.history()
    assert U.min() >= 0.0 and U.max() <= 1.0


def test_dirichlet_values_in_pinned_cells(canonical2):
    run = viscous_solve(canonical2, 0.01, 64, [0.5, 1.0])
    for u in run.field.history_u:
        assert u[0] == 0.8 and u[-1] == 0.2


def test_range_of_data_for_canonical(canonical2):
    run = viscous_solve(canonical2, 0.005, 128, [0.5, 1.0], dense=True)
    U = run.field.history()
    assert U.min() >= 0.2 - 1e-12 and U.max() <= 0.8 + 1e-12


def test_eps_sweep_approaches_fv(canonical2):
    ref = solve(canonical2, 256, [1.0]).u
    d = [np.abs(viscous_solve(canonical2, e, 256).field.u - ref).mean() for e in (0.02, 0.01, 0.005)]
    assert d[0] > d[1] > d[2]


def test_energy_doubling_horizon():
    e = {T: energy_estimate(viscous_solve(make_canonical_scenario(2.0, 0.8, 0.2, 0.5, T), 0.01, 128))
         for T in (1.0, 2.0)}
    for i in range(2):
        assert e[2.0][i] <= 2 * e[1.0][i] * 1.2


def test_diffusive_energy_scales_with_eps(canonical2):
    """Without an interior shock eps |u_x|^2 is linear in eps."""
    v = [energy_estimate(viscous_solve(canonical2, e, 256))[0] for e in (0.02, 0.01)]
    assert v[0] / v[1] == pytest.approx(2.0, rel=0.1)


def test_weak_residual_first_order():
    s = make_canonical_scenario(2.0, 0.8, 0.2, 0.5, 0.5)
    tests = []
    for k in range(1, 6):
        tests.append((
            lambda t, x, k=k: np.cos(k * np.pi * t) * x**2 * (1 - x) ** 2,
            lambda t, x, k=k: -k * np.pi * np.sin(k * np.pi * t) * x**2 * (1 - x) ** 2,
            lambda t, x, k=k: np.cos(k * np.pi * t) * (2 * x - 6 * x**2 + 4 * x**3),
            lambda t, x, k=k: np.cos(k * np.pi * t) * (2 - 12 * x + 12 * x**2),
        ))
    res = [np.abs(weak_residual(viscous_solve(s, 0.01, n, dense=True), tests)).max() for n in (64, 128, 256)]
    assert res[0] / res[1] > 1.6 and res[1] / res[2] > 1.6


def test_energy_log_columns(canonical2):
    run = viscous_solve(canonical2, 0.01, 64, [1.0])
    tab = run.energy_table()
    assert tab.shape[1] == 4 and tab[0, 0] == 0.0 and tab[-1, 0] == pytest.approx(1.0)
    assert np.all(tab[:, 1:] >= 0)
    assert set(run.h1_norms) == {0.0, 1.0} and all(np.isfinite(list(run.h1_norms.values())))
    assert 0 <= run.pinned_bound < 1e-6


def test_input_validation(canonical2):
    with pytest.raises(ValueError):
        viscous_solve(canonical2, -1.0, 64)
    with pytest.raises(ValueError):
        viscous_solve(canonical2, 0.01, 4)
