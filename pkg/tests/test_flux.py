from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from relaxlab.model.flux import CONCAVE, CONVEX, NEITHER, burgers, cubic, flux_from_name, linear_advection, quadratic_traffic

FLUXES = [quadratic_traffic(), quadratic_traffic(1.5), burgers(), linear_advection(-0.7), cubic()]


@pytest.mark.parametrize("flux", FLUXES, ids=lambda f: f.name)
def test_derivative_matches_central_difference(flux):
    u = np.linspace(-2, 2, 101)
    h = 1e-4
    fd = (flux.J(u + h) - flux.J(u - h)) / (2 * h)
    assert np.max(np.abs(fd - flux.dJ(u))) <= flux.third_derivative_bound * h**2 / 6 + 1e-9


@pytest.mark.parametrize("flux", FLUXES, ids=lambda f: f.name)
@given(r=st.floats(0.01, 3.0))
def test_lipschitz_bound_dominates_samples(flux, r):
    u = np.linspace(-r, r, 513)
    assert flux.lipschitz_bound(r) >= np.abs(flux.dJ(u)).max() - 1e-12


def test_convexity_tags():
    assert quadratic_traffic().convexity_tag == CONCAVE
    assert burgers().convexity_tag == CONVEX
    assert cubic().convexity_tag == NEITHER


@given(st.floats(-2, 2), st.floats(-2, 2))
def test_extrema_bracket_samples(a, b):
    flux = cubic()
    lo, hi = min(a, b), max(a, b)
    jmin, jmax = flux.extrema_on(lo, hi)
    s = flux.J(np.linspace(lo, hi, 401))
    assert jmin <= s.min() + 1e-12 and jmax >= s.max() - 1e-12
    assert jmin >= s.min() - 1e-3 and jmax <= s.max() + 1e-3


@given(st.floats(-2, 2))
def test_increasing_part_splits_flux(u):
    flux = cubic()
    # J_plus is nondecreasing and J - J_plus is nonincreasing
    h = 1e-3
    jp = flux.increasing_part(np.array([u, u + h]))
    jm = flux.J(np.array([u, u + h])) - jp
    assert jp[1] >= jp[0] - 1e-12
    assert jm[1] <= jm[0] + 1e-12


def test_flux_factory():
    assert flux_from_name("quadratic_traffic", scale=2.0).J(np.array(0.5)) == pytest.approx(0.5)
    with pytest.raises(ValueError, match="unknown flux"):
        flux_from_name("nope")
    with pytest.raises(ValueError):
        quadratic_traffic(-1.0)
