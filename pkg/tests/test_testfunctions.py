from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from relaxlab.diagnostics.testfunctions import TestFunctionFamily, bump, cutoff, dpsi, psi

eps_values = st.floats(0.01, 0.5)


@given(eps_values)
def test_cutoff_range_and_plateau(eps):
    f, _ = cutoff(eps)
    x = np.linspace(0, 1, 4001)
    v = f(x)
    assert v.min() >= 0.0 and v.max() <= 1.0
    inner = (x >= eps) & (x <= 1 - eps)
    assert np.all(v[inner] == pytest.approx(1.0, abs=1e-14))


@given(eps_values)
def test_cutoff_support(eps):
    f, _ = cutoff(eps)
    x = np.linspace(0, 1, 4001)
    outer = (x <= eps / 4) | (x >= 1 - eps / 4)
    assert np.all(f(x[outer]) == 0.0)


def test_cutoff_l1_converges_to_one():
    x = np.linspace(0, 1, 200001)
    gaps = [1 - integrate.trapezoid(cutoff(e)[0](x), x) for e in (0.2, 0.1, 0.05, 0.025)]
    assert all(a > b > 0 for a, b in zip(gaps, gaps[1:]))
    assert gaps[-1] < 0.05


def test_cutoff_derivative_matches_finite_difference():
    f, df = cutoff(0.2)
    x = np.linspace(0.01, 0.99, 197)
    h = 1e-6
    assert np.allclose(df(x), (f(x + h) - f(x - h)) / (2 * h), atol=1e-5)


def test_psi_endpoints():
    assert psi(0.25) == 0.0 and psi(0.0) == 0.0
    assert psi(1.0) == pytest.approx(1.0) and psi(3.0) == 1.0
    assert dpsi(0.1) == 0.0 and dpsi(2.0) == 0.0


def test_cutoff_rejects_bad_width():
    with pytest.raises(ValueError):
        cutoff(0.0)
    with pytest.raises(ValueError):
        cutoff(0.6)


def test_bump_shape():
    f, df = bump(0.5, 0.1)
    assert f(0.5) == 1.0 and f(0.61) == 0.0 and f(0.39) == 0.0
    h = 1e-6
    x = np.linspace(0.41, 0.59, 37)
    assert np.allclose(df(x), (f(x + h) - f(x - h)) / (2 * h), atol=1e-5)


@pytest.mark.parametrize("boundary, n_space", [(False, 8), (True, 11)])
def test_default_family(boundary, n_space):
    fam = TestFunctionFamily.default(1.0, boundary=boundary)
    members = fam.members()
    assert len(fam.spaces) == n_space and len(members) == 4 * n_space
    assert len({m.name for m in members}) == len(members)
    for m in members:
        assert m(1.0, np.array([0.3, 0.5])).max() == 0.0  # compact support in time
        if not any(m.space.touches):
            assert m.space.b(np.array([0.0, 1.0])).max() == 0.0
