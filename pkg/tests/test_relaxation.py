from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from relaxlab.model import RelaxationProfile, c_gamma, make_canonical_scenario, make_scenario, quadratic_traffic
from relaxlab.model.assumptions import validate_assumptions


@pytest.mark.parametrize("gamma", [0.5, 1.0, 2.0, 3.0])
def test_boundary_cell_mass_flags(gamma):
    prof = RelaxationProfile.power_law(gamma, 1.0)
    left = prof.cell_mass(0.0, 0.1)
    right = prof.cell_mass(0.9, 1.0)
    assert np.isinf(left) == (gamma >= 1) and np.isinf(right) == (gamma >= 1)
    assert prof.integrable_left == prof.integrable_right == (gamma < 1)


@given(a=st.floats(0.01, 0.98), w=st.floats(0.001, 0.01), gamma=st.sampled_from([0.5, 2.0]))
def test_interior_mass_matches_quadrature(a, w, gamma):
    prof = RelaxationProfile.power_law(gamma, 0.7)
    b = min(a + w, 0.99)
    ref, _ = integrate.quad(lambda x: float(prof.V(x)), a, b)
    assert float(prof.cell_mass(a, b)) == pytest.approx(ref, rel=1e-9)


def test_integrable_boundary_mass_closed_form():
    prof = RelaxationProfile.power_law(0.5, 1.0)
    ref = 2 * 0.1**0.5 + (1 - 0.9**0.5) * 2  # int_0^0.1 x^-1/2 + int_0^0.1 (1-x)^-1/2
    assert float(prof.cell_mass(0.0, 0.1)) == pytest.approx(ref, rel=1e-12)


def test_profile_positive_and_divergent():
    prof = RelaxationProfile.power_law(2.0, 1.0)
    x = np.linspace(1e-3, 1 - 1e-3, 99)
    assert np.all(prof.V(x) > 0)
    y = 2.0 ** -np.arange(2, 30)
    assert np.all(np.diff(prof.V(y)) > 0)


def test_regime_labels():
    assert RelaxationProfile.power_law(2.0, 1).regime == "non-integrable"
    assert RelaxationProfile.power_law(0.5, 1).regime == "integrable"
    assert RelaxationProfile.custom(lambda x: x, True, False).regime == "mixed"


def test_canonical_gamma2_assumptions():
    rep = validate_assumptions(make_canonical_scenario(2.0, 0.8, 0.2, 0.5, 1.0))
    assert rep.regime == "non-integrable"
    assert rep.passed, rep.summary()
    # each side contributes gamma y / (3 c_gamma) to the inverse-V bound
    prof = RelaxationProfile.power_law(2.0, c_gamma(2.0) / 2.0)
    y = 2.0**-12
    assert prof.inv_V_bound(y) == pytest.approx(2 * 2.0 * y / (3 * c_gamma(2.0)), rel=1e-2)


def test_canonical_gamma_half_integrable():
    rep = validate_assumptions(make_canonical_scenario(0.5, 0.8, 0.2, 0.5, 1.0))
    assert rep.regime == "integrable"
    assert not rep.by_status("fail"), rep.summary()


def test_constant_profile_rejected():
    s = make_scenario(quadratic_traffic(), RelaxationProfile.constant(2.0), 0.5, 0.5, 0.5, 0.5, 1.0)
    rep = validate_assumptions(s)
    assert rep["V-boundary-divergence"].failed


def test_zero_profile_flagged_nonconforming():
    s = make_scenario(quadratic_traffic(), RelaxationProfile.zero(), 0.5, 0.5, 0.5, 0.5, 1.0)
    rep = validate_assumptions(s)
    assert rep["V-positive"].failed and not rep.passed
