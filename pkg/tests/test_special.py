from __future__ import annotations

import math

import numpy as np
import pytest

from relaxlab.model.special import ZETA_TOL, c_gamma, tail_sums, zeta, zeta_tail


@pytest.mark.parametrize("s, exact", [(2.0, math.pi**2 / 6), (4.0, math.pi**4 / 90), (6.0, math.pi**6 / 945)])
def test_zeta_closed_forms(s, exact):
    assert zeta(s) == pytest.approx(exact, abs=ZETA_TOL)


@pytest.mark.parametrize("start", [1, 2, 7, 100, 5000])
def test_zeta_tail_is_zeta_minus_head(start):
    head = np.sum(np.arange(1, start, dtype=float) ** -2.0)
    assert zeta_tail(2.0, start) == pytest.approx(math.pi**2 / 6 - head, abs=ZETA_TOL)


def test_zeta_tail_integral_bounds():
    # int_K^inf x^-s dx <= sum_{k >= K} k^-s <= K^-s + int_K^inf x^-s dx
    s, K = 3.0, 200
    lower = K ** (1 - s) / (s - 1)
    assert lower <= zeta_tail(s, K) <= lower + K**-s


def test_c2_value():
    assert c_gamma(2.0) == pytest.approx(0.8319073725940419, abs=ZETA_TOL)
    assert c_gamma(1.0) == pytest.approx(6 / math.pi**2, abs=ZETA_TOL)


def test_tail_sums_are_suffix_sums():
    N = 50
    tails = tail_sums(3.0, N)
    assert np.isnan(tails[0])
    assert tails[1] == pytest.approx(zeta(3.0), abs=ZETA_TOL)
    k = np.arange(1, N + 1, dtype=float)
    assert np.allclose(tails[1:-1] - tails[2:], k[:-1] ** -3.0, rtol=1e-12)
    assert tails[N] == pytest.approx(zeta_tail(3.0, N), abs=ZETA_TOL)


@pytest.mark.parametrize("s", [1.0, 0.5, -1.0])
def test_divergent_sums_rejected(s):
    with pytest.raises(ValueError):
        zeta_tail(s, 1)


def test_c_gamma_rejects_nonpositive():
    with pytest.raises(ValueError):
        c_gamma(0.0)
