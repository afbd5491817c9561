"""Riemann zeta sums used by the power-law relaxation and jump kernels."""

from __future__ import annotations

import math

import numpy as np
from scipy import special

ZETA_TOL = 1e-9  # accuracy the rate tables and constants are checked against


def zeta_tail(s: float, start: int) -> float:
    """Return ``sum_{k >= start} k**-s`` (Hurwitz zeta)."""
    if s <= 1.0:
        raise ValueError(f"zeta tail diverges for s={s} <= 1")
    if start < 1:
        raise ValueError("start must be >= 1")
    return float(special.zeta(s, start))


def zeta(s: float) -> float:
    """Riemann zeta function for real ``s > 1``."""
    return zeta_tail(s, 1)


def c_gamma(gamma: float) -> float:
    """Normalising constant of the jump law ``k**-(1+gamma)``: ``1/zeta(1+gamma)``."""
    if not gamma > 0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    return 1.0 / zeta(1.0 + gamma)


def tail_sums(s: float, N: int) -> np.ndarray:
    """Array ``T`` with ``T[i] = sum_{k >= i} k**-s`` for ``i = 1..N`` (``T[0]`` unused, nan)."""
    out = np.empty(N + 1)
    out[0] = math.nan
    k = np.arange(1, N + 1, dtype=float)
    # reverse cumulative sum adds small terms first, so differences are the exact terms
    out[1:] = np.cumsum((k ** (-s))[::-1])[::-1] + zeta_tail(s, N + 1)
    return out
