"""Test functions for weak-form checks: bumps in t and x and boundary cutoffs.

Every test function is separable, phi(t, x) = a(t) b(x), so the weak-form sums
become matrix-vector products over the stored history.
"""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np


def _transition(s):
    """C-infinity step: 0 for s <= 0, 1 for s >= 1."""
    s = np.asarray(s, dtype=float)
    h = lambda v: np.where(v > 0, np.exp(-1.0 / np.maximum(v, 1e-300)), 0.0)
    a, b = h(s), h(1.0 - s)
    return a / (a + b)


def _transition_deriv(s):
    s = np.asarray(s, dtype=float)
    inside = (s > 0) & (s < 1)
    sc = np.clip(s, 1e-12, 1 - 1e-12)
    a = np.exp(-1.0 / sc)
    b = np.exp(-1.0 / (1.0 - sc))
    da = a / sc**2
    db = -b / (1.0 - sc) ** 2
    d = (da * (a + b) - a * (da + db)) / (a + b) ** 2
    return np.where(inside, d, 0.0)


def psi(s):
    """Smooth profile vanishing on s <= 1/4 and equal to 1 on s >= 1."""
    return _transition((np.asarray(s, dtype=float) - 0.25) / 0.75)


def dpsi(s):
    return _transition_deriv((np.asarray(s, dtype=float) - 0.25) / 0.75) / 0.75


def cutoff(eps: float):
    """psi_eps(x) = psi(x/eps) near 0, 1 on [eps, 1-eps], psi((1-x)/eps) near 1."""
    if not 0 < eps <= 0.5:
        raise ValueError("cutoff width must lie in (0, 1/2]")

    def f(x):
        x = np.asarray(x, dtype=float)
        return np.where(x < 0.5, psi(x / eps), psi((1.0 - x) / eps))

    def df(x):
        x = np.asarray(x, dtype=float)
        return np.where(x < 0.5, dpsi(x / eps) / eps, -dpsi((1.0 - x) / eps) / eps)

    return f, df


def bump(center: float, half_width: float):
    """(1 - s^2)^3 on |s| < 1 with s = (y - center)/half_width; C^2."""

    def f(y):
        s = (np.asarray(y, dtype=float) - center) / half_width
        return np.where(np.abs(s) < 1, (1 - s**2) ** 3, 0.0)

    def df(y):
        s = (np.asarray(y, dtype=float) - center) / half_width
        return np.where(np.abs(s) < 1, -6 * s * (1 - s**2) ** 2 / half_width, 0.0)

    return f, df


@dataclass(frozen=True)
class SpaceFactor:
    name: str
    b: Callable
    support: tuple[float, float]
    # values at x = 0 and x = 1; nonzero only for boundary-touching factors
    touches: tuple[bool, bool] = (False, False)


@dataclass(frozen=True)
class TimeFactor:
    name: str
    a: Callable
    da: Callable


@dataclass(frozen=True)
class TestFunction:
    __test__ = False  # not a pytest class

    time: TimeFactor
    space: SpaceFactor

    @property
    def name(self) -> str:
        return f"{self.time.name}*{self.space.name}"

    def __call__(self, t, x):
        return self.time.a(t) * self.space.b(x)


@dataclass
class TestFunctionFamily:
    """Tensor products a(t) b(x) plus the boundary cutoffs psi_eps."""

    __test__ = False

    T: float
    times: list[TimeFactor] = field(default_factory=list)
    spaces: list[SpaceFactor] = field(default_factory=list)
    cutoff_eps: tuple[float, ...] = ()

    @classmethod
    def default(cls, T: float, boundary: bool = False) -> TestFunctionFamily:
        """Fixed bump library; ``boundary`` adds factors that do not vanish at x = 0, 1."""
        times = []
        a0, da0 = bump(0.0, T)
        times.append(TimeFactor("t-initial", a0, da0))
        for c in (0.25, 0.5, 0.75):
            a, da = bump(c * T, 0.25 * T)
            times.append(TimeFactor(f"t-bump({c:g}T)", a, da))
        spaces = []
        for c in (0.15, 0.3, 0.5, 0.7, 0.85):
            b, _ = bump(c, 0.14)
            spaces.append(SpaceFactor(f"x-bump({c:g})", b, (c - 0.14, c + 0.14)))
        eps_list = (0.25, 0.125, 0.0625)
        for e in eps_list:
            b, _ = cutoff(e)
            spaces.append(SpaceFactor(f"cutoff({e:g})", b, (0.25 * e, 1 - 0.25 * e)))
        if boundary:
            bl, _ = bump(0.0, 0.3)
            br, _ = bump(1.0, 0.3)
            spaces.append(SpaceFactor("x-left-edge", bl, (0.0, 0.3), (True, False)))
            spaces.append(SpaceFactor("x-right-edge", br, (0.7, 1.0), (False, True)))
            spaces.append(SpaceFactor("x-one", lambda x: np.ones_like(np.asarray(x, dtype=float)),
                                      (0.0, 1.0), (True, True)))
        return cls(T, times, spaces, eps_list)

    def members(self) -> list[TestFunction]:
        return [TestFunction(a, b) for a in self.times for b in self.spaces]

    def cutoffs(self) -> list[tuple[float, Callable]]:
        return [(e, cutoff(e)[0]) for e in self.cutoff_eps]
