"""Relaxation rate profiles V(x) on (0, 1)."""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass

import numpy as np
from scipy import integrate


@dataclass(frozen=True)
class RelaxationProfile:
    """Relaxation rate V on (0, 1).

    ``kind`` is ``"power"`` for ``V = amplitude * (x**-gamma + (1-x)**-gamma)``,
    ``"zero"`` for the V = 0 testing mode, ``"constant"`` or ``"custom"``.
    Power-law masses are computed in closed form so that divergent boundary
    cells come out as exactly ``inf``.
    """

    kind: str
    V: Callable[[np.ndarray], np.ndarray]
    integrable_left: bool
    integrable_right: bool
    gamma: float | None = None
    amplitude: float = 1.0

    @classmethod
    def power_law(cls, gamma: float, amplitude: float) -> RelaxationProfile:
        if not gamma > 0:
            raise ValueError(f"power-law exponent must be positive, got {gamma}")
        if not amplitude > 0:
            raise ValueError("power-law amplitude must be positive")

        def V(x):
            x = np.asarray(x, dtype=float)
            with np.errstate(divide="ignore"):
                return amplitude * (x ** (-gamma) + (1.0 - x) ** (-gamma))

        integrable = gamma < 1.0
        return cls("power", V, integrable, integrable, gamma=gamma, amplitude=amplitude)

    @classmethod
    def zero(cls) -> RelaxationProfile:
        return cls("zero", lambda x: np.zeros_like(np.asarray(x, dtype=float)), True, True, amplitude=0.0)

    @classmethod
    def constant(cls, value: float) -> RelaxationProfile:
        return cls(
            "constant",
            lambda x: np.full_like(np.asarray(x, dtype=float), value),
            True,
            True,
            amplitude=value,
        )

    @classmethod
    def custom(cls, V, integrable_left: bool, integrable_right: bool) -> RelaxationProfile:
        return cls("custom", V, integrable_left, integrable_right)

    @property
    def integrable(self) -> bool:
        return self.integrable_left and self.integrable_right

    @property
    def regime(self) -> str:
        if self.integrable_left and self.integrable_right:
            return "integrable"
        if not self.integrable_left and not self.integrable_right:
            return "non-integrable"
        return "mixed"

    def cell_mass(self, a, b):
        """int_a^b V(x) dx for 0 <= a <= b <= 1, possibly ``inf``."""
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        if self.kind == "zero":
            return np.zeros(np.broadcast(a, b).shape)
        if self.kind == "constant":
            return self.amplitude * (b - a)
        if self.kind == "power":
            g = self.gamma
            return self.amplitude * (_power_mass(a, b, g) + _power_mass(1.0 - b, 1.0 - a, g))
        return np.vectorize(self._quad_mass, otypes=[float])(a, b)

    def _quad_mass(self, a: float, b: float) -> float:
        if a == 0.0 and not self.integrable_left:
            return np.inf
        if b == 1.0 and not self.integrable_right:
            return np.inf
        val, _ = integrate.quad(lambda x: float(self.V(x)), a, b, limit=200)
        return val

    def inv_V_bound(self, y: float) -> float:
        """(1/y^2) int_0^y [1/V(x) + 1/V(1-x)] dx."""
        f = lambda x: 1.0 / float(self.V(x)) + 1.0 / float(self.V(1.0 - x))
        val, _ = integrate.quad(f, 0.0, y, limit=200)
        return val / y**2


def _power_mass(a, b, g):
    # int_a^b x^-g dx with a >= 0
    with np.errstate(divide="ignore", invalid="ignore"):
        if g == 1.0:
            out = np.log(b) - np.log(a)
        else:
            out = (b ** (1.0 - g) - a ** (1.0 - g)) / (1.0 - g)
    diverges = (a == 0.0) & (g >= 1.0) & (b > 0.0)
    out = np.where(diverges, np.inf, out)
    return np.where(b <= a, 0.0, out)
