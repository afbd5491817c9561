"""Flux functions J(u) and their monotone-piece structure."""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np

ArrayFn = Callable[[np.ndarray], np.ndarray]

CONVEX = "convex"
CONCAVE = "concave"
NEITHER = "neither"


@dataclass(frozen=True)
class FluxModel:
    """A C^2 flux with its derivatives.

    ``critical_points`` must list every real zero of ``dJ``; the Godunov and
    Engquist-Osher fluxes rely on ``J`` being monotone between them.
    """

    name: str
    J: ArrayFn
    dJ: ArrayFn
    d2J: ArrayFn
    critical_points: tuple[float, ...] = ()
    convexity_tag: str = NEITHER
    # bound on |J'''| used by the finite-difference derivative check
    third_derivative_bound: float = 0.0
    params: dict = field(default_factory=dict, compare=False)

    def __call__(self, u):
        return self.J(np.asarray(u, dtype=float))

    def lipschitz_on(self, lo: float, hi: float) -> float:
        """sup |J'| on [lo, hi]; exact for fluxes whose J' is monotone between critical points of J''."""
        pts = [lo, hi]
        pts += [c for c in self._dJ_extrema() if lo < c < hi]
        vals = np.abs(self.dJ(np.asarray(pts, dtype=float)))
        grid = np.linspace(lo, hi, 257)
        return float(max(vals.max(), np.abs(self.dJ(grid)).max()))

    def lipschitz_bound(self, r: float) -> float:
        """M = sup{|J'(u)| : |u| <= r}."""
        return self.lipschitz_on(-abs(r), abs(r))

    def _dJ_extrema(self) -> tuple[float, ...]:
        return tuple(self.params.get("dJ_extrema", ()))

    def extrema_on(self, lo, hi):
        """Min and max of J over [lo, hi] (elementwise for arrays)."""
        lo = np.asarray(lo, dtype=float)
        hi = np.asarray(hi, dtype=float)
        Jlo, Jhi = self.J(lo), self.J(hi)
        jmin = np.minimum(Jlo, Jhi)
        jmax = np.maximum(Jlo, Jhi)
        for c in self.critical_points:
            inside = (lo < c) & (c < hi)
            Jc = float(self.J(np.asarray(c)))
            jmin = np.where(inside, np.minimum(jmin, Jc), jmin)
            jmax = np.where(inside, np.maximum(jmax, Jc), jmax)
        return jmin, jmax

    def increasing_part(self, u):
        """J_plus(u) = int_0^u max(J'(s), 0) ds, exact from the monotone pieces."""
        u = np.asarray(u, dtype=float)
        lo = np.minimum(u, 0.0)
        hi = np.maximum(u, 0.0)
        nodes = [lo] + [np.clip(c, lo, hi) for c in sorted(self.critical_points)] + [hi]
        total = np.zeros_like(u)
        for a, b in zip(nodes[:-1], nodes[1:]):
            total += np.maximum(self.J(b) - self.J(a), 0.0)
        return np.where(u >= 0.0, total, -total)


def _poly_flux(name, coeffs, tag, **params) -> FluxModel:
    p = np.polynomial.Polynomial(coeffs)
    dp = p.deriv()
    d2p = dp.deriv()
    d3 = dp.deriv(2)
    crit = tuple(float(r.real) for r in dp.roots() if abs(r.imag) < 1e-12) if dp.degree() > 0 else ()
    ext = tuple(float(r.real) for r in d2p.roots() if abs(r.imag) < 1e-12) if d2p.degree() > 0 else ()
    d3_bound = float(np.max(np.abs(d3(np.linspace(-4, 4, 81))))) if p.degree() >= 3 else 0.0
    return FluxModel(
        name=name,
        J=lambda u: p(np.asarray(u, dtype=float)),
        dJ=lambda u: dp(np.asarray(u, dtype=float)),
        d2J=lambda u: d2p(np.asarray(u, dtype=float)),
        critical_points=tuple(sorted(crit)),
        convexity_tag=tag,
        third_derivative_bound=d3_bound,
        params={"coeffs": tuple(coeffs), "dJ_extrema": ext, **params},
    )


def quadratic_traffic(scale: float = 1.0) -> FluxModel:
    """J(u) = scale * u(1-u); concave for positive scale."""
    if scale <= 0:
        raise ValueError("traffic flux scale must be positive")
    return _poly_flux("quadratic_traffic", (0.0, scale, -scale), CONCAVE, scale=scale)


def burgers() -> FluxModel:
    """J(u) = u^2 / 2."""
    return _poly_flux("burgers", (0.0, 0.0, 0.5), CONVEX)


def linear_advection(speed: float = 1.0) -> FluxModel:
    return _poly_flux("linear_advection", (0.0, speed), NEITHER, speed=speed)


def cubic() -> FluxModel:
    """J(u) = u^3 - u; neither convex nor concave."""
    return _poly_flux("cubic", (0.0, -1.0, 0.0, 1.0), NEITHER)


BUILTIN_FLUXES = {
    "quadratic_traffic": quadratic_traffic,
    "burgers": burgers,
    "linear_advection": linear_advection,
    "cubic": cubic,
}


def flux_from_name(name: str, **kwargs) -> FluxModel:
    try:
        factory = BUILTIN_FLUXES[name]
    except KeyError:
        raise ValueError(f"unknown flux {name!r}; choose from {sorted(BUILTIN_FLUXES)}") from None
    return factory(**kwargs)
