"""Problem statements: boundary data, scenarios and the canonical power-law family."""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass, field, replace

import numpy as np

from relaxlab.model.flux import FluxModel, quadratic_traffic
from relaxlab.model.functions import Constant, as_function, sampled_bounds
from relaxlab.model.relaxation import RelaxationProfile
from relaxlab.model.special import c_gamma, zeta


class ScenarioError(ValueError):
    pass


@dataclass(frozen=True)
class BoundaryData:
    """Boundary densities alpha(t), beta(t) and relaxation target rho(t, x)."""

    alpha: Callable
    beta: Callable
    rho: Callable
    alpha_bounds: tuple[float, float]
    beta_bounds: tuple[float, float]
    rho_bounds: tuple[float, float]
    # rho does not depend on t (lets solvers cache cell averages)
    rho_static: bool = False

    @property
    def constant(self) -> bool:
        return isinstance(self.alpha, Constant) and isinstance(self.beta, Constant)

    def bounds_hold(self, T: float, n: int = 65) -> bool:
        """Sampled check that alpha, beta, rho respect their declared bounds on [0, T]."""
        t = np.linspace(0.0, T, n)
        x = np.linspace(0.0, 1.0, n)
        tt, xx = np.meshgrid(t, x, indexing="ij")
        ok = True
        for vals, (lo, hi) in (
            (self.alpha(t), self.alpha_bounds),
            (self.beta(t), self.beta_bounds),
            (self.rho(tt, xx), self.rho_bounds),
        ):
            vals = np.asarray(vals, dtype=float)
            ok &= bool(np.all(vals >= lo - 1e-12) and np.all(vals <= hi + 1e-12))
        return ok


@dataclass(frozen=True)
class Scenario:
    flux: FluxModel
    relax: RelaxationProfile
    boundary: BoundaryData
    u0: Callable
    T: float
    gamma: float | None = None
    name: str = "scenario"
    u0_bounds: tuple[float, float] = (0.0, 1.0)
    meta: dict = field(default_factory=dict, compare=False)

    def invariant_region(self) -> tuple[float, float]:
        """[m-, m+] spanned by the data bounds; every solver snapshot must stay inside."""
        b = self.boundary
        lows = (self.u0_bounds[0], b.alpha_bounds[0], b.beta_bounds[0], b.rho_bounds[0])
        highs = (self.u0_bounds[1], b.alpha_bounds[1], b.beta_bounds[1], b.rho_bounds[1])
        return float(min(lows)), float(max(highs))

    def data_radius(self) -> float:
        lo, hi = self.invariant_region()
        return max(abs(lo), abs(hi))

    def with_initial(self, u0, name: str | None = None) -> Scenario:
        u0 = as_function(u0)
        return replace(self, u0=u0, u0_bounds=sampled_bounds(u0), name=name or self.name)


def canonical_rho(alpha: Callable, beta: Callable, gamma: float) -> Callable:
    """rho = (alpha (1-x)^g + beta x^g) / (x^g + (1-x)^g)."""

    def rho(t, x):
        t = np.asarray(t, dtype=float)
        x = np.asarray(x, dtype=float)
        a = x**gamma
        b = (1.0 - x) ** gamma
        # convex-combination form: exact when alpha == beta
        return alpha(t) + (beta(t) - alpha(t)) * (a / (a + b))

    return rho


def mean_jump_length(gamma: float) -> float:
    """sum_k k p(k) = zeta(gamma) / zeta(1 + gamma) for p(k) = c k^-(1+gamma)."""
    if not gamma > 1:
        raise ValueError("mean jump length is finite only for gamma > 1")
    return zeta(gamma) / zeta(1.0 + gamma)


def make_canonical_scenario(
    gamma: float,
    alpha,
    beta,
    u0,
    T: float,
    flux: FluxModel | None = None,
    name: str | None = None,
) -> Scenario:
    """Traffic-flux balance law with V = (c/g)[x^-g + (1-x)^-g], c = 1/zeta(1+g), and canonical rho.

    ``alpha``/``beta`` are densities in [0, 1] (numbers or functions of t);
    ``u0`` is a number or a function of x with values in [0, 1].
    """
    if not (isinstance(gamma, (int, float)) and gamma > 0):
        raise ScenarioError(f"gamma must be a positive number, got {gamma!r}")
    if not T > 0:
        raise ScenarioError(f"horizon T must be positive, got {T!r}")
    alpha_fn, beta_fn, u0_fn = as_function(alpha), as_function(beta), as_function(u0)
    ab = sampled_bounds(alpha_fn, 0.0, T)
    bb = sampled_bounds(beta_fn, 0.0, T)
    ub = sampled_bounds(u0_fn)
    for label, (lo, hi) in (("alpha", ab), ("beta", bb), ("u0", ub)):
        if lo < 0.0 or hi > 1.0:
            raise ScenarioError(f"{label} must take values in [0, 1], found range [{lo:g}, {hi:g}]")
    c = c_gamma(gamma)
    relax = RelaxationProfile.power_law(gamma, c / gamma)
    boundary = BoundaryData(
        alpha=alpha_fn,
        beta=beta_fn,
        rho=canonical_rho(alpha_fn, beta_fn, gamma),
        alpha_bounds=ab,
        beta_bounds=bb,
        # rho is a convex combination of alpha and beta
        rho_bounds=(min(ab[0], bb[0]), max(ab[1], bb[1])),
        rho_static=isinstance(alpha_fn, Constant) and isinstance(beta_fn, Constant),
    )
    return Scenario(
        flux=flux or quadratic_traffic(),
        relax=relax,
        boundary=boundary,
        u0=u0_fn,
        T=float(T),
        gamma=float(gamma),
        name=name or f"canonical(gamma={gamma:g})",
        u0_bounds=ub,
        meta={"c_gamma": c},
    )


def make_scenario(
    flux: FluxModel,
    relax: RelaxationProfile,
    alpha,
    beta,
    rho,
    u0,
    T: float,
    name: str = "scenario",
    rho_bounds: tuple[float, float] | None = None,
    rho_static: bool = False,
) -> Scenario:
    """General scenario; ``rho`` is a number or a function of (t, x)."""
    alpha_fn, beta_fn, u0_fn = as_function(alpha), as_function(beta), as_function(u0)
    if callable(rho):
        rho_fn = rho
        if rho_bounds is None:
            t = np.linspace(0.0, T, 33)[:, None]
            x = np.linspace(0.0, 1.0, 1025)[None, :]
            vals = np.asarray(rho_fn(t, x), dtype=float)
            rho_bounds = (float(vals.min()), float(vals.max()))
    else:
        value = float(rho)
        rho_fn = lambda t, x: np.full(np.broadcast(np.asarray(t), np.asarray(x)).shape, value)
        rho_bounds = (value, value)
        rho_static = True
    boundary = BoundaryData(
        alpha_fn, beta_fn, rho_fn, sampled_bounds(alpha_fn, 0.0, T), sampled_bounds(beta_fn, 0.0, T),
        tuple(rho_bounds), rho_static,
    )
    return Scenario(flux, relax, boundary, u0_fn, float(T), name=name, u0_bounds=sampled_bounds(u0_fn))


def riemann_scenario(left: float, right: float, T: float, flux: FluxModel | None = None, at: float = 0.5) -> Scenario:
    """V = 0 testing mode with Riemann data; ghost states equal the far-field states."""
    from relaxlab.model.functions import Step

    return make_scenario(
        flux or quadratic_traffic(),
        RelaxationProfile.zero(),
        left,
        right,
        0.5 * (left + right),
        Step(left, right, at),
        T,
        name=f"riemann({left:g},{right:g})",
    )
