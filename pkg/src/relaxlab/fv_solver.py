"""Monotone finite-volume solver for the relaxation balance law on (0, 1).

Each step is a conservative update with a two-point monotone flux (ghost
states alpha(t), beta(t)) followed by an exact backward-Euler relaxation
substep per cell. Cells whose average relaxation rate is infinite are pinned
to their relaxation target.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from relaxlab.model.flux import FluxModel
from relaxlab.model.scenario import Scenario

GODUNOV = "godunov"
ENGQUIST_OSHER = "engquist_osher"
_GAUSS3 = (np.array([-math.sqrt(0.6), 0.0, math.sqrt(0.6)]), np.array([5.0, 8.0, 5.0]) / 18.0)


class CFLError(ValueError):
    """Raised for a step larger than the admissible CFL step; carries ``admissible_dt``."""

    def __init__(self, dt: float, admissible_dt: float):
        super().__init__(f"dt={dt:.6g} violates the CFL condition; admissible dt <= {admissible_dt:.6g}")
        self.dt = dt
        self.admissible_dt = admissible_dt


class SolverError(RuntimeError):
    pass


def numerical_flux(flux: FluxModel, a, b, scheme: str = GODUNOV):
    """Two-point monotone flux F(a, b).

    Godunov: min of J over [a, b] if a <= b, max over [b, a] otherwise.
    Engquist-Osher: J_plus(a) + J_minus(b) with J = J_plus + J_minus split by sign of J'.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if scheme == GODUNOV:
        jmin, jmax = flux.extrema_on(np.minimum(a, b), np.maximum(a, b))
        return np.where(a <= b, jmin, jmax)
    if scheme == ENGQUIST_OSHER:
        jp_a = flux.increasing_part(a)
        jp_b = flux.increasing_part(b)
        return jp_a + flux.J(b) - jp_b
    raise ValueError(f"unknown scheme {scheme!r}")


def relax_substep(u_star, rho_bar, V_bar, dt: float):
    """Backward-Euler step of du/dt = -V (u - rho) with rho frozen.

    Returns (u* + dt V rho) / (1 + dt V), and rho exactly where V is infinite.
    Written as u* + theta (rho - u*) and clamped, so u* = rho is kept exactly and
    the result never leaves the segment between u* and rho.
    """
    u_star = np.asarray(u_star, dtype=float)
    rho_bar = np.asarray(rho_bar, dtype=float)
    V_bar = np.asarray(V_bar, dtype=float)
    pinned = np.isinf(V_bar)
    Vf = np.where(pinned, 0.0, V_bar)
    theta = dt * Vf / (1.0 + dt * Vf)
    out = np.clip(u_star + theta * (rho_bar - u_star), np.minimum(u_star, rho_bar), np.maximum(u_star, rho_bar))
    return np.where(pinned, rho_bar, out)


def _convex_average(vals, w):
    # a weighted mean lies between the sampled values; clamp away rounding so
    # cell averages never leave the range of the data
    return np.clip(vals @ w, vals.min(axis=-1), vals.max(axis=-1))


@dataclass(frozen=True)
class Grid:
    n_cells: int
    dx: float
    x: np.ndarray
    edges: np.ndarray
    V_bar: np.ndarray

    @classmethod
    def uniform(cls, n_cells: int, scenario: Scenario | None = None) -> Grid:
        dx = 1.0 / n_cells
        edges = np.linspace(0.0, 1.0, n_cells + 1)
        x = (np.arange(n_cells) + 0.5) * dx
        if scenario is None:
            V_bar = np.zeros(n_cells)
        else:
            V_bar = np.asarray(scenario.relax.cell_mass(edges[:-1], edges[1:]), dtype=float) / dx
        return cls(n_cells, dx, x, edges, V_bar)

    @property
    def pinned(self) -> np.ndarray:
        return np.isinf(self.V_bar)

    def gauss_points(self) -> tuple[np.ndarray, np.ndarray]:
        nodes, weights = _GAUSS3
        pts = self.x[:, None] + 0.5 * self.dx * nodes[None, :]
        return pts, weights

    def cell_average(self, fn) -> np.ndarray:
        """3-point Gauss cell averages of a function of x."""
        pts, w = self.gauss_points()
        return _convex_average(np.asarray(fn(pts), dtype=float) * np.ones_like(pts), w)

    def rho_bar(self, scenario: Scenario, t: float, rho=None) -> np.ndarray:
        """Cell averages of rho(t, .) (or of the given ``rho``), cached when rho is static."""
        rho = scenario.boundary.rho if rho is None else rho
        static = scenario.boundary.rho_static
        key = (id(rho), None if static else float(t))
        cache = self._cache()
        if key in cache:
            return cache[key]
        pts, w = self.gauss_points()
        out = _convex_average(np.asarray(rho(t, pts), dtype=float) * np.ones_like(pts), w)
        if static:
            cache[key] = out
        return out

    def _cache(self) -> dict:
        c = self.__dict__.get("_rho_cache")
        if c is None:
            c = {}
            object.__setattr__(self, "_rho_cache", c)
        return c


@dataclass
class Field:
    """Cell averages on a grid, with optional stored history and step records."""

    grid: Grid
    u: np.ndarray
    t: float = 0.0
    history_t: list = field(default_factory=list)
    history_u: list = field(default_factory=list)
    dts: list = field(default_factory=list)
    boundary_flux: list = field(default_factory=list)
    exchange: list = field(default_factory=list)
    interface_flux: list = field(default_factory=list)
    scenario_name: str = ""

    @property
    def dx(self) -> float:
        return self.grid.dx

    @property
    def x(self) -> np.ndarray:
        return self.grid.x

    def snapshot(self) -> None:
        self.history_t.append(self.t)
        self.history_u.append(self.u.copy())

    def times(self) -> np.ndarray:
        return np.asarray(self.history_t)

    def history(self) -> np.ndarray:
        return np.asarray(self.history_u)

    def at(self, t: float) -> np.ndarray:
        """Stored snapshot closest to time t."""
        ts = self.times()
        return self.history_u[int(np.argmin(np.abs(ts - t)))]

    def mass(self) -> float:
        return float(self.u.sum() * self.dx)


def admissible_dt(scenario: Scenario, grid: Grid, cfl: float = 0.5) -> float:
    lo, hi = scenario.invariant_region()
    M = scenario.flux.lipschitz_on(lo, hi)
    return cfl * grid.dx / max(M, 1e-14)


def _hyperbolic(u, t, dt, scenario, grid, scheme):
    b = scenario.boundary
    tm = t + 0.5 * dt
    a_ghost = float(b.alpha(tm))
    b_ghost = float(b.beta(tm))
    ext = np.concatenate(([a_ghost], u, [b_ghost]))
    F = numerical_flux(scenario.flux, ext[:-1], ext[1:], scheme)
    return u - (dt / grid.dx) * (F[1:] - F[:-1]), F


def _relax(u_star, t_mid, dt, scenario, grid):
    rho_bar = grid.rho_bar(scenario, t_mid)
    u_new = relax_substep(u_star, rho_bar, grid.V_bar, dt)
    pinned = grid.pinned
    Vf = np.where(pinned, 0.0, grid.V_bar)
    finite_exchange = float(np.sum(dt * Vf * (rho_bar - u_new)) * grid.dx)
    pinned_exchange = float(np.sum((u_new - u_star)[pinned]) * grid.dx)
    return u_new, finite_exchange, pinned_exchange


def advance(u, t, dt, scenario, grid, scheme=GODUNOV, splitting="godunov"):
    """One split step; returns (u_new, interface_fluxes, finite_exchange, pinned_exchange)."""
    if splitting == "godunov":
        u_star, F = _hyperbolic(u, t, dt, scenario, grid, scheme)
        u_new, ex_f, ex_p = _relax(u_star, t + 0.5 * dt, dt, scenario, grid)
        return u_new, F, ex_f, ex_p
    if splitting == "strang":
        u1, ex_f1, ex_p1 = _relax(u, t + 0.25 * dt, 0.5 * dt, scenario, grid)
        u2, F = _hyperbolic(u1, t, dt, scenario, grid, scheme)
        u3, ex_f2, ex_p2 = _relax(u2, t + 0.75 * dt, 0.5 * dt, scenario, grid)
        return u3, F, ex_f1 + ex_f2, ex_p1 + ex_p2
    raise ValueError(f"unknown splitting {splitting!r}")


def step(field: Field, scenario: Scenario, dt: float, cfl: float = 0.5, scheme: str = GODUNOV,
         splitting: str = "godunov") -> Field:
    """Advance a copy of ``field`` by one step of size ``dt``."""
    limit = admissible_dt(scenario, field.grid, cfl)
    if dt > limit * (1 + 1e-12):
        raise CFLError(dt, limit)
    u_new, F, ex_f, ex_p = advance(field.u, field.t, dt, scenario, field.grid, scheme, splitting)
    out = Field(field.grid, u_new, field.t + dt, list(field.history_t), list(field.history_u),
                field.dts + [dt], field.boundary_flux + [(float(F[0]), float(F[-1]))],
                field.exchange + [(ex_f, ex_p)], list(field.interface_flux), field.scenario_name)
    return out


def initial_field(scenario: Scenario, n_cells: int) -> Field:
    grid = Grid.uniform(n_cells, scenario)
    u0 = grid.cell_average(scenario.u0)
    return Field(grid, u0, 0.0, scenario_name=scenario.name)


def solve(
    scenario: Scenario,
    n_cells: int,
    output_times=None,
    dense: bool = False,
    cfl: float = 0.5,
    scheme: str = GODUNOV,
    splitting: str = "godunov",
    record_fluxes: bool = False,
    u_init: np.ndarray | None = None,
) -> Field:
    """March from t = 0 to the last output time (default ``scenario.T``).

    Steps are shortened to land exactly on output times. With ``dense`` every
    step is stored, which the weak-form diagnostics need.
    """
    if n_cells < 8:
        raise ValueError("n_cells must be >= 8")
    outs = sorted(set(float(t) for t in (output_times if output_times is not None else [scenario.T])))
    if outs and outs[0] < 0:
        raise ValueError("output times must be nonnegative")
    fld = initial_field(scenario, n_cells)
    if u_init is not None:
        fld.u = np.asarray(u_init, dtype=float).copy()
    fld.snapshot()
    dt_max = admissible_dt(scenario, fld.grid, cfl)
    t_end = outs[-1] if outs else scenario.T
    pending = [t for t in outs if t > 0]
    u = fld.u
    t = 0.0
    while pending:
        target = pending[0]
        dt = min(dt_max, target - t)
        if target - (t + dt) < 1e-12 * max(1.0, target):
            dt = target - t
        u, F, ex_f, ex_p = advance(u, t, dt, scenario, fld.grid, scheme, splitting)
        t = target if dt == target - t else t + dt
        bad = ~np.isfinite(u)
        if bad.any():
            i = int(np.argmax(bad))
            raise SolverError(f"non-finite value in cell {i} (x={fld.grid.x[i]:.6g}) at t={t:.6g}")
        fld.dts.append(dt)
        fld.boundary_flux.append((float(F[0]), float(F[-1])))
        fld.exchange.append((ex_f, ex_p))
        if record_fluxes:
            fld.interface_flux.append((t - dt, F.copy()))
        fld.u, fld.t = u, t
        if t >= target:
            pending.pop(0)
            fld.snapshot()
        elif dense:
            fld.snapshot()
    assert abs(fld.t - t_end) < 1e-9 or not outs
    return fld
