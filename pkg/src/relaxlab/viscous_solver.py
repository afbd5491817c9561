"""Vanishing-viscosity route: u_t + J(u)_x + V (u - rho) = eps u_xx with Dirichlet data.

Convection is explicit (Godunov flux), diffusion and relaxation are implicit,
so each step is one tridiagonal solve. The data are mollified first so the
parabolic problem sees smooth, boundary-compatible u0 and rho.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate
from scipy.linalg import solve_banded

from relaxlab.fv_solver import GODUNOV, Field, Grid, SolverError, admissible_dt, numerical_flux
from relaxlab.model.scenario import Scenario

# trapezoid nodes for the Gaussian convolution; the kernel is cut at 6 widths
_Z = np.linspace(-6.0, 6.0, 801)
_KZ = np.exp(-0.5 * _Z**2)
_KZ /= _KZ.sum()


def smoothing_width(eps: float) -> float:
    """Gaussian width h = sqrt(eps)/2, capped so the kernel only reflects once."""
    return min(0.5 * math.sqrt(eps), 1.0 / 6.0)


def _reflect(f, x, a, b):
    """Odd extension of f about the points (0, a) and (1, b)."""
    x = np.asarray(x, dtype=float)
    inner = np.clip(x, 0.0, 1.0)
    left = np.clip(-x, 0.0, 1.0)
    right = np.clip(2.0 - x, 0.0, 1.0)
    return np.where(x < 0, 2 * a - f(left), np.where(x > 1, 2 * b - f(right), f(inner)))


def _smooth(f, x, a, b, h, lo, hi):
    x = np.asarray(x, dtype=float)
    shifted = x[..., None] + h * _Z
    s = np.sum(_reflect(f, shifted, a, b) * _KZ, axis=-1)
    # boundary values are exact by symmetry up to rounding; correct the residue
    s0 = np.sum(_reflect(f, h * _Z, a, b) * _KZ)
    s1 = np.sum(_reflect(f, 1.0 + h * _Z, a, b) * _KZ)
    s = s + (a - s0) * (1.0 - x) + (b - s1) * x
    return np.clip(s, lo, hi)


@dataclass(frozen=True)
class MollifiedInitial:
    base: object
    alpha0: float
    beta0: float
    h: float
    bounds: tuple[float, float]

    def __call__(self, x):
        return _smooth(self.base, x, self.alpha0, self.beta0, self.h, *self.bounds)


@dataclass(frozen=True)
class MollifiedTarget:
    """Spatially smoothed rho(t, .) matching alpha(t), beta(t) at the endpoints."""

    scenario: Scenario
    h: float

    def __call__(self, t, x):
        b = self.scenario.boundary
        t = np.asarray(t, dtype=float)
        x = np.asarray(x, dtype=float)
        if t.ndim == 0:
            return self._at(float(t), x)
        tt, xx = np.broadcast_arrays(t, x)
        out = np.empty(tt.shape)
        for tv in np.unique(tt):
            m = tt == tv
            out[m] = self._at(float(tv), xx[m])
        return out

    def _at(self, t, x):
        b = self.scenario.boundary
        f = lambda y: np.asarray(b.rho(t, y), dtype=float) * np.ones_like(y)
        return _smooth(f, x, float(b.alpha(t)), float(b.beta(t)), self.h, *b.rho_bounds)


def mollify_data(scenario: Scenario, eps: float):
    """Smooth u0 and rho with a reflected Gaussian of width ``smoothing_width(eps)``.

    The returned u0_eps matches alpha(0), beta(0) at the endpoints and rho_eps
    matches alpha(t), beta(t); both are clipped to the range of the data so
    sup bounds are inherited.
    """
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps}")
    h = smoothing_width(eps)
    b = scenario.boundary
    a0, b0 = float(b.alpha(0.0)), float(b.beta(0.0))
    lo = min(scenario.u0_bounds[0], a0, b0)
    hi = max(scenario.u0_bounds[1], a0, b0)
    u0 = lambda y: np.asarray(scenario.u0(y), dtype=float) * np.ones_like(y)
    return MollifiedInitial(u0, a0, b0, h, (lo, hi)), MollifiedTarget(scenario, h)


def h1_norm(fn, n: int = 4001) -> float:
    """Discrete H^1(0, 1) norm of a function of x sampled on n points."""
    x = np.linspace(0.0, 1.0, n)
    v = np.asarray(fn(x), dtype=float)
    dv = np.diff(v) / np.diff(x)
    return float(np.sqrt(integrate.trapezoid(v**2, x) + np.sum(dv**2) * (x[1] - x[0])))


@dataclass
class ViscousRun:
    epsilon: float
    u0_eps: MollifiedInitial
    rho_eps: MollifiedTarget
    field: Field
    scenario: Scenario
    # rows (t, eps*|u_x|^2, |u - rho_eps|^2_nu, |u - rho|^2_nu)
    energy_log: list = field(default_factory=list)
    h1_norms: dict = field(default_factory=dict)
    pinned_bound: float = 0.0

    def energy_table(self) -> np.ndarray:
        return np.asarray(self.energy_log, dtype=float)


def _side_values(scenario: Scenario, t: float) -> tuple[float, float]:
    return float(scenario.boundary.alpha(t)), float(scenario.boundary.beta(t))


def _energies(u, a, b, grid: Grid, eps, rho_eps_bar, rho_bar):
    dx = grid.dx
    pinned = grid.pinned
    grad = np.sum(np.diff(u) ** 2) / dx
    if not pinned[0]:
        grad += (u[0] - a) ** 2 / (0.5 * dx)
    if not pinned[-1]:
        grad += (u[-1] - b) ** 2 / (0.5 * dx)
    Vf = np.where(pinned, 0.0, grid.V_bar)
    return eps * grad, float(np.sum(Vf * (u - rho_eps_bar) ** 2) * dx), float(np.sum(Vf * (u - rho_bar) ** 2) * dx)


def _pinned_bound(scenario: Scenario, grid: Grid) -> float:
    """T * int over pinned cells of V (alpha - rho)^2 (resp. beta), time-sampled."""
    total = 0.0
    b = scenario.boundary
    ts = np.linspace(0.0, scenario.T, 9)
    for i in np.flatnonzero(grid.pinned):
        lo, hi = grid.edges[i], grid.edges[i + 1]
        vals = []
        for t in ts:
            target = float(b.alpha(t)) if i < grid.n_cells // 2 else float(b.beta(t))
            f = lambda x: float(scenario.relax.V(x)) * (target - float(b.rho(t, x))) ** 2
            vals.append(integrate.quad(f, lo, hi, limit=200)[0])
        total += float(integrate.trapezoid(vals, ts))
    return total


def viscous_solve(
    scenario: Scenario,
    eps: float,
    n_cells: int,
    output_times=None,
    dense: bool = False,
    cfl: float = 0.5,
) -> ViscousRun:
    """IMEX march of the viscous problem; snapshots land exactly on output times."""
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps}")
    if n_cells < 8:
        raise ValueError("n_cells must be >= 8")
    u0_eps, rho_eps = mollify_data(scenario, eps)
    grid = Grid.uniform(n_cells, scenario)
    n, dx = n_cells, grid.dx
    pinned = grid.pinned
    left_pin = pinned & (np.arange(n) < n // 2)
    right_pin = pinned & ~left_pin
    Vf = np.where(pinned, 0.0, grid.V_bar)

    u = grid.cell_average(u0_eps)
    a, b = _side_values(scenario, 0.0)
    u[left_pin], u[right_pin] = a, b
    fld = Field(grid, u.copy(), 0.0, scenario_name=scenario.name)
    fld.snapshot()
    run = ViscousRun(eps, u0_eps, rho_eps, fld, scenario)
    run.h1_norms = {t: h1_norm(lambda x, t=t: rho_eps(t, x)) for t in (0.0, scenario.T)}
    run.pinned_bound = _pinned_bound(scenario, grid)
    run.energy_log.append((0.0, *_energies(u, a, b, grid, eps, grid.rho_bar(scenario, 0.0, rho_eps),
                                          grid.rho_bar(scenario, 0.0))))

    # diffusion face coefficients: interior faces 1/dx^2, boundary faces 2/dx^2
    c_face = np.full(n + 1, 1.0 / dx**2)
    c_face[0] = c_face[-1] = 2.0 / dx**2
    outs = sorted(set(float(t) for t in (output_times if output_times is not None else [scenario.T])))
    dt_max = admissible_dt(scenario, grid, cfl)
    t = 0.0
    pending = [s for s in outs if s > 0]
    while pending:
        target = pending[0]
        dt = min(dt_max, target - t)
        if target - (t + dt) < 1e-12 * max(1.0, target):
            dt = target - t
        tm, t_new = t + 0.5 * dt, t + dt
        a_m, b_m = _side_values(scenario, tm)
        ext = np.concatenate(([a_m], u, [b_m]))
        F = numerical_flux(scenario.flux, ext[:-1], ext[1:], GODUNOV)
        u_star = u - (dt / dx) * (F[1:] - F[:-1])

        a_n, b_n = _side_values(scenario, t_new)
        rho_bar = grid.rho_bar(scenario, tm, rho_eps)
        lower = -dt * eps * c_face[1:n]      # coefficient of u_{i-1} in row i (i >= 1)
        upper = -dt * eps * c_face[1:n]      # coefficient of u_{i+1} in row i (i <= n-2)
        diag = 1.0 + dt * Vf + dt * eps * (c_face[:-1] + c_face[1:])
        rhs = u_star + dt * Vf * rho_bar
        rhs[0] += dt * eps * c_face[0] * a_n
        rhs[-1] += dt * eps * c_face[-1] * b_n
        # pinned cells carry the Dirichlet value themselves
        for idx, val in ((np.flatnonzero(left_pin), a_n), (np.flatnonzero(right_pin), b_n)):
            for i in idx:
                diag[i], rhs[i] = 1.0, val
                if i > 0:
                    lower[i - 1] = 0.0
                if i < n - 1:
                    upper[i] = 0.0
        ab = np.zeros((3, n))
        ab[0, 1:] = upper
        ab[1] = diag
        ab[2, :-1] = lower
        assert np.all(diag >= np.abs(np.concatenate(([0.0], lower))) + np.abs(np.concatenate((upper, [0.0])))), \
            "tridiagonal system lost diagonal dominance"
        u = solve_banded((1, 1), ab, rhs)
        t = target if dt == target - t else t_new
        bad = ~np.isfinite(u)
        if bad.any():
            i = int(np.argmax(bad))
            raise SolverError(f"non-finite value in cell {i} (x={grid.x[i]:.6g}) at t={t:.6g}")
        fld.dts.append(dt)
        fld.boundary_flux.append((float(F[0]), float(F[-1])))
        fld.u, fld.t = u, t
        run.energy_log.append((t, *_energies(u, a_n, b_n, grid, eps, rho_bar, grid.rho_bar(scenario, tm))))
        if t >= target:
            pending.pop(0)
            fld.snapshot()
        elif dense:
            fld.snapshot()
    return run


def energy_estimate(run: ViscousRun) -> tuple[float, float]:
    """(eps |u_x|^2_{L2}, |u - rho|^2_{L2(nu)}) integrated over [0, T] by trapezoid.

    Pinned cells are excluded from the nu-norm; their contribution bound is
    ``run.pinned_bound``.
    """
    tab = run.energy_table()
    if len(tab) < 2:
        return 0.0, 0.0
    t = tab[:, 0]
    return float(integrate.trapezoid(tab[:, 1], t)), float(integrate.trapezoid(tab[:, 3], t))


def weak_residual(run: ViscousRun, tests) -> np.ndarray:
    """Weak-form residual of the viscous equation for test functions phi(t, x).

    Each phi must vanish with its x-derivative at x = 0 and x = 1 and is given
    as a tuple (phi, phi_t, phi_x, phi_xx). Returns one residual per test:
    int u(T) phi(T) - int u0_eps phi(0) - iint [u phi_t + J(u) phi_x + eps u phi_xx - V (u - rho_eps) phi].
    Needs a dense history.
    """
    fld, s = run.field, run.scenario
    grid = fld.grid
    ts = fld.times()
    U = fld.history()
    x, dx = grid.x, grid.dx
    finite = ~grid.pinned
    Vf = np.where(grid.pinned, 0.0, grid.V_bar)
    out = []
    for phi, phi_t, phi_x, phi_xx in tests:
        total = np.sum(U[-1] * phi(ts[-1], x)) * dx - np.sum(grid.cell_average(run.u0_eps) * phi(0.0, x)) * dx
        for k in range(1, len(ts)):
            dt = ts[k] - ts[k - 1]
            tm = 0.5 * (ts[k] + ts[k - 1])
            u = U[k]
            rho = grid.rho_bar(s, tm, run.rho_eps)
            integrand = u * phi_t(tm, x) + s.flux.J(u) * phi_x(tm, x) + run.epsilon * u * phi_xx(tm, x)
            integrand -= Vf * (u - rho) * phi(tm, x)
            total -= dt * dx * np.sum(integrand[finite])
        out.append(float(total))
    return np.asarray(out)
