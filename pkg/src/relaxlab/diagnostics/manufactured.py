"""Fields built from formulas rather than solvers, for oracle tests of the diagnostics."""

from __future__ import annotations

import numpy as np

from relaxlab.fv_solver import Field, Grid
from relaxlab.model.flux import quadratic_traffic
from relaxlab.model.functions import Step
from relaxlab.model.relaxation import RelaxationProfile
from relaxlab.model.scenario import Scenario, make_scenario, riemann_scenario
from relaxlab.model.special import c_gamma


def field_from_function(fn, scenario: Scenario, n_cells: int, times) -> Field:
    """Cell averages of fn(t, x) at each time, stored as a history."""
    grid = Grid.uniform(n_cells, scenario)
    pts, w = grid.gauss_points()
    fld = Field(grid, np.zeros(n_cells), 0.0, scenario_name=f"manufactured:{scenario.name}")
    times = np.asarray(sorted(times), dtype=float)
    for t in times:
        fld.u = np.asarray(fn(t, pts), dtype=float) * np.ones_like(pts) @ w
        fld.t = float(t)
        fld.snapshot()
    fld.dts = list(np.diff(times))
    return fld


def glued_riemann_field(left: float, right: float, n_cells: int, T: float, steps: int, at: float = 0.5):
    """The Riemann data frozen in time (no fan), with its V = 0 scenario."""
    s = riemann_scenario(left, right, T, at=at)
    step = Step(left, right, at)
    return field_from_function(lambda t, x: step(x), s, n_cells, np.linspace(0.0, T, steps + 1)), s


def constant_field(scenario: Scenario, value: float, n_cells: int, times) -> Field:
    return field_from_function(lambda t, x: np.full_like(np.asarray(x, dtype=float), value), scenario, n_cells, times)


def smooth_manufactured(n_cells: int, T: float = 0.5, steps: int | None = None, gamma: float = 2.0,
                        amp: float = 0.1):
    """u = 1/2 + amp sin(2 pi x) e^-t solves the traffic balance law with a matching target.

    The target is rho = u + (u_t + J(u)_x)/V for the canonical power-law V, so u is
    an exact smooth solution and every entropy residual is zero up to discretization.
    """
    J = quadratic_traffic()
    c = c_gamma(gamma)
    relax = RelaxationProfile.power_law(gamma, c / gamma)
    u = lambda t, x: 0.5 + amp * np.sin(2 * np.pi * np.asarray(x)) * np.exp(-np.asarray(t))

    def rho(t, x):
        x = np.asarray(x, dtype=float)
        ut = -amp * np.sin(2 * np.pi * x) * np.exp(-np.asarray(t))
        ux = 2 * np.pi * amp * np.cos(2 * np.pi * x) * np.exp(-np.asarray(t))
        with np.errstate(divide="ignore", invalid="ignore"):
            r = u(t, x) + (ut + J.dJ(u(t, x)) * ux) / relax.V(x)
        return np.where(np.isfinite(r), r, 0.5)

    s = make_scenario(J, relax, 0.5, 0.5, rho, lambda x: u(0.0, x), T, name="smooth-manufactured",
                      rho_bounds=(0.3, 0.7))
    steps = steps or n_cells
    return field_from_function(u, s, n_cells, np.linspace(0.0, T, steps + 1)), s
