"""Energy, boundary-trace, contraction and initial-continuity checks on solver output."""

from __future__ import annotations

import numpy as np

from relaxlab.diagnostics.residual import History
from relaxlab.fv_solver import Field
from relaxlab.model.entropy import BOUNDARY, linear_pair, quadratic_boundary_pair, regularized_boundary_pair
from relaxlab.model.flux import CONCAVE, CONVEX
from relaxlab.model.scenario import Scenario
from relaxlab.report import INCONCLUSIVE, INFO, DiagnosticsReport

ENERGY_RATIO_TOL = 1.5
TRACE_FINAL_TOL = 0.02
TRACE_MONOTONE_TOL = 1e-3
OTTO_SLACK = 0.02
N_BANDS = 8


# ---------------------------------------------------------------- energy bound

def energy_bound(field: Field, scenario: Scenario) -> float:
    """Discrete iint V (u - rho)^2 over finite-V cells.

    Pinned cells contribute 0 by convention (u equals the cell average of rho
    there). Each stored interval [t_n, t_{n+1}] uses u^{n+1} and rho at the
    midpoint, matching the solver's relaxation substep.
    """
    hist = History.of(field, scenario)
    err2 = (hist.U[1:] - hist.rho_mid) ** 2
    return float(hist.dt @ (err2 @ hist.V_fin) * hist.dx)


def energy_bound_check(values, scenario: Scenario, labels=None, tol: float = ENERGY_RATIO_TOL) -> DiagnosticsReport:
    """Refinement stability of a sequence of energy_bound values (coarse to fine)."""
    values = [float(v) for v in values]
    labels = labels or [str(i) for i in range(len(values))]
    report = DiagnosticsReport(regime=scenario.relax.regime)
    info = INFO if scenario.relax.integrable else None
    for (a, la), (b, lb) in zip(zip(values, labels), zip(values[1:], labels[1:])):
        if a == 0.0 and b == 0.0:
            ratio = 1.0
        elif min(a, b) <= 0.0:
            ratio = np.inf
        else:
            ratio = max(a / b, b / a)
        report.add(f"energy-refinement[{la}->{lb}]", ratio <= tol, ratio, tol, "energy-bound",
                   note=f"E={a:.6g} -> {b:.6g}" + (" (integrable regime: informational)" if info else ""),
                   status=info)
    return report


# ------------------------------------------------------------- boundary traces

def _window_weights(ts, window):
    s, t = window
    lo, hi = ts[:-1], ts[1:]
    w = np.clip(np.minimum(hi, t) - np.maximum(lo, s), 0.0, None)
    return w


def _bands(field: Field):
    """Cell indices of the first N_BANDS off-boundary cells on each side."""
    pinned = field.grid.pinned
    n = field.grid.n_cells
    i0 = 1 if pinned[0] else 0
    i1 = n - 2 if pinned[-1] else n - 1
    return np.arange(i0, i0 + N_BANDS), np.arange(i1, i1 - N_BANDS, -1)


def boundary_trace(field: Field, scenario: Scenario, pairs=None, window=None) -> DiagnosticsReport:
    """Windowed traces A_q(x_j) of entropy fluxes on the cell bands next to each boundary.

    Non-integrable sides: A_q(x_j)/(t-s) must approach q(alpha) (q(beta)) monotonically
    towards the boundary, ending within TRACE_FINAL_TOL. Integrable sides: the boundary
    pairs must satisfy A_Q(., alpha) <= slack on the left and A_Q(., beta) >= -slack on the
    right at the band nearest the boundary.
    """
    hist = History.of(field, scenario)
    T = hist.ts[-1]
    window = window or (0.5 * T, T)
    s, t = window
    if not (0 <= s < t <= T + 1e-12):
        raise ValueError(f"window {window} must lie inside [0, {T:g}]")
    w = _window_weights(hist.ts, window)
    length = w.sum()
    Un = hist.U[1:]
    relax = scenario.relax
    flux = scenario.flux
    report = DiagnosticsReport(regime=relax.regime)
    left, right = _bands(field)
    b = scenario.boundary

    if pairs is None:
        pairs = _default_pairs(scenario)
    lax = [p for p in pairs if p.kind != BOUNDARY]
    bnd = [p for p in pairs if p.kind == BOUNDARY]

    for side, cells, integrable, data, data_mid in (
        ("left", left, relax.integrable_left, b.alpha, hist.alpha_mid),
        ("right", right, relax.integrable_right, b.beta, hist.beta_mid),
    ):
        ubar = (w @ Un[:, cells]) / length
        target = float(np.sum(w * data_mid) / length)
        report.add(f"trace-value[{side}]", True, ubar[0], target, "boundary-trace", status=INFO,
                   note="time-averaged band values " + " ".join(f"{v:.4f}" for v in ubar))
        if not integrable:
            if not b.constant:
                report.add(f"trace[{side}]", False, np.nan, TRACE_FINAL_TOL, "boundary-trace-lax",
                           status=INCONCLUSIVE, note="boundary data not constant; the trace check needs constant data")
                continue
            quantities = []
            if flux.convexity_tag in (CONVEX, CONCAVE):
                quantities.append(("u", lambda u: u))
            quantities += [(p.name, p.q) for p in lax]
            for name, q in quantities:
                A = (w @ q(Un[:, cells])) / length
                dev = np.abs(A - float(q(np.asarray(target))))
                mono = bool(np.all(dev[:-1] <= dev[1:] + TRACE_MONOTONE_TOL))
                ok = mono and dev[0] <= TRACE_FINAL_TOL
                report.add(f"trace[{side}][{name}]", ok, dev[0], TRACE_FINAL_TOL,
                           "boundary-trace-convex" if name == "u" else "boundary-trace-lax",
                           note=("monotone" if mono else "not monotone") + " over bands; deviations "
                           + " ".join(f"{d:.4f}" for d in dev))
        else:
            active = w > 0
            gap = float(np.min(np.abs(Un[active, cells[0]] - data_mid[active])))
            report.add(f"trace-gap[{side}]", True, gap, 0.0, "boundary-trace", status=INFO,
                       note="smallest |u - data| at the band nearest the boundary over the window")
            sign = 1.0 if side == "left" else -1.0
            for p in bnd:
                Q = p.q
                vals = np.array([(w * Q(Un[:, c], data_mid)).sum() / length for c in cells])
                ok = sign * vals[0] <= OTTO_SLACK
                report.add(f"otto[{side}][{p.name}]", ok, vals[0], sign * OTTO_SLACK, "boundary-inequality-otto",
                           note="band values " + " ".join(f"{v:.4g}" for v in vals))
    report.extend(bd_average(field, scenario))
    return report


def _default_pairs(scenario: Scenario):
    pairs = [linear_pair(scenario.flux)]
    if scenario.relax.integrable_left or scenario.relax.integrable_right:
        pairs += [regularized_boundary_pair(scenario.flux, 0.0, e) for e in (0.05, 0.01)]
        pairs.append(quadratic_boundary_pair(scenario.flux))
    return pairs


def bd_average(field: Field, scenario: Scenario, ys=None) -> DiagnosticsReport:
    """(1/y) int_0^T int_0^y |u - alpha| over shrinking y (and the mirror at x = 1)."""
    hist = History.of(field, scenario)
    dx = hist.dx
    if ys is None:
        ys = [2.0**-j for j in range(2, 12) if 2.0**-j >= 4 * dx]
    Un = hist.U[1:]
    x = hist.x
    report = DiagnosticsReport(regime=scenario.relax.regime)
    for side, integrable, data in (("left", scenario.relax.integrable_left, hist.alpha_mid),
                                   ("right", scenario.relax.integrable_right, hist.beta_mid)):
        vals = []
        for y in ys:
            mask = x < y if side == "left" else x > 1 - y
            dev = np.abs(Un[:, mask] - data[:, None]).sum(axis=1) * dx / y
            vals.append(float(hist.dt @ dev))
        vals = np.asarray(vals)
        ok = bool(np.all(vals[1:] <= vals[:-1] + 2 * dx * hist.ts[-1]))
        report.add(f"bd-average[{side}]", ok, vals[-1] if len(vals) else 0.0, vals[0] if len(vals) else 0.0,
                   "boundary-space-time-average", status=INFO if integrable else None,
                   note="y-sequence " + " ".join(f"{v:.4g}" for v in vals))
    return report


# ------------------------------------------------------------------ contraction

def l1_distance(u, v, dx: float) -> float:
    return float(np.abs(np.asarray(u) - np.asarray(v)).sum() * dx)


def contraction_check(field_u: Field, field_v: Field, slack_cells: float = 10.0) -> DiagnosticsReport:
    """sum |u - v| dx at every shared output time against the initial distance + 10 dx."""
    if field_u.grid.n_cells != field_v.grid.n_cells or not np.allclose(field_u.grid.x, field_v.grid.x):
        raise ValueError("contraction check needs both fields on the same grid")
    tu, tv = field_u.times(), field_v.times()
    if len(tu) != len(tv) or not np.allclose(tu, tv):
        raise ValueError("contraction check needs both fields stored at the same times")
    dx = field_u.dx
    slack = slack_cells * dx
    d = np.array([l1_distance(a, b, dx) for a, b in zip(field_u.history_u, field_v.history_u)])
    report = DiagnosticsReport()
    report.add("l1-contraction", bool(np.all(d <= d[0] + slack)), float(d.max() - d[0]), slack, "l1-contraction",
               note="distances " + " ".join(f"{x:.4g}" for x in d))
    report.add("l1-nonincreasing", bool(np.all(np.diff(d) <= slack)), float(np.max(np.diff(d), initial=0.0)),
               slack, "l1-contraction")
    return report


# --------------------------------------------------------- initial continuity

def initial_continuity(field: Field, scenario: Scenario, times=None) -> DiagnosticsReport:
    """int |u(t) - u0| along early snapshots must shrink as t decreases (slack 2 dx)."""
    ts = field.times()
    u0 = field.grid.cell_average(scenario.u0)
    if times is None:
        times = sorted(t for t in ts if t > 0)
    times = sorted(times, reverse=True)
    dx = field.dx
    d = np.array([l1_distance(field.at(t), u0, dx) for t in times])
    slack = 2 * dx
    # along decreasing t the distance must not grow beyond the slack
    ok = bool(np.all(d[1:] <= d[:-1] + slack))
    report = DiagnosticsReport(regime=scenario.relax.regime)
    report.add("initial-l1-continuity", ok, float(d[-1]) if len(d) else 0.0, slack, "initial-condition-l1",
               note="t=" + ",".join(f"{t:g}" for t in times) + " -> " + " ".join(f"{x:.4g}" for x in d))
    return report
