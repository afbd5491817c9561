"""Empirical checks of the standing hypotheses on a scenario."""

from __future__ import annotations

import numpy as np
from scipy import integrate

from relaxlab.model.scenario import Scenario
from relaxlab.report import INFO, DiagnosticsReport

DYADIC = tuple(2.0**-j for j in range(1, 21))


def _flux_check(s: Scenario, report: DiagnosticsReport) -> None:
    J, dJ = s.flux.J, s.flux.dJ
    u = np.linspace(-2.0, 2.0, 401)
    h = 1e-3
    err = np.abs((J(u + h) - J(u - h)) / (2 * h) - dJ(u))
    # truncation |J'''| h^2 / 6 plus cancellation in the difference quotient
    tol = s.flux.third_derivative_bound * h**2 / 6 + 1e-13 * (1 + np.abs(J(u)).max()) / h
    report.add("flux-derivative", err.max() <= tol, err.max(), tol, "flux-regularity")


def _profile_checks(s: Scenario, report: DiagnosticsReport) -> None:
    V = s.relax.V
    x = np.linspace(1e-3, 1 - 1e-3, 999)
    vmin = float(np.min(V(x)))
    report.add("V-positive", vmin > 0, vmin, 0.0, "relaxation-profile",
               note="" if vmin > 0 else "non-conforming profile (testing mode)")
    y = np.array([2.0**-j for j in range(4, 41)])
    left, right = V(y), V(1 - y)
    diverges = []
    for side in (left, right):
        inc = bool(np.all(np.diff(side) > 0))
        diverges.append(inc and side[-1] > 2 * side[0] and np.isfinite(side[-1]) or np.isinf(side[-1]))
    ok = all(diverges)
    report.add("V-boundary-divergence", ok, float(min(left[-1], right[-1])), float(max(left[0], right[0])),
               "relaxation-profile", note="" if ok else "V must blow up at both boundaries")
    # integrability flags must agree with the mass of the boundary cells
    masses = np.array([s.relax.cell_mass(0.0, yy) for yy in (0.25, 2.0**-10)])
    masses_r = np.array([s.relax.cell_mass(1.0 - yy, 1.0) for yy in (0.25, 2.0**-10)])
    flag_ok = (np.all(np.isinf(masses)) != s.relax.integrable_left) and (
        np.all(np.isinf(masses_r)) != s.relax.integrable_right
    )
    report.add("integrability-flags", flag_ok, float(masses[-1]), 0.0, "integrability-dichotomy",
               note=f"left {'integrable' if s.relax.integrable_left else 'divergent'}, "
                    f"right {'integrable' if s.relax.integrable_right else 'divergent'}")


def _uniqueness_condition(s: Scenario, report: DiagnosticsReport) -> None:
    if s.relax.kind == "zero":
        report.add("inverse-V-bound", False, np.inf, np.inf, "uniqueness-condition", note="V = 0")
        return
    vals = np.array([s.relax.inv_V_bound(y) for y in DYADIC])
    ratios = vals[-5:] / vals[-6:-1]
    bounded = bool(np.all(ratios <= 1.05))
    # only the non-integrable theory needs this condition
    status = INFO if (s.relax.integrable and not bounded) else None
    report.add("inverse-V-bound", bounded, float(vals[-1]), 1.05, "uniqueness-condition",
               note=f"max successive ratio {ratios.max():.3g} over the finest dyadic levels",
               status=status)


def _compatibility(s: Scenario, report: DiagnosticsReport) -> None:
    b = s.boundary
    tn, tw = np.polynomial.legendre.leggauss(8)
    t = 0.5 * s.T * (tn + 1)
    w = 0.5 * s.T * tw
    V = s.relax.V

    def layer(power, side, y):
        total = 0.0
        for ti, wi in zip(t, w):
            target = float(b.alpha(ti)) if side == "left" else float(b.beta(ti))
            lo, hi = (0.0, y) if side == "left" else (1.0 - y, 1.0)
            f = lambda x: float(V(x)) * abs(float(b.rho(ti, x)) - target) ** power
            val, _ = integrate.quad(f, lo, hi, limit=200)
            total += wi * val
        return total

    ys = DYADIC[:12]
    for power, name, anchor in ((2, "compatibility-l2", "compatibility-l2"), (1, "compatibility-l1", "compatibility-l1")):
        worst = 0.0
        ok = True
        for side, integrable in (("left", s.relax.integrable_left), ("right", s.relax.integrable_right)):
            seq = np.array([layer(power, side, y) for y in ys])
            vanishing = seq[-1] <= max(1e-2 * seq[0], 1e-10) and np.all(np.diff(seq) <= 1e-12)
            worst = max(worst, float(seq[-1]))
            if not integrable:
                ok &= bool(vanishing)
            else:
                ok &= bool(np.all(np.isfinite(seq)))
        report.add(name, ok, worst, 1e-2, anchor)


def validate_assumptions(s: Scenario) -> DiagnosticsReport:
    """Report which relaxation regime holds and whether the hypotheses hold empirically."""
    report = DiagnosticsReport(regime=s.relax.regime)
    _flux_check(s, report)
    _profile_checks(s, report)
    ok = s.boundary.bounds_hold(s.T)
    report.add("data-bounds", ok, 0.0, 0.0, "bounded-data")
    _uniqueness_condition(s, report)
    if s.relax.kind in ("zero", "constant"):
        report.add("compatibility-l2", True, 0.0, 0.0, "compatibility-l2", status=INFO,
                   note="bounded V: compatibility is automatic")
    else:
        _compatibility(s, report)
    return report
