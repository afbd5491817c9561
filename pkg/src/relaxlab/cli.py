"""Command-line entry point: ``relaxlab <command> --scenario FILE --out DIR``.

Every command writes ``report.csv`` and ``report.txt`` into the output
directory, also when a check fails. Exit status: 0 when every executed check
passes, 1 when a check fails, 2 for configuration or runtime errors.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from relaxlab import diagnostics as dg
from relaxlab import io
from relaxlab.fv_solver import SolverError, solve
from relaxlab.model.assumptions import validate_assumptions
from relaxlab.model.scenario import ScenarioError, make_canonical_scenario, mean_jump_length
from relaxlab.report import INFO, DiagnosticsReport
from relaxlab.viscous_solver import energy_estimate, viscous_solve

log = logging.getLogger("relaxlab")

COMMANDS = ("solve", "viscous", "particles", "diagnose", "compare", "dichotomy")
EARLY_TIMES = (1e-3, 1e-2, 1e-1)
THREADS_ENV = "RELAXLAB_THREADS"


def _threads() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise io.ConfigError(f"environment variable {THREADS_ENV} must be an integer, got {raw!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scenario", required=True, type=Path, help="INI scenario file")
    common.add_argument("--out", type=Path, default=Path("out"), help="output directory")
    common.add_argument("--cells", type=int, help="grid cells (overrides [run] cells)")
    common.add_argument("--eps", type=float, help="viscosity (overrides [run] eps)")
    common.add_argument("--particles", type=int, help="lattice size N (overrides [run] particles)")
    common.add_argument("--seeds", type=int, help="number of trajectories (overrides [run] seeds)")
    common.add_argument("--seed", type=int, help="base seed (overrides [run] seed)")
    common.add_argument("--times", help="comma-separated output times (overrides [run] times)")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="relaxlab", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("solve", parents=[common], help="finite-volume run")
    sub.add_parser("viscous", parents=[common], help="vanishing-viscosity run")
    pp = sub.add_parser("particles", parents=[common], help="exclusion-process ensemble")
    pp.add_argument("--event-log", type=int, default=0, metavar="K",
                    help="record the first K events of every trajectory in events.csv")
    pd = sub.add_parser("diagnose", parents=[common], help="entropy, energy, trace and continuity checks")
    pd.add_argument("--field", type=Path, help="diagnose this t,x,u CSV instead of a fresh solve")
    sub.add_parser("compare", parents=[common], help="fv vs viscous vs particle densities")
    sub.add_parser("dichotomy", parents=[common], help="boundary traces for gamma = 0.5 and gamma = 2")
    return p


def _config(args):
    cfg = io.load_scenario(args.scenario)
    run = cfg.run
    for flag, attr in (("cells", "cells"), ("eps", "eps"), ("particles", "particles"),
                       ("seeds", "seeds"), ("seed", "seed")):
        v = getattr(args, flag)
        if v is not None:
            setattr(run, attr, v)
    if args.times:
        try:
            run.times = io.parse_times(args.times)
        except ValueError as exc:
            raise io.ConfigError(f"--times: {exc}") from None
    if run.cells < 8:
        raise io.ConfigError("--cells must be >= 8")
    if not run.eps > 0:
        raise io.ConfigError("--eps must be positive")
    if run.seeds < 1 or run.particles < 4:
        raise io.ConfigError("--seeds must be >= 1 and --particles >= 4")
    if any(t > cfg.scenario.T + 1e-12 for t in run.times):
        raise io.ConfigError(f"output times must not exceed T={cfg.scenario.T:g}")
    return cfg


def _times(cfg, extra=()) -> list[float]:
    T = cfg.scenario.T
    return sorted({t for t in (*cfg.run.times, *extra) if 0 <= t <= T} | {T})


def _range_check(report: DiagnosticsReport, label: str, snapshots, lo: float, hi: float) -> None:
    U = np.asarray(snapshots)
    below, above = float(lo - U.min()), float(U.max() - hi)
    worst = max(below, above, 0.0)
    report.add(f"invariant-region[{label}]", worst <= 1e-12, worst, 1e-12, "maximum-principle",
               note=f"range [{U.min():.6g}, {U.max():.6g}] within [{lo:g}, {hi:g}]")


def _mass_balance(report: DiagnosticsReport, field) -> None:
    dx = field.dx
    change = (field.history_u[-1].sum() - field.history_u[0].sum()) * dx
    bflux = sum(dt * (f0 - f1) for dt, (f0, f1) in zip(field.dts, field.boundary_flux))
    exch = sum(a + b for a, b in field.exchange)
    err = abs(change - bflux - exch)
    tol = 1e-10 * max(1, len(field.dts))
    report.add("mass-balance", err <= tol, err, tol, "conservation",
               note="mass change minus boundary fluxes minus relaxation exchange")


# ------------------------------------------------------------------ commands

def cmd_solve(cfg, args, out: Path) -> DiagnosticsReport:
    s = cfg.scenario
    fld = solve(s, cfg.run.cells, _times(cfg), cfl=cfg.run.cfl, record_fluxes=True)
    io.write_field(fld, out / "u.csv")
    io.write_fluxes(fld, out / "fluxes.csv")
    report = DiagnosticsReport(regime=s.relax.regime)
    _range_check(report, "fv", fld.history_u, *s.invariant_region())
    _mass_balance(report, fld)
    return report


def cmd_viscous(cfg, args, out: Path) -> DiagnosticsReport:
    s = cfg.scenario
    run = viscous_solve(s, cfg.run.eps, cfg.run.cells, _times(cfg), cfl=cfg.run.cfl)
    io.write_field(run.field, out / "u.csv")
    io.write_energy(run, out / "energy.csv")
    report = DiagnosticsReport(regime=s.relax.regime)
    _range_check(report, "viscous", run.field.history_u, *s.invariant_region())
    visc, relax = energy_estimate(run)
    ok = np.isfinite(visc) and np.isfinite(relax)
    report.add("viscous-energy", ok, visc, np.inf, "viscous-energy-estimate", status=INFO,
               note=f"int eps|u_x|^2 = {visc:.6g}, int |u - rho|^2_nu = {relax:.6g}, "
                    f"pinned-cell bound {run.pinned_bound:.6g}")
    return report


def _particle_params(cfg):
    s = cfg.scenario
    if cfg.gamma is None or s.meta.get("c_gamma") is None:
        raise io.ConfigError("particle runs need [relaxation] profile = canonical")
    if not cfg.gamma > 1:
        raise io.ConfigError(f"particle runs need gamma > 1, got {cfg.gamma:g}")
    if cfg.alpha is None or cfg.beta is None:
        raise io.ConfigError("particle runs need constant numeric alpha and beta")
    return cfg.gamma, cfg.alpha, cfg.beta


def _flux_note(s, gamma) -> tuple[bool, str]:
    u = np.linspace(0.0, 1.0, 11)
    target = mean_jump_length(gamma) * u * (1 - u)
    ok = bool(np.allclose(s.flux.J(u), target, rtol=1e-9, atol=1e-12))
    note = ("scenario flux equals the particle current m u(1-u)" if ok else
            f"scenario flux differs from the particle current m u(1-u), m={mean_jump_length(gamma):.6g}; "
            "set [flux] scale = jump_mean for a consistent comparison")
    return ok, note


def _particle_ensemble(cfg, times, event_log: int = 0):
    from relaxlab import particles as ps

    gamma, alpha, beta = _particle_params(cfg)
    seeds = [cfg.run.seed + j for j in range(cfg.run.seeds)]
    return ps.run_ensemble(cfg.run.particles, gamma, alpha, beta, cfg.scenario.u0, cfg.scenario.T, times,
                           seeds, workers=_threads(), log_events=event_log), seeds


def _particle_checks(report, runs, seeds) -> None:
    bad = [s for r, s in zip(runs, seeds) if r.final_count - r.initial_count != r.net_inflow]
    report.add("particle-count-balance", not bad, len(bad), 0, "particle-conservation",
               note=f"{len(runs)} trajectories" + (f"; violated for seeds {bad}" if bad else ""))
    occupied = [bool(np.all((r.eta == 0) | (r.eta == 1))) for r in runs]
    report.add("exclusion", all(occupied), occupied.count(False), 0, "particle-exclusion")


def cmd_particles(cfg, args, out: Path) -> DiagnosticsReport:
    from relaxlab import particles as ps

    s = cfg.scenario
    N = cfg.run.particles
    times = _times(cfg) if cfg.run.times else list(np.linspace(0.0, s.T, 11))
    runs, seeds = _particle_ensemble(cfg, times, args.event_log)
    n_cells = min(cfg.run.cells, N)
    dens = ps.empirical_density(runs, n_cells)
    io.write_field(dens, out / "density.csv")
    io.write_table([(sd, r.n_events, r.n_null, *r.entries, *r.exits, r.initial_count, r.final_count)
                    for sd, r in zip(seeds, runs)],
                   ["seed", "events", "null_events", "entries_left", "entries_right", "exits_left",
                    "exits_right", "count_start", "count_end"], out / "trajectories.csv")
    if args.event_log:
        path = out / "events.csv"
        path.unlink(missing_ok=True)
        for sd, r in zip(seeds, runs):
            io.write_events(r.event_log, path, sd)
    report = DiagnosticsReport(regime=s.relax.regime)
    _particle_checks(report, runs, seeds)
    ok, note = _flux_note(s, cfg.gamma)
    fld = solve(s, n_cells, times, cfl=cfg.run.cfl)
    d = dg.l1_distance(dens.history_u[-1], fld.history_u[-1], dens.dx)
    report.add("l1-to-fv[T]", True, d, 0.0, "hydrodynamic-limit", status=INFO, note=note)
    return report


def _fields_for_diagnose(cfg, args):
    s = cfg.scenario
    if args.field:
        if not args.field.exists():
            raise io.ConfigError("field file does not exist", args.field)
        return io.read_field(args.field, s), False
    return solve(s, cfg.run.cells, _times(cfg, EARLY_TIMES), dense=True, cfl=cfg.run.cfl), True


def _as_info(report: DiagnosticsReport, note: str) -> DiagnosticsReport:
    out = DiagnosticsReport(report.regime)
    for c in report.checks:
        out.checks.append(replace(c, status=INFO, note=(c.note + "; " if c.note else "") + note))
    return out


def cmd_diagnose(cfg, args, out: Path) -> DiagnosticsReport:
    s = cfg.scenario
    fld, solved = _fields_for_diagnose(cfg, args)
    testing = s.relax.kind == "zero"
    assumptions = validate_assumptions(s)
    if testing:
        assumptions = _as_info(assumptions, "V = 0 testing mode")
    report = DiagnosticsReport(regime=s.relax.regime).extend(assumptions)
    report.extend(dg.entropy_residual(fld, s))
    if not testing:
        if solved and not s.relax.integrable and cfg.run.cells >= 32:
            ns = [cfg.run.cells // 4, cfg.run.cells // 2, cfg.run.cells]
            vals = [dg.energy_bound(solve(s, n, [s.T], dense=True, cfl=cfg.run.cfl), s) for n in ns[:-1]]
            vals.append(dg.energy_bound(fld, s))
            report.extend(dg.energy_bound_check(vals, s, labels=[str(n) for n in ns]))
        else:
            e = dg.energy_bound(fld, s)
            report.add("energy-bound", np.isfinite(e), e, np.inf, "energy-bound", status=INFO,
                       note="single grid; refinement ratios need a fresh solve")
        report.extend(dg.boundary_trace(fld, s))
    ts = fld.times()
    early = [t for t in EARLY_TIMES if t <= s.T and np.min(np.abs(ts - t)) < 1e-9]
    if len(early) >= 2:
        report.extend(dg.initial_continuity(fld, s, early))
    io.write_field(fld, out / "u.csv", times=_times(cfg))
    return report


def cmd_compare(cfg, args, out: Path) -> DiagnosticsReport:
    from relaxlab import particles as ps

    s = cfg.scenario
    times = _times(cfg)
    n = cfg.run.cells
    fv = solve(s, n, times, cfl=cfg.run.cfl)
    vis = viscous_solve(s, cfg.run.eps, n, times, cfl=cfg.run.cfl).field
    report = DiagnosticsReport(regime=s.relax.regime)
    _range_check(report, "fv", fv.history_u, *s.invariant_region())
    _range_check(report, "viscous", vis.history_u, *s.invariant_region())
    columns = {"fv": [fv.at(t) for t in times], "viscous": [vis.at(t) for t in times]}
    if cfg.gamma is not None and cfg.gamma > 1 and cfg.alpha is not None and cfg.beta is not None:
        if cfg.run.particles < n:
            raise io.ConfigError(f"--particles ({cfg.run.particles}) must be >= --cells ({n}) for block averaging")
        runs, seeds = _particle_ensemble(cfg, times)
        _particle_checks(report, runs, seeds)
        dens = ps.empirical_density(runs, n)
        columns["particles"] = [dens.at(t) for t in times]
        _, note = _flux_note(s, cfg.gamma)
    else:
        note = "particle run skipped: needs a canonical profile with gamma > 1 and constant alpha, beta"
    names = list(columns)
    for i, a in enumerate(names):
        for b in names[i + 1:]:
            for t, ua, ub in zip(times, columns[a], columns[b]):
                d = dg.l1_distance(ua, ub, fv.dx)
                report.add(f"l1[{a},{b}][t={t:g}]", True, d, 0.0, "cross-validation", status=INFO,
                           note=note if "particles" in (a, b) else "")
    if "particles" not in columns:
        report.add("particles", True, 0.0, 0.0, "cross-validation", status=INFO, note=note)
    rows = [(f"{t:.12g}", f"{x:.12g}", *(f"{columns[c][k][j]:.15g}" for c in names))
            for k, t in enumerate(times) for j, x in enumerate(fv.grid.x)]
    io.write_table(rows, ["t", "x", *names], out / "compare.csv")
    return report


def cmd_dichotomy(cfg, args, out: Path) -> DiagnosticsReport:
    s = cfg.scenario
    b = s.boundary
    report = DiagnosticsReport(regime="dichotomy")
    tables = {}
    for gamma in (0.5, 2.0):
        sc = make_canonical_scenario(gamma, b.alpha, b.beta, s.u0, s.T, flux=s.flux)
        fld = solve(sc, cfg.run.cells, _times(cfg), dense=True, cfl=cfg.run.cfl)
        rep = dg.boundary_trace(fld, sc)
        tables[gamma] = rep
        rep.to_csv(out / f"trace_gamma{gamma:g}.csv")
        for c in rep.checks:
            report.checks.append(replace(c, name=f"gamma={gamma:g}:{c.name}"))
    lines = ["boundary-trace dichotomy", f"alpha(0)={float(b.alpha(0.0)):g} beta(0)={float(b.beta(0.0)):g} "
             f"T={s.T:g} cells={cfg.run.cells}", ""]
    for side in ("left", "right"):
        lines.append(f"{side} boundary: time-averaged band values (band 0 is nearest the boundary)")
        for gamma, rep in tables.items():
            c = rep[f"trace-value[{side}]"]
            regime = "integrable" if gamma < 1 else "non-integrable"
            lines.append(f"  gamma={gamma:<4g} ({regime:>14}) data={c.tolerance:.4f}  {c.note}")
        lines.append("")
    for gamma, rep in tables.items():
        lines.append(f"gamma={gamma:g} checks")
        lines.append(rep.summary())
        lines.append("")
    (out / "dichotomy.txt").write_text("\n".join(lines))
    return report


HANDLERS = {
    "solve": cmd_solve, "viscous": cmd_viscous, "particles": cmd_particles,
    "diagnose": cmd_diagnose, "compare": cmd_compare, "dichotomy": cmd_dichotomy,
}


def _write(report: DiagnosticsReport, out: Path) -> None:
    report.to_csv(out / "report.csv")
    (out / "report.txt").write_text(report.summary() + "\n")


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    out = args.out
    out.mkdir(parents=True, exist_ok=True)
    try:
        cfg = _config(args)
        report = HANDLERS[args.command](cfg, args, out)
    except (io.ConfigError, ScenarioError) as exc:
        print(f"relaxlab: configuration error: {exc}", file=sys.stderr)
        rep = DiagnosticsReport()
        rep.add("configuration", False, np.nan, np.nan, "configuration", note=str(exc))
        _write(rep, out)
        return 2
    except (SolverError, RuntimeError, ValueError) as exc:
        print(f"relaxlab: {args.command} failed: {exc}", file=sys.stderr)
        rep = DiagnosticsReport()
        rep.add(f"{args.command}-run", False, np.nan, np.nan, "runtime", note=str(exc))
        _write(rep, out)
        return 2
    _write(report, out)
    print(report.summary())
    return 0 if report.passed else 1


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
