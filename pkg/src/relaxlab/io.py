"""Scenario files and CSV artifacts.

A scenario file is INI text with sections [flux], [relaxation], [boundary],
[initial] and [run]. Functions are numbers, named built-ins, ``step:l,r[,at]``
or ``table:path.csv`` (piecewise-linear, path relative to the scenario file).

    [flux]
    name = quadratic_traffic
    scale = 1              ; or "jump_mean" for the particle-consistent m(gamma)

    [relaxation]
    profile = canonical    ; canonical | zero | constant | power_law
    gamma = 2

    [boundary]
    alpha = 0.8
    beta = 0.2
    rho = canonical        ; canonical | number | table:rho.csv (time-independent)

    [initial]
    u0 = 0.5

    [run]
    T = 1
    cells = 256
    times = 0.25, 0.5, 1
"""

from __future__ import annotations

import configparser
import csv
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from relaxlab.fv_solver import Field, Grid
from relaxlab.model.flux import BUILTIN_FLUXES, flux_from_name
from relaxlab.model.functions import PiecewiseLinear, Step
from relaxlab.model.relaxation import RelaxationProfile
from relaxlab.model.scenario import Scenario, ScenarioError, make_canonical_scenario, make_scenario, mean_jump_length

SECTIONS = ("flux", "relaxation", "boundary", "initial", "run")
PROFILES = ("canonical", "zero", "constant", "power_law")
_RUN_KEYS = {
    "t": float, "cells": int, "times": None, "eps": float, "particles": int, "seeds": int, "seed": int,
    "cfl": float, "name": str, "n_cells": int,
}


class ConfigError(ValueError):
    """Scenario-file error carrying the file, line and field it refers to."""

    def __init__(self, msg: str, path=None, line: int | None = None, section: str | None = None,
                 key: str | None = None):
        where = str(path) if path else "<scenario>"
        if line is not None:
            where += f":{line}"
        if section:
            where += f": [{section}]" + (f" {key}" if key else "")
        super().__init__(f"{where}: {msg}")
        self.path, self.line, self.section, self.key = path, line, section, key


@dataclass
class RunParams:
    T: float = 1.0
    cells: int = 256
    times: list = field(default_factory=list)
    eps: float = 0.01
    particles: int = 1024
    seeds: int = 10
    seed: int = 0
    cfl: float = 0.5


@dataclass
class ScenarioFile:
    scenario: Scenario
    run: RunParams
    gamma: float | None
    alpha: float | None  # constant data, when given as numbers (particle runs need them)
    beta: float | None
    path: Path | None = None


def _line_index(text: str) -> dict:
    """(section, key) -> 1-based line number."""
    out = {}
    section = None
    for n, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line[0] in "#;":
            continue
        m = re.match(r"\[([^\]]+)\]", line)
        if m:
            section = m.group(1).strip().lower()
            out[(section, None)] = n
            continue
        m = re.match(r"([^=:]+)[=:]", line)
        if m and section:
            out[(section, m.group(1).strip().lower())] = n
    return out


class _Reader:
    def __init__(self, text: str, path: Path | None):
        self.path = path
        self.base = path.parent if path else Path(".")
        self.lines = _line_index(text)
        self.cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
        try:
            self.cp.read_string(text, source=str(path) if path else "<scenario>")
        except configparser.Error as exc:
            raise ConfigError(str(exc).splitlines()[0], path, getattr(exc, "lineno", None)) from None
        unknown = [s for s in self.cp.sections() if s not in SECTIONS]
        if unknown:
            raise ConfigError(f"unknown section; expected one of {list(SECTIONS)}", path,
                              self.lines.get((unknown[0], None)), unknown[0])

    def error(self, msg, section, key=None):
        return ConfigError(msg, self.path, self.lines.get((section, key), self.lines.get((section, None))),
                           section, key)

    def get(self, section, key, default=None):
        if self.cp.has_option(section, key):
            return self.cp.get(section, key).strip()
        return default

    def number(self, section, key, default=None, kind=float):
        raw = self.get(section, key)
        if raw is None:
            if default is None:
                raise self.error("missing required field", section, key)
            return default
        try:
            return kind(raw)
        except ValueError:
            raise self.error(f"expected {kind.__name__}, got {raw!r}", section, key) from None

    def function(self, section, key, default=None, arity: str = "x"):
        """Number, step:l,r[,at] or table:path.csv (columns x or t, value)."""
        raw = self.get(section, key)
        if raw is None:
            if default is None:
                raise self.error("missing required field", section, key)
            return default
        try:
            return float(raw)
        except ValueError:
            pass
        kind, _, arg = raw.partition(":")
        kind = kind.strip().lower()
        try:
            if kind == "step":
                parts = [float(p) for p in arg.split(",")]
                if len(parts) not in (2, 3):
                    raise ValueError("step needs left,right[,at]")
                return Step(*parts)
            if kind == "table":
                p = Path(arg.strip())
                p = p if p.is_absolute() else self.base / p
                if not p.exists():
                    raise ValueError(f"table file {p} does not exist")
                return PiecewiseLinear.from_csv(p)
        except (ValueError, IndexError) as exc:
            raise self.error(str(exc), section, key) from None
        raise self.error(f"cannot read {raw!r}; use a number, step:l,r[,at] or table:file.csv", section, key)


def parse_scenario(text: str, path: str | Path | None = None) -> ScenarioFile:
    path = Path(path) if path is not None else None
    r = _Reader(text, path)

    # [run]
    run = RunParams()
    if r.cp.has_section("run"):
        for key in r.cp.options("run"):
            if key not in _RUN_KEYS:
                raise r.error(f"unknown field; expected one of {sorted(_RUN_KEYS)}", "run", key)
        run.T = r.number("run", "t", 1.0)
        run.cells = r.number("run", "cells", r.number("run", "n_cells", 256, int), int)
        run.eps = r.number("run", "eps", 0.01)
        run.particles = r.number("run", "particles", 1024, int)
        run.seeds = r.number("run", "seeds", 10, int)
        run.seed = r.number("run", "seed", 0, int)
        run.cfl = r.number("run", "cfl", 0.5)
        if r.get("run", "times"):
            try:
                run.times = parse_times(r.get("run", "times"))
            except ValueError as exc:
                raise r.error(str(exc), "run", "times") from None
    for key, ok, msg in (("t", run.T > 0, "must be positive"), ("cells", run.cells >= 8, "must be >= 8"),
                         ("eps", run.eps > 0, "must be positive"), ("seeds", run.seeds >= 1, "must be >= 1"),
                         ("cfl", 0 < run.cfl <= 1, "must lie in (0, 1]"),
                         ("particles", run.particles >= 4, "must be >= 4")):
        if not ok:
            raise r.error(msg, "run", key)
    if any(t > run.T + 1e-12 for t in run.times):
        raise r.error("output times must not exceed T", "run", "times")

    # [relaxation]
    profile = (r.get("relaxation", "profile", "canonical") or "canonical").lower()
    if profile not in PROFILES:
        raise r.error(f"unknown profile {profile!r}; expected one of {list(PROFILES)}", "relaxation", "profile")
    gamma = None
    if profile in ("canonical", "power_law"):
        gamma = r.number("relaxation", "gamma")
        if not gamma > 0:
            raise r.error("gamma must be positive", "relaxation", "gamma")

    # [flux]
    name = r.get("flux", "name", "quadratic_traffic")
    if name not in BUILTIN_FLUXES:
        raise r.error(f"unknown flux {name!r}; choose from {sorted(BUILTIN_FLUXES)}", "flux", "name")
    kwargs = {}
    if r.cp.has_section("flux"):
        for key in r.cp.options("flux"):
            if key == "name":
                continue
            raw = r.get("flux", key)
            if raw == "jump_mean":
                if gamma is None or gamma <= 1:
                    raise r.error("jump_mean needs a canonical profile with gamma > 1", "flux", key)
                kwargs[key] = mean_jump_length(gamma)
            else:
                kwargs[key] = r.number("flux", key)
    try:
        flux = flux_from_name(name, **kwargs)
    except TypeError as exc:
        raise r.error(f"bad flux parameters: {exc}", "flux") from None

    # [boundary] / [initial]
    alpha = r.function("boundary", "alpha")
    beta = r.function("boundary", "beta")
    u0 = r.function("initial", "u0")
    rho_raw = (r.get("boundary", "rho", "canonical" if profile == "canonical" else None) or "").lower()
    label = r.get("run", "name")

    try:
        if profile == "canonical":
            if rho_raw != "canonical":
                raise r.error("the canonical profile fixes rho; remove the field or set rho = canonical",
                              "boundary", "rho")
            sc = make_canonical_scenario(gamma, alpha, beta, u0, run.T, flux=flux, name=label)
        else:
            if not rho_raw:
                raise r.error("missing required field", "boundary", "rho")
            if profile == "zero":
                relax = RelaxationProfile.zero()
            elif profile == "constant":
                relax = RelaxationProfile.constant(r.number("relaxation", "value"))
            else:
                relax = RelaxationProfile.power_law(gamma, r.number("relaxation", "amplitude"))
            rho = r.function("boundary", "rho")
            if callable(rho):
                prof = rho
                rho = lambda t, x, prof=prof: prof(np.asarray(x, dtype=float)) * np.ones_like(np.asarray(t, dtype=float))
                sc = make_scenario(flux, relax, alpha, beta, rho, u0, run.T, name=label or "scenario",
                                   rho_bounds=prof.bounds, rho_static=True)
            else:
                sc = make_scenario(flux, relax, alpha, beta, rho, u0, run.T, name=label or "scenario")
    except ScenarioError as exc:
        raise ConfigError(str(exc), path) from None
    return ScenarioFile(sc, run, gamma,
                        alpha if isinstance(alpha, float) else None,
                        beta if isinstance(beta, float) else None, path)


def load_scenario(path: str | Path) -> ScenarioFile:
    path = Path(path)
    if not path.exists():
        raise ConfigError("scenario file does not exist", path)
    return parse_scenario(path.read_text(), path)


def parse_times(raw: str) -> list[float]:
    try:
        times = [float(t) for t in raw.replace(" ", "").split(",") if t]
    except ValueError:
        raise ValueError(f"times must be a comma-separated list of numbers, got {raw!r}") from None
    if any(t < 0 for t in times):
        raise ValueError("times must be nonnegative")
    return sorted(set(times))


# ---------------------------------------------------------------- CSV output

def write_field(field: Field, path: str | Path, times=None) -> None:
    """Snapshots as rows ``t,x,u`` (all stored snapshots unless ``times`` is given)."""
    ts = field.times()
    sel = range(len(ts)) if times is None else sorted({int(np.argmin(np.abs(ts - t))) for t in times})
    x = field.grid.x
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "x", "u"])
        for k in sel:
            for xi, ui in zip(x, field.history_u[k]):
                w.writerow([f"{ts[k]:.17g}", f"{xi:.17g}", f"{ui:.17g}"])


def read_field(path: str | Path, scenario: Scenario | None = None) -> Field:
    """Inverse of write_field on a uniform grid; V_bar comes from ``scenario`` when given."""
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if data.shape[1] != 3:
        raise ValueError(f"{path}: expected columns t,x,u")
    ts = np.unique(data[:, 0])
    n = int(np.sum(data[:, 0] == ts[0]))
    if len(data) != n * len(ts):
        raise ValueError(f"{path}: every snapshot must have the same number of cells")
    grid = Grid.uniform(n, scenario)
    fld = Field(grid, np.zeros(n), 0.0)
    for t in ts:
        rows = data[data[:, 0] == t]
        rows = rows[np.argsort(rows[:, 1])]
        if not np.allclose(rows[:, 1], grid.x, atol=1e-9):
            raise ValueError(f"{path}: x column at t={t:g} is not the uniform cell-centre grid")
        fld.history_t.append(float(t))
        fld.history_u.append(rows[:, 2].copy())
    fld.u, fld.t = fld.history_u[-1].copy(), float(ts[-1])
    return fld


def write_fluxes(field: Field, path: str | Path) -> None:
    """Interface-flux log ``t,x_interface,flux`` (needs solve(..., record_fluxes=True))."""
    edges = field.grid.edges
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "x_interface", "flux"])
        for t, F in field.interface_flux:
            for xe, f in zip(edges, F):
                w.writerow([f"{t:.12g}", f"{xe:.12g}", f"{f:.15g}"])


def write_energy(run, path: str | Path) -> None:
    """Viscous energy log ``t,visc_energy,relax_energy``."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "visc_energy", "relax_energy"])
        for t, visc, _, relax in run.energy_log:
            w.writerow([f"{t:.12g}", f"{visc:.15g}", f"{relax:.15g}"])


def write_events(log, path: str | Path, seed: int) -> None:
    from relaxlab.particles import EVENT_NAMES

    new = not Path(path).exists()
    with open(path, "a", newline="") as fh:
        w = csv.writer(fh)
        if new:
            w.writerow(["seed", "t", "event", "site", "target"])
        for row in log:
            w.writerow([seed, f"{row['t']:.15g}", EVENT_NAMES[row["kind"]], int(row["site"]), int(row["target"])])


def write_table(rows, header, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)
