"""Scalar conservation laws with singular boundary relaxation.

Finite-volume and vanishing-viscosity solvers with their weak-form diagnostics,
plus a long-jump exclusion process coupled to boundary reservoirs.
"""

from relaxlab.fv_solver import CFLError, Field, Grid, SolverError, numerical_flux, relax_substep, solve, step
from relaxlab.model import (
    BoundaryData,
    EntropyPair,
    FluxModel,
    RelaxationProfile,
    Scenario,
    make_canonical_scenario,
    make_scenario,
    validate_assumptions,
)
from relaxlab.report import DiagnosticsReport
from relaxlab.viscous_solver import ViscousRun, energy_estimate, mollify_data, viscous_solve

__version__ = "0.1.0"

__all__ = [
    "BoundaryData",
    "CFLError",
    "DiagnosticsReport",
    "EntropyPair",
    "Field",
    "FluxModel",
    "Grid",
    "RelaxationProfile",
    "Scenario",
    "SolverError",
    "ViscousRun",
    "energy_estimate",
    "make_canonical_scenario",
    "make_scenario",
    "mollify_data",
    "numerical_flux",
    "relax_substep",
    "solve",
    "step",
    "validate_assumptions",
    "viscous_solve",
]
