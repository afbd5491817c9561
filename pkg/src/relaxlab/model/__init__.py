"""Fluxes, relaxation profiles, boundary data, entropy pairs and scenarios."""

from relaxlab.model.assumptions import validate_assumptions
from relaxlab.model.entropy import (
    EntropyPair,
    kruzhkov_flux,
    kruzhkov_pair,
    lax_pair,
    linear_pair,
    one_sided_pairs,
    quadratic_boundary_pair,
    quadratic_pair,
    regularized_boundary_pair,
)
from relaxlab.model.flux import FluxModel, burgers, cubic, flux_from_name, linear_advection, quadratic_traffic
from relaxlab.model.functions import Constant, PiecewiseConstant, PiecewiseLinear, Step
from relaxlab.model.relaxation import RelaxationProfile
from relaxlab.model.scenario import (
    BoundaryData,
    Scenario,
    ScenarioError,
    canonical_rho,
    make_canonical_scenario,
    make_scenario,
    mean_jump_length,
    riemann_scenario,
)
from relaxlab.model.special import c_gamma, zeta, zeta_tail

__all__ = [
    "BoundaryData", "Constant", "EntropyPair", "FluxModel", "PiecewiseConstant", "PiecewiseLinear",
    "RelaxationProfile", "Scenario", "ScenarioError", "Step", "burgers", "c_gamma", "canonical_rho", "cubic",
    "flux_from_name", "kruzhkov_flux", "kruzhkov_pair", "lax_pair", "linear_advection", "linear_pair",
    "make_canonical_scenario", "make_scenario", "mean_jump_length", "one_sided_pairs",
    "quadratic_boundary_pair", "quadratic_pair", "quadratic_traffic", "regularized_boundary_pair",
    "riemann_scenario", "validate_assumptions", "zeta", "zeta_tail",
]
