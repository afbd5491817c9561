"""Numerical certificates for entropy solutions and their boundary behaviour."""

from relaxlab.diagnostics.checks import (
    bd_average,
    boundary_trace,
    contraction_check,
    energy_bound,
    energy_bound_check,
    initial_continuity,
    l1_distance,
)
from relaxlab.diagnostics.manufactured import (
    constant_field,
    field_from_function,
    glued_riemann_field,
    smooth_manufactured,
)
from relaxlab.diagnostics.residual import (
    ENTROPY_SLACK_C,
    calibrate_slack,
    default_k_grid,
    entropy_residual,
    kruzhkov_residuals,
)
from relaxlab.diagnostics.testfunctions import TestFunctionFamily, cutoff
from relaxlab.report import DiagnosticsReport

__all__ = [
    "DiagnosticsReport", "ENTROPY_SLACK_C", "TestFunctionFamily", "bd_average", "boundary_trace",
    "calibrate_slack", "constant_field", "smooth_manufactured", "contraction_check", "cutoff", "default_k_grid", "energy_bound",
    "energy_bound_check", "entropy_residual", "field_from_function", "glued_riemann_field",
    "initial_continuity", "kruzhkov_residuals", "l1_distance",
]
