"""Stationary belief distributions: operator A, Fredholm equation and closed forms."""

from beliefs.stationary.closed_form import (
    GaussianFamilySolution,
    closed_form_product,
    homogeneous_closed_form,
    reconstruct,
    solve_unbounded,
)
from beliefs.stationary.fixed_point import (
    ContractionDiagnosis,
    FixedPointReport,
    contraction_bound_check,
    successive_approximation,
)
from beliefs.stationary.fredholm import FredholmMethod, fredholm_phi
from beliefs.stationary.modes import find_modes, two_cluster_split
from beliefs.stationary.operator import apply_operator_A, drift_mu
from beliefs.stationary.solve import StationaryResult, solve_stationary

__all__ = [
    "ContractionDiagnosis",
    "FixedPointReport",
    "FredholmMethod",
    "GaussianFamilySolution",
    "StationaryResult",
    "apply_operator_A",
    "closed_form_product",
    "contraction_bound_check",
    "drift_mu",
    "find_modes",
    "fredholm_phi",
    "homogeneous_closed_form",
    "reconstruct",
    "solve_stationary",
    "solve_unbounded",
    "successive_approximation",
    "two_cluster_split",
]
