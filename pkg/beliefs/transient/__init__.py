"""Transient belief densities under unbounded confidence."""

from beliefs.transient.green import (
    TransientSolution,
    density_at,
    green_mean_var,
    solve_transient,
)
from beliefs.transient.laplace import LaplaceResidual, laplace_consistency_check, laplace_I2
from beliefs.transient.volterra import (
    PhiPath,
    default_horizon,
    slowest_relaxation_rate,
    solve_phi_volterra,
)

__all__ = [
    "LaplaceResidual",
    "PhiPath",
    "TransientSolution",
    "default_horizon",
    "density_at",
    "green_mean_var",
    "laplace_I2",
    "laplace_consistency_check",
    "slowest_relaxation_rate",
    "solve_phi_volterra",
    "solve_transient",
]
