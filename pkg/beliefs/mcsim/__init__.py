"""Finite-population Monte Carlo simulation of the agent dynamics."""

from beliefs.mcsim.dynamics import (
    DriftDiagnostic,
    InteractionPath,
    default_dt,
    drift_diagnostic,
    interaction_sums,
    mc_step,
)
from beliefs.mcsim.ensemble import AgentEnsemble, init_ensemble
from beliefs.mcsim.histogram import EmpiricalHistogram, empirical_density, marginal_l1
from beliefs.mcsim.run import MCTrajectory, mc_run

__all__ = [
    "AgentEnsemble",
    "DriftDiagnostic",
    "EmpiricalHistogram",
    "InteractionPath",
    "MCTrajectory",
    "default_dt",
    "drift_diagnostic",
    "empirical_density",
    "init_ensemble",
    "interaction_sums",
    "marginal_l1",
    "mc_run",
    "mc_step",
]
