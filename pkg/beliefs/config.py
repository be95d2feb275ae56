"""Toolkit configuration and settings management."""

from pathlib import Path

from pydantic_settings import BaseSettings

__version__ = "0.1.0"


class Settings(BaseSettings):
    """Toolkit defaults loaded from environment variables."""

    app_name: str = "belief-fluid"
    output_dir: Path = Path("out")

    # Discretization
    grid_np: int = 201
    grid_nx: int = 401
    validation_np: int = 2001
    marginal_oversample: int = 32  # refinement in p for Gaussian-family marginals

    # Stationary solvers
    fixed_point_tol: float = 1e-8
    fixed_point_max_iter: int = 10_000
    relaxation: float = 1.0  # 1.0 = plain successive approximation
    alpha_floor: float = 1e-3  # applied by presets whose alpha shape touches 0

    # Monte Carlo
    mc_agents: int = 1000
    mc_seed: int = 0
    mc_record_every: int = 100
    mc_burn_in: float = 0.5  # fraction of the run discarded before averaging histograms
    mc_x_bins: int = 20
    mc_p_bins: int = 1

    threads: int = 1
    debug: bool = False

    model_config = {"env_prefix": "BELIEF_FLUID_", "env_file": ".env"}


settings = Settings()
