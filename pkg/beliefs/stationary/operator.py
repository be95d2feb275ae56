"""The drift of the Fokker-Planck equation and the stationary operator A.

A maps a density to the product of a Gaussian prejudice factor and the
exponential of the integrated interaction drift, renormalized per
personality so that every slice keeps its rho0 mass. All exponentials are
taken in log space.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from scipy.integrate import cumulative_trapezoid

from beliefs.config import settings
from beliefs.errors import OverflowGuard
from beliefs.model.scenario import ScenarioSpec, personality_density
from beliefs.numerics.density import DensityField
from beliefs.numerics.grid import Grid

logger = logging.getLogger(__name__)


def _belief_kernel(spec: ScenarioSpec, grid: Grid) -> np.ndarray:
    """C[j, l] = g(|x_l - x_j|) (x_l - x_j) wx_l."""
    gap = grid.x_nodes[None, :] - grid.x_nodes[:, None]
    weighted = gap * grid.x_weights[None, :]
    if spec.zeta.belief is None:
        return weighted
    return spec.zeta.belief(np.abs(gap)) * weighted


def interaction_drift(spec: ScenarioSpec, field: DensityField) -> np.ndarray:
    """Interaction part of the drift at every grid node.

    mu(p_i, x_j) = (1 - alpha(p_i)) sum_k sum_l zeta(|x_l - x_j|, p_i, p_k)
    (x_l - x_j) rho(p_k, x_l) wp_k wx_l, evaluated as a personality
    contraction followed by a belief convolution.
    """
    grid = field.grid
    if spec.zeta.bound == 0:
        return np.zeros(grid.shape)
    k_weighted = spec.zeta.matrix(grid.p_nodes) * grid.p_weights[None, :]
    pulled = k_weighted @ field.values
    return spec.alpha_bar(grid.p_nodes)[:, None] * (pulled @ _belief_kernel(spec, grid).T)


def drift_mu(spec: ScenarioSpec, rho: DensityField, p: float, x: float) -> float:
    """Full drift (interaction plus prejudice pull) at one point of the plane."""
    grid = rho.grid
    k_row = spec.zeta.personality(np.float64(p), grid.p_nodes) * grid.p_weights
    gap = grid.x_nodes - x
    g = np.ones_like(gap) if spec.zeta.belief is None else spec.zeta.belief(np.abs(gap))
    interaction = float(k_row @ rho.values @ (g * gap * grid.x_weights))
    p_arr = np.float64(p)
    alpha = float(spec.alpha(p_arr))
    return (1.0 - alpha) * interaction + alpha * (float(spec.prejudice(p_arr)) - x)


def log_density(spec: ScenarioSpec, grid: Grid, drift: np.ndarray) -> np.ndarray:
    """Unnormalized log of A's output for a given interaction drift."""
    x = grid.x_nodes
    integral = cumulative_trapezoid(drift, x, axis=1, initial=0.0)
    integral -= integral[:, [grid.nearest_x(0.0)]]
    alpha = spec.alpha(grid.p_nodes)[:, None]
    u = spec.prejudice(grid.p_nodes)[:, None]
    return (2.0 / spec.sigma2) * integral - alpha * (x[None, :] - u) ** 2 / spec.sigma2


def _normalize_slices(
    log_rho: np.ndarray, x_weights: np.ndarray, rho0: np.ndarray, rows: range
) -> np.ndarray:
    block = log_rho[rows.start : rows.stop]
    shifted = np.exp(block - block.max(axis=1, keepdims=True))
    mass = shifted @ x_weights
    return shifted / mass[:, None] * rho0[rows.start : rows.stop, None]


def normalize_log_density(
    log_rho: np.ndarray, grid: Grid, rho0: np.ndarray, threads: int | None = None
) -> np.ndarray:
    """Exponentiate per p-slice and rescale each slice to mass rho0(p).

    Raises:
        OverflowGuard: The log-density holds non-finite entries.
    """
    if not np.all(np.isfinite(log_rho)):
        raise OverflowGuard("log-density is not finite; sigma2 too small for this grid")
    threads = threads or settings.threads
    if threads <= 1:
        return _normalize_slices(log_rho, grid.x_weights, rho0, range(grid.n_p))
    bounds = np.linspace(0, grid.n_p, threads + 1).astype(int)
    chunks = [range(lo, hi) for lo, hi in zip(bounds[:-1], bounds[1:], strict=True) if hi > lo]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        parts = pool.map(
            lambda rows: _normalize_slices(log_rho, grid.x_weights, rho0, rows), chunks
        )
        return np.vstack(list(parts))


def apply_operator_A(  # noqa: N802
    spec: ScenarioSpec, rho: DensityField, threads: int | None = None
) -> DensityField:
    """One application of the stationary operator.

    Args:
        spec: The scenario.
        rho: Current density, normalized with personality marginal rho0.
        threads: Worker threads for the per-slice exponentiation.

    Returns:
        The image density on the same grid; each p-slice integrates to rho0(p).
    """
    grid = rho.grid
    drift = interaction_drift(spec, rho)
    log_rho = log_density(spec, grid, drift)
    values = normalize_log_density(log_rho, grid, personality_density(spec, grid), threads)
    return DensityField(grid, values)


def prejudice_density(spec: ScenarioSpec, grid: Grid) -> DensityField:
    """A applied with zero interaction drift: N(u(p), sigma2 / (2 alpha(p))) rho0(p)."""
    log_rho = log_density(spec, grid, np.zeros(grid.shape))
    return DensityField(grid, normalize_log_density(log_rho, grid, personality_density(spec, grid)))
