"""The interaction mean phi*(p) under unbounded confidence.

With belief-independent influence every stationary slice is Gaussian and
the whole solution is fixed by phi*(p), the influence-weighted mean belief
seen from personality p. It solves a Fredholm equation of the second kind

    phi*(p) = h(p) + integral of Gamma(p, p') phi*(p') dp'

with

    Gamma(p, p') = zeta(p, p') rho0(p') abar(p') eta(p') / (eta(p) w(p'))
    h(p)         = integral of zeta(p, p') rho0(p') alpha(p') u(p') / (eta(p) w(p')) dp'
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from beliefs.errors import BeliefDependentZeta, SeriesDiverges
from beliefs.model.scenario import ScenarioSpec, personality_density
from beliefs.numerics.grid import Grid
from beliefs.numerics.linalg import solve_dense

logger = logging.getLogger(__name__)

SERIES_RTOL = 1e-15
SERIES_MAX_TERMS = 100_000


class FredholmMethod(Enum):
    """How the discretized equation is solved."""

    NYSTROM = "nystrom"  # dense solve of (I - K) phi = h
    NEUMANN = "neumann"  # partial sums of the resolvent series


@dataclass(frozen=True)
class FredholmSystem:
    """Nystrom discretization of the phi* equation on a personality grid.

    Attributes:
        kernel: K[i, j] = Gamma(p_i, p_j) wp_j.
        rhs: h(p_i).
        eta: eta(p_i).
        w: w(p_i).
        rho0: Normalized rho0(p_i).
    """

    kernel: np.ndarray
    rhs: np.ndarray
    eta: np.ndarray
    w: np.ndarray
    rho0: np.ndarray


def _safe_inverse(values: np.ndarray) -> np.ndarray:
    return np.divide(1.0, values, out=np.zeros_like(values), where=values > 0)


def fredholm_system(spec: ScenarioSpec, grid: Grid) -> FredholmSystem:
    """Assemble K and h; rows with eta = 0 are left empty since phi* is immaterial there."""
    if not spec.belief_independent:
        raise BeliefDependentZeta(
            f"phi* needs belief-independent influence; '{spec.name}' has bounded confidence"
        )
    p = grid.p_nodes
    rho0 = personality_density(spec, grid)
    zeta = spec.zeta.matrix(p)
    eta = zeta @ (grid.p_weights * rho0)
    alpha = spec.alpha(p)
    alpha_bar = 1.0 - alpha
    w = alpha + alpha_bar * eta
    inv_eta = _safe_inverse(eta)
    column = grid.p_weights * rho0 / w
    kernel = inv_eta[:, None] * zeta * (column * alpha_bar * eta)[None, :]
    rhs = inv_eta * (zeta @ (column * alpha * spec.prejudice(p)))
    return FredholmSystem(kernel=kernel, rhs=rhs, eta=eta, w=w, rho0=rho0)


def kernel_l2_norm(spec: ScenarioSpec, grid: Grid) -> float:
    """Discrete L2 norm of Gamma: sqrt(sum wp_i wp_j Gamma_ij^2)."""
    system = fredholm_system(spec, grid)
    gamma = system.kernel / grid.p_weights[None, :]
    return math.sqrt(float(grid.p_weights @ gamma**2 @ grid.p_weights))


def fredholm_phi(
    spec: ScenarioSpec,
    grid: Grid,
    method: FredholmMethod = FredholmMethod.NYSTROM,
) -> np.ndarray:
    """Solve for phi*(p) at every personality node.

    Args:
        spec: A belief-independent scenario.
        grid: Grid whose p nodes carry the quadrature.
        method: Nystrom (always applicable) or the Neumann series.

    Returns:
        phi*(p_i) as an array over grid.p_nodes.

    Raises:
        BeliefDependentZeta: The influence depends on beliefs.
        SeriesDiverges: Neumann series requested with kernel norm >= 1.
        SingularMatrix: I - K cannot be factored.
    """
    system = fredholm_system(spec, grid)
    if method is FredholmMethod.NYSTROM:
        identity = np.eye(grid.n_p)
        phi = solve_dense(identity - system.kernel, system.rhs)
        logger.debug("Nystrom solve on %d personality nodes", grid.n_p)
        return phi

    norm = kernel_l2_norm(spec, grid)
    if norm >= 1.0:
        raise SeriesDiverges(f"kernel L2 norm {norm:.6f} >= 1; use the Nystrom method")
    phi = system.rhs.copy()
    term = system.rhs.copy()
    for n_terms in range(1, SERIES_MAX_TERMS + 1):
        term = system.kernel @ term
        phi += term
        if np.max(np.abs(term)) <= SERIES_RTOL * max(1.0, float(np.max(np.abs(phi)))):
            logger.debug("Neumann series converged after %d terms (norm %.4f)", n_terms, norm)
            break
    return phi
