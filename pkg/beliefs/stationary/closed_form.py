"""Gaussian-family stationary solutions under unbounded confidence.

When zeta ignores beliefs, each personality slice of the stationary density
is N(m(p), sigma2 / (2 w(p))) scaled by rho0(p), with

    w(p) = alpha(p) + (1 - alpha(p)) eta(p)
    m(p) = [alpha(p) u(p) + (1 - alpha(p)) eta(p) phi*(p)] / w(p)
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from beliefs.config import settings
from beliefs.errors import DenominatorVanishes, UnsupportedScenario
from beliefs.model.scenario import ScenarioSpec, personality_density
from beliefs.numerics.density import DensityField
from beliefs.numerics.grid import Grid, trapezoid_weights
from beliefs.numerics.special import erf_eval, gaussian_pdf
from beliefs.stationary.fredholm import FredholmMethod, fredholm_phi, fredholm_system

logger = logging.getLogger(__name__)

DENOMINATOR_TOL = 1e-12


@dataclass(eq=False)
class GaussianFamilySolution:
    """(m, w, phi*) on personality nodes; fixes the whole stationary density.

    Attributes:
        p_nodes: Personality nodes.
        m: Slice means m(p).
        w: Relaxation rates w(p).
        phi_star: Interaction mean phi*(p).
        sigma2: Noise variance.
        rho0: Normalized personality density on p_nodes.
    """

    p_nodes: np.ndarray
    m: np.ndarray
    w: np.ndarray
    phi_star: np.ndarray
    sigma2: float
    rho0: np.ndarray

    @property
    def variance(self) -> np.ndarray:
        """Per-slice belief variance sigma2 / (2 w(p))."""
        return self.sigma2 / (2.0 * self.w)

    def _on(self, p: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        if len(p) == len(self.p_nodes) and np.array_equal(p, self.p_nodes):
            return self.m, self.variance, self.rho0
        m = np.interp(p, self.p_nodes, self.m)
        w = np.interp(p, self.p_nodes, self.w)
        rho0 = np.interp(p, self.p_nodes, self.rho0)
        return m, self.sigma2 / (2.0 * w), rho0

    def to_density(self, grid: Grid) -> DensityField:
        """Sample rho(p, x) = N(x; m(p), var(p)) rho0(p) on a grid."""
        m, var, rho0 = self._on(grid.p_nodes)
        values = gaussian_pdf(grid.x_nodes[None, :], m[:, None], var[:, None]) * rho0[:, None]
        return DensityField(grid, values)

    def marginal(self, x_nodes: np.ndarray, oversample: int | None = None) -> np.ndarray:
        """Belief marginal rho(x) by trapezoid over a p grid refined ``oversample`` times.

        The refinement resolves slices narrower than the p spacing, which the
        plain trapezoid over a coarse p grid would under-integrate.
        """
        oversample = oversample or settings.marginal_oversample
        n_fine = (len(self.p_nodes) - 1) * oversample + 1
        p_fine = np.linspace(self.p_nodes[0], self.p_nodes[-1], n_fine)
        m, var, rho0 = self._on(p_fine)
        weights = trapezoid_weights(p_fine) * rho0
        rho0_mass = float(trapezoid_weights(self.p_nodes) @ self.rho0)
        weights *= rho0_mass / float(weights.sum())
        columns = gaussian_pdf(np.asarray(x_nodes)[None, :], m[:, None], var[:, None])
        return weights @ columns


def reconstruct(spec: ScenarioSpec, grid: Grid, phi_star: np.ndarray) -> GaussianFamilySolution:
    """Build m(p) and w(p) from phi*(p) on the grid's personality nodes."""
    system = fredholm_system(spec, grid)
    p = grid.p_nodes
    alpha = spec.alpha(p)
    m = (alpha * spec.prejudice(p) + (1.0 - alpha) * system.eta * phi_star) / system.w
    return GaussianFamilySolution(
        p_nodes=p,
        m=m,
        w=system.w,
        phi_star=np.asarray(phi_star, dtype=float),
        sigma2=spec.sigma2,
        rho0=system.rho0,
    )


def solve_unbounded(
    spec: ScenarioSpec, grid: Grid, method: FredholmMethod = FredholmMethod.NYSTROM
) -> GaussianFamilySolution:
    """Fredholm solve for phi* followed by the Gaussian reconstruction."""
    return reconstruct(spec, grid, fredholm_phi(spec, grid, method))


def closed_form_product(spec: ScenarioSpec, grid: Grid) -> GaussianFamilySolution:
    """Stationary solution for product-form influence zeta1(p) zeta2(p').

    phi* is then constant in p and equals a ratio of two quadratures.

    Raises:
        UnsupportedScenario: The influence is not declared in product form.
        DenominatorVanishes: The ratio's denominator is <= 1e-12.
    """
    if not spec.product_form or spec.zeta.factors is None:
        raise UnsupportedScenario(f"scenario '{spec.name}' is not in product form")
    zeta1, zeta2 = spec.zeta.factors
    p = grid.p_nodes
    rho0 = personality_density(spec, grid)
    z1 = np.broadcast_to(zeta1(p), p.shape).astype(float)
    weighted = grid.p_weights * rho0 * np.broadcast_to(zeta2(p), p.shape)
    alpha = spec.alpha(p)
    alpha_bar = 1.0 - alpha
    u = spec.prejudice(p)

    eta = float(weighted.sum())
    w = alpha + alpha_bar * z1 * eta
    denominator = 1.0 - float(weighted @ (alpha_bar * z1 / w))
    if denominator <= DENOMINATOR_TOL:
        raise DenominatorVanishes(f"phi* denominator {denominator:.3e} <= {DENOMINATOR_TOL:g}")
    phi = (float(weighted @ (alpha * u / w)) / eta) / denominator if eta > 0 else 0.0

    m = (alpha * u + alpha_bar * z1 * eta * phi) / w
    logger.debug("Product-form phi* = %.12g (eta = %.6g)", phi, eta)
    return GaussianFamilySolution(
        p_nodes=p, m=m, w=w, phi_star=np.full(p.shape, phi), sigma2=spec.sigma2, rho0=rho0
    )


def homogeneous_closed_form(
    alpha: float, sigma2: float, x: float | np.ndarray
) -> float | np.ndarray:
    """Stationary belief marginal of the homogeneous scenario.

    rho(x) = [erf((alpha + x) / sigma) + erf((alpha - x) / sigma)] / (4 alpha)
    """
    if not 0 < alpha <= 1:
        raise ValueError(f"alpha must lie in (0, 1], got {alpha}")
    if sigma2 <= 0:
        raise ValueError(f"sigma2 must be positive, got {sigma2}")
    sigma = math.sqrt(sigma2)
    x = np.asarray(x, dtype=float)
    rho = (erf_eval((alpha + x) / sigma) + erf_eval((alpha - x) / sigma)) / (4.0 * alpha)
    return float(rho) if np.ndim(rho) == 0 else rho
