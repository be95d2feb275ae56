"""Transient densities from the Gaussian Green function of the linear FP equation."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy.integrate import trapezoid
from scipy.special import ndtr

from beliefs.errors import BeliefDependentZeta
from beliefs.model.initial import InitialCondition, PrejudiceInit
from beliefs.model.scenario import ScenarioSpec
from beliefs.numerics.density import DensityField
from beliefs.numerics.grid import Grid, trapezoid_weights
from beliefs.numerics.special import gaussian_pdf
from beliefs.transient.volterra import PhiPath, march, resolve_horizon, time_bracket

logger = logging.getLogger(__name__)

# Slices narrower than this many belief steps are integrated over cells, not sampled.
MIN_SAMPLED_WIDTH = 2.0


def green_variance(
    sigma2: float, w: np.ndarray | float, t: np.ndarray | float, v0: np.ndarray | float = 0.0
) -> np.ndarray:
    """v0 e^{-2wt} + sigma2 (1 - e^{-2wt}) / (2w)."""
    rate = 2.0 * np.asarray(w, dtype=float) * np.asarray(t, dtype=float)
    return v0 * np.exp(-rate) + sigma2 * -np.expm1(-rate) / (2.0 * np.asarray(w, dtype=float))


@dataclass(eq=False)
class TransientSolution:
    """Slice means and variances of rho(p, x, t) on the path's time grid.

    Attributes:
        phi_path: The self-consistent interaction mean.
        m: m[i, k] = mean belief of personality p_i at t_k.
        var: var[i, k] = belief variance of p_i at t_k.
        initial_condition: Initial belief distribution.
        w: w(p_i).
        rho0: Normalized rho0(p_i).
        sigma2: Noise variance.
    """

    phi_path: PhiPath
    m: np.ndarray
    var: np.ndarray
    initial_condition: InitialCondition
    w: np.ndarray
    rho0: np.ndarray
    sigma2: float

    @property
    def t_nodes(self) -> np.ndarray:
        """Times of the path."""
        return self.phi_path.t_nodes

    @property
    def p_nodes(self) -> np.ndarray:
        """Personality nodes."""
        return self.phi_path.p_nodes

    def moments_at(self, t: float) -> tuple[np.ndarray, np.ndarray]:
        """(m(p_i, t), var(p_i, t)); m interpolated in time, var exact."""
        self.phi_path.check_time(t)
        k, theta = time_bracket(self.t_nodes, t)
        m = self.m[:, k] if theta == 0.0 else (1 - theta) * self.m[:, k] + theta * self.m[:, k + 1]
        v0 = self.initial_condition.var_at(self.p_nodes)
        return m, green_variance(self.sigma2, self.w, t, v0)

    def mean_belief(self) -> np.ndarray:
        """Population mean belief at every time node."""
        return (trapezoid_weights(self.p_nodes) * self.rho0) @ self.m


def solve_transient(
    spec: ScenarioSpec,
    grid: Grid,
    t_final: float | None = None,
    dt: float | None = None,
    init: InitialCondition | None = None,
) -> TransientSolution:
    """phi(p, t) together with the slice means and variances it implies."""
    init = init or PrejudiceInit()
    t_final, dt = resolve_horizon(spec, grid, t_final, dt)
    result = march(spec, grid, t_final, dt, init)
    dyn = result.dynamics
    v0 = init.var_at(dyn.p_nodes)
    var = green_variance(spec.sigma2, dyn.w[:, None], result.t_nodes[None, :], v0[:, None])
    logger.info(
        "Transient of '%s' to t = %.4g in %d steps (%s start)",
        spec.name,
        t_final,
        len(result.t_nodes) - 1,
        init.label,
    )
    return TransientSolution(
        phi_path=PhiPath(grid.p_nodes, result.t_nodes, result.phi, init),
        m=result.m,
        var=var,
        initial_condition=init,
        w=dyn.w,
        rho0=dyn.rho0,
        sigma2=spec.sigma2,
    )


def _phi_row(path: PhiPath, p: float) -> np.ndarray:
    nodes = path.p_nodes
    i = int(np.clip(np.searchsorted(nodes, p) - 1, 0, len(nodes) - 2))
    theta = (p - nodes[i]) / (nodes[i + 1] - nodes[i])
    return (1 - theta) * path.phi[i] + theta * path.phi[i + 1]


def green_mean_var(
    spec: ScenarioSpec, p: float, x0: float, phi_path: PhiPath, t: float
) -> tuple[float, float]:
    """Mean and variance of the Green function started from a point mass at x0.

    mean = e^{-wt} x0 + (1 - e^{-wt}) alpha u / w
           + abar eta integral_0^t e^{w (tau - t)} phi(p, tau) dtau

    The convolution is a trapezoid over the path's time nodes up to t.

    Raises:
        BeliefDependentZeta: The influence depends on beliefs.
        TimeOutOfRange: t lies outside the path.
    """
    if not spec.belief_independent:
        raise BeliefDependentZeta(f"'{spec.name}' has bounded confidence; no Green function")
    phi_path.check_time(t)
    nodes = phi_path.p_nodes
    weights = trapezoid_weights(nodes)
    rho0 = spec.rho0(nodes)
    rho0 = rho0 / float(weights @ rho0)
    p_arr = np.float64(p)
    eta = float(spec.zeta.personality(p_arr, nodes) @ (weights * rho0))
    alpha = float(spec.alpha(p_arr))
    u = float(spec.prejudice(p_arr))
    w = alpha + (1.0 - alpha) * eta

    k, theta = time_bracket(phi_path.t_nodes, t)
    row = _phi_row(phi_path, p)
    taus = phi_path.t_nodes[: k + 1]
    values = row[: k + 1]
    if theta > 0.0:
        taus = np.append(taus, t)
        values = np.append(values, (1 - theta) * row[k] + theta * row[k + 1])
    convolution = float(trapezoid(np.exp(w * (taus - t)) * values, taus)) if len(taus) > 1 else 0.0

    decay = np.exp(-w * t)
    mean = decay * x0 + (1.0 - decay) * alpha * u / w + (1.0 - alpha) * eta * convolution
    return float(mean), float(green_variance(spec.sigma2, w, t))


def _cell_edges(x_nodes: np.ndarray) -> np.ndarray:
    mids = (x_nodes[1:] + x_nodes[:-1]) / 2
    return np.concatenate([[x_nodes[0]], mids, [x_nodes[-1]]])


def gaussian_slices(grid: Grid, m: np.ndarray, var: np.ndarray, rho0: np.ndarray) -> np.ndarray:
    """rho0(p_i) N(x_j; m_i, var_i) on the grid.

    Wide slices are sampled pointwise; slices narrower than two belief steps
    (point masses included) are integrated over the trapezoid cells so each
    keeps its rho0 mass.
    """
    dx = float(np.max(np.diff(grid.x_nodes)))
    sd = np.sqrt(np.maximum(var, 0.0))
    narrow = sd < MIN_SAMPLED_WIDTH * dx
    wide = ~narrow
    values = np.empty((len(m), grid.n_x))
    values[wide] = gaussian_pdf(grid.x_nodes[None, :], m[wide][:, None], var[wide][:, None])
    if np.any(narrow):
        edges = _cell_edges(grid.x_nodes)[None, :]
        sd_n = sd[narrow][:, None]
        m_n = m[narrow][:, None]
        z = (edges - m_n) / np.where(sd_n > 0, sd_n, 1.0)
        cdf = np.where(sd_n > 0, ndtr(z), (edges >= m_n).astype(float))
        values[narrow] = np.diff(cdf, axis=1) / grid.x_weights[None, :]
    return values * rho0[:, None]


def density_at(
    spec: ScenarioSpec, solution: TransientSolution, t: float, grid: Grid
) -> DensityField:
    """rho(p, x, t) on a grid whose p nodes match the solution's.

    Every slice is Gaussian with the solution's mean and a variance that adds
    the initial spread decayed by e^{-2wt} to the Green variance.

    Raises:
        TimeOutOfRange: t lies outside the path.
    """
    m, var = solution.moments_at(t)
    if grid.n_p != len(solution.p_nodes) or not np.array_equal(grid.p_nodes, solution.p_nodes):
        m = np.interp(grid.p_nodes, solution.p_nodes, m)
        var = np.interp(grid.p_nodes, solution.p_nodes, var)
        rho0 = spec.rho0(grid.p_nodes)
        rho0 = rho0 / float(grid.p_weights @ rho0)
    else:
        rho0 = solution.rho0
    return DensityField(grid, gaussian_slices(grid, m, var, rho0))
