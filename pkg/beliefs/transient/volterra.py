"""Time marching of the self-consistent interaction mean phi(p, t).

Under unbounded confidence every personality slice stays Gaussian, so the
transient is fixed by the slice means

    m(p, t) = e^{-wt} x0(p) + (1 - e^{-wt}) alpha u / w + abar eta J(p, t)
    J(p, t) = integral_0^t e^{w (tau - t)} phi(p, tau) dtau

with phi(p, t) = (1/eta(p)) integral zeta(p, p') rho0(p') m(p', t) dp'.
J advances by the exact exponential recurrence over a piecewise-linear phi,
and each new phi is found by one dense solve over p.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from beliefs.errors import BeliefDependentZeta, StepTooLarge, TimeOutOfRange
from beliefs.model.initial import InitialCondition, PrejudiceInit
from beliefs.model.scenario import ScenarioSpec, personality_density
from beliefs.numerics.grid import Grid
from beliefs.numerics.linalg import DenseSolver

logger = logging.getLogger(__name__)

MAX_STEP_RATE = 0.5  # dt * max w
DEFAULT_STEP_RATE = 0.01
HORIZON_TIME_CONSTANTS = 20.0
SERIES_SWITCH = 1e-3  # below this z = w dt the step weights use their Taylor series


@dataclass(eq=False)
class PhiPath:
    """phi(p, t) sampled on personality nodes and an increasing time grid.

    Attributes:
        p_nodes: Personality nodes (rows of phi).
        t_nodes: Times, starting at 0.
        phi: phi[i, k] = phi(p_i, t_k).
        initial: The initial condition the path was computed from.
    """

    p_nodes: np.ndarray
    t_nodes: np.ndarray
    phi: np.ndarray
    initial: InitialCondition

    @property
    def t_final(self) -> float:
        """Last time on the path."""
        return float(self.t_nodes[-1])

    def check_time(self, t: float) -> None:
        """Raise TimeOutOfRange unless 0 <= t <= t_final."""
        if t < 0 or t > self.t_final * (1 + 1e-12):
            raise TimeOutOfRange(f"t = {t} outside the computed path [0, {self.t_final}]")

    def at(self, t: float) -> np.ndarray:
        """phi(p_i, t) by linear interpolation in time."""
        self.check_time(t)
        k, theta = time_bracket(self.t_nodes, t)
        if theta == 0.0:
            return self.phi[:, k].copy()
        return (1 - theta) * self.phi[:, k] + theta * self.phi[:, k + 1]


def time_bracket(t_nodes: np.ndarray, t: float) -> tuple[int, float]:
    """Index k and fraction theta with t = (1 - theta) t_k + theta t_{k+1}."""
    k = int(np.searchsorted(t_nodes, t, side="right")) - 1
    k = min(max(k, 0), len(t_nodes) - 1)
    if k == len(t_nodes) - 1:
        return k, 0.0
    theta = (t - t_nodes[k]) / (t_nodes[k + 1] - t_nodes[k])
    return k, float(theta)


def step_weights(w: np.ndarray, h: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Decay e^{-wh} and the weights (a, b) of phi_{k-1}, phi_k in one exact step.

    a = integral_0^h e^{-ws} s/h ds,  b = integral_0^h e^{-ws} (1 - s/h) ds.
    """
    z = w * h
    decay = np.exp(-z)
    small = z < SERIES_SWITCH
    zs = np.where(small, 1.0, z)
    first = np.where(small, 1 - z / 2 + z**2 / 6 - z**3 / 24, -np.expm1(-zs) / zs)
    second = np.where(
        small, 0.5 - z / 3 + z**2 / 8 - z**3 / 30, (-np.expm1(-zs) - zs * np.exp(-zs)) / zs**2
    )
    a = h * second
    b = h * (first - second)
    return decay, a, b


@dataclass(frozen=True)
class MeanDynamics:
    """Coefficients of the linear slice-mean dynamics on a personality grid."""

    p_nodes: np.ndarray
    rho0: np.ndarray
    eta: np.ndarray
    w: np.ndarray
    alpha: np.ndarray
    prejudice: np.ndarray
    coupling: np.ndarray  # M[i, j] = zeta_ij wp_j rho0_j / eta_i

    @property
    def feedback(self) -> np.ndarray:
        """abar(p) eta(p), the weight of J in m."""
        return (1.0 - self.alpha) * self.eta


def mean_dynamics(spec: ScenarioSpec, grid: Grid) -> MeanDynamics:
    """Assemble eta, w and the coupling matrix for a belief-independent scenario."""
    if not spec.belief_independent:
        raise BeliefDependentZeta(
            f"transients need belief-independent influence; '{spec.name}' has bounded confidence"
        )
    p = grid.p_nodes
    rho0 = personality_density(spec, grid)
    zeta = spec.zeta.matrix(p)
    eta = zeta @ (grid.p_weights * rho0)
    alpha = spec.alpha(p)
    inv_eta = np.divide(1.0, eta, out=np.zeros_like(eta), where=eta > 0)
    return MeanDynamics(
        p_nodes=p,
        rho0=rho0,
        eta=eta,
        w=alpha + (1.0 - alpha) * eta,
        alpha=alpha,
        prejudice=spec.prejudice(p),
        coupling=inv_eta[:, None] * zeta * (grid.p_weights * rho0)[None, :],
    )


def slowest_relaxation_rate(spec: ScenarioSpec, grid: Grid) -> float:
    """Decay rate of the slowest mode of the linearized mean dynamics.

    Minus the spectral abscissa of -diag(w) + diag(abar) zeta diag(wp rho0).
    """
    dyn = mean_dynamics(spec, grid)
    generator = -np.diag(dyn.w) + dyn.feedback[:, None] * dyn.coupling
    rate = -float(np.max(np.linalg.eigvals(generator).real))
    return max(rate, float(np.min(dyn.alpha)))


def default_horizon(spec: ScenarioSpec, grid: Grid) -> tuple[float, float]:
    """(t_final, dt): twenty slowest time constants, steps of 0.01 / max w."""
    dyn = mean_dynamics(spec, grid)
    t_final = HORIZON_TIME_CONSTANTS / slowest_relaxation_rate(spec, grid)
    dt = DEFAULT_STEP_RATE / float(np.max(dyn.w))
    return t_final, dt


def resolve_horizon(
    spec: ScenarioSpec, grid: Grid, t_final: float | None, dt: float | None
) -> tuple[float, float]:
    """Fill in whichever of t_final and dt the caller left out."""
    if t_final is None or dt is None:
        default_t, default_dt = default_horizon(spec, grid)
        t_final = default_t if t_final is None else t_final
        dt = default_dt if dt is None else dt
    return t_final, dt


@dataclass(eq=False)
class MarchResult:
    """phi and m on the time grid."""

    t_nodes: np.ndarray
    phi: np.ndarray
    m: np.ndarray
    dynamics: MeanDynamics


def march(
    spec: ScenarioSpec,
    grid: Grid,
    t_final: float,
    dt: float,
    init: InitialCondition,
) -> MarchResult:
    """Advance phi and the slice means from t = 0 to t_final."""
    if dt <= 0 or t_final <= 0:
        raise ValueError(f"dt and t_final must be positive, got dt={dt}, t_final={t_final}")
    dyn = mean_dynamics(spec, grid)
    w_max = float(np.max(dyn.w))
    if dt * w_max > MAX_STEP_RATE:
        raise StepTooLarge(f"dt * max w = {dt * w_max:.3g} exceeds {MAX_STEP_RATE}")

    n_steps = max(1, math.ceil(t_final / dt - 1e-9))
    h = t_final / n_steps
    t_nodes = np.linspace(0.0, t_final, n_steps + 1)
    decay, a, b = step_weights(dyn.w, h)

    x0 = init.mean_at(spec, dyn.p_nodes)
    target = dyn.alpha * dyn.prejudice / dyn.w
    c = dyn.feedback
    closure = DenseSolver(np.eye(len(dyn.p_nodes)) - dyn.coupling * (c * b)[None, :])

    phi = np.empty((len(dyn.p_nodes), n_steps + 1))
    m = np.empty_like(phi)
    m[:, 0] = x0
    phi[:, 0] = dyn.coupling @ x0
    j = np.zeros_like(x0)
    for k in range(1, n_steps + 1):
        e = np.exp(-dyn.w * t_nodes[k])
        # Everything in m_k except the b * phi_k share of J_k.
        known_j = decay * j + a * phi[:, k - 1]
        partial = e * x0 + (1.0 - e) * target + c * known_j
        phi[:, k] = closure.solve(dyn.coupling @ partial)
        j = known_j + b * phi[:, k]
        m[:, k] = partial + c * b * phi[:, k]
    logger.debug("Marched %d steps of %.4g up to t = %.4g", n_steps, h, t_final)
    return MarchResult(t_nodes=t_nodes, phi=phi, m=m, dynamics=dyn)


def solve_phi_volterra(
    spec: ScenarioSpec,
    grid: Grid,
    t_final: float | None = None,
    dt: float | None = None,
    init: InitialCondition | None = None,
) -> PhiPath:
    """phi(p, t) on [0, t_final] from the self-consistency condition.

    Args:
        spec: A belief-independent scenario.
        grid: Personality nodes used for the quadrature.
        t_final: Horizon; defaults to twenty slowest time constants.
        dt: Step; defaults to 0.01 / max w. Rounded down to divide t_final.
        init: Initial beliefs; defaults to point masses at the prejudice.

    Raises:
        BeliefDependentZeta: The influence depends on beliefs.
        StepTooLarge: dt * max w > 0.5.
    """
    init = init or PrejudiceInit()
    t_final, dt = resolve_horizon(spec, grid, t_final, dt)
    result = march(spec, grid, t_final, dt, init)
    return PhiPath(p_nodes=grid.p_nodes, t_nodes=result.t_nodes, phi=result.phi, initial=init)
