"""Euler-Maruyama stepping of the agent beliefs.

Each agent moves by

    dX_i = [abar(P_i)/U sum_j zeta(|X_j - X_i|, P_i, P_j) (X_j - X_i)
            + alpha(P_i) (u(P_i) - X_i)] dt + sigma dW_i

with every agent reading the beliefs of time t. The 1/U factor counts all
pairs, including those zeta switches off.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum

import numpy as np

from beliefs.config import settings
from beliefs.errors import StepTooLarge
from beliefs.mcsim.ensemble import AgentEnsemble, block_slices, reflect, standard_normals
from beliefs.model.scenario import ScenarioSpec

logger = logging.getLogger(__name__)

MAX_STEP_RATE = 0.5  # dt * (max alpha + S_zeta)
DEFAULT_STEP_RATE = 1e-3
STATIC_KERNEL_LIMIT = 4096  # largest U whose personality kernel is kept in memory


class InteractionPath(Enum):
    """How the pairwise influence sum is evaluated."""

    PRODUCT = "product"  # zeta1(P_i) (S1 - X_i S0), O(U)
    STATIC_KERNEL = "static-kernel"  # K X - X rowsum(K), K fixed over the run
    PAIRWISE = "pairwise"  # full O(U^2) with the belief factor


def select_path(spec: ScenarioSpec) -> InteractionPath:
    """Fastest exact path for the scenario's interaction function."""
    if spec.product_form:
        return InteractionPath.PRODUCT
    if spec.belief_independent:
        return InteractionPath.STATIC_KERNEL
    return InteractionPath.PAIRWISE


def default_dt(spec: ScenarioSpec) -> float:
    """1e-3 / max(1, S_zeta)."""
    return DEFAULT_STEP_RATE / max(1.0, spec.zeta.bound)


def check_step(ens: AgentEnsemble, dt: float) -> None:
    """Raise StepTooLarge unless dt * (max alpha + S_zeta) < 0.5."""
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    rate = float(np.max(ens.coefficients.alpha)) + ens.spec.zeta.bound
    if dt * rate >= MAX_STEP_RATE:
        raise StepTooLarge(
            f"dt * (max alpha + S_zeta) = {dt * rate:.3g} must stay below {MAX_STEP_RATE}"
        )


def _kernel_rows(ens: AgentEnsemble, rows: slice | np.ndarray) -> np.ndarray:
    if ens.size <= STATIC_KERNEL_LIMIT:
        return ens.personality_kernel()[rows]
    p = ens.personalities
    block = ens.spec.zeta.personality(p[rows][:, None], p[None, :])
    return np.broadcast_to(block, (len(p[rows]), ens.size)).astype(float)


def _block_sums(
    ens: AgentEnsemble, x: np.ndarray, rows: slice | np.ndarray, path: InteractionPath
) -> np.ndarray:
    kernel = _kernel_rows(ens, rows)
    if path is InteractionPath.STATIC_KERNEL:
        return kernel @ x - x[rows] * kernel.sum(axis=1)
    gap = x[None, :] - x[rows][:, None]
    if ens.spec.zeta.belief is not None:
        kernel = kernel * ens.spec.zeta.belief(np.abs(gap))
    return np.sum(kernel * gap, axis=1)


def interaction_sums(
    ens: AgentEnsemble,
    path: InteractionPath | None = None,
    threads: int | None = None,
) -> np.ndarray:
    """sum_j zeta(|X_j - X_i|, P_i, P_j) (X_j - X_i) for every agent i.

    Blocks of agents are reduced independently in a fixed order, so the
    result does not depend on the number of threads.
    """
    path = path or select_path(ens.spec)
    x = ens.beliefs
    if path is InteractionPath.PRODUCT:
        z1, z2 = ens.coefficients.zeta1, ens.coefficients.zeta2
        if z1 is None or z2 is None:
            raise ValueError(f"'{ens.spec.name}' is not in product form")
        return z1 * (float(z2 @ x) - x * float(z2.sum()))

    blocks = block_slices(ens.size)
    threads = threads or settings.threads
    if threads <= 1 or len(blocks) == 1:
        return np.concatenate([_block_sums(ens, x, rows, path) for rows in blocks])
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return np.concatenate(list(pool.map(lambda rows: _block_sums(ens, x, rows, path), blocks)))


def drift(ens: AgentEnsemble, threads: int | None = None) -> np.ndarray:
    """Noise-free drift of every agent at the current beliefs."""
    coeffs = ens.coefficients
    social = (1.0 - coeffs.alpha) / ens.size * interaction_sums(ens, threads=threads)
    return social + coeffs.alpha * (coeffs.prejudice - ens.beliefs)


def mc_step(ens: AgentEnsemble, dt: float, threads: int | None = None) -> AgentEnsemble:
    """Advance every agent by one synchronous Euler-Maruyama step, in place.

    Raises:
        StepTooLarge: dt * (max alpha + S_zeta) >= 0.5.
    """
    check_step(ens, dt)
    step = ens.step_count + 1
    noise = standard_normals(ens.seed, step, ens.size)
    moved = ens.beliefs + dt * drift(ens, threads) + ens.spec.sigma * np.sqrt(dt) * noise
    ens.beliefs = reflect(moved, ens.spec.belief_domain)
    ens.step_count = step
    ens.time += dt
    return ens


@dataclass(frozen=True)
class DriftDiagnostic:
    """Drift at the two extreme agents."""

    max_abs_belief: float
    x_max: float
    x_min: float
    drift_at_max: float
    drift_at_min: float

    @property
    def restoring(self) -> bool:
        """True when both extremes are pushed back toward the bulk."""
        return self.drift_at_max <= 0.0 and self.drift_at_min >= 0.0

    def to_dict(self) -> dict[str, float | bool]:
        """Flat form for reports."""
        return {
            "max_abs_belief": self.max_abs_belief,
            "x_max": self.x_max,
            "x_min": self.x_min,
            "drift_at_max": self.drift_at_max,
            "drift_at_min": self.drift_at_min,
            "restoring": self.restoring,
        }


def drift_diagnostic(ens: AgentEnsemble) -> DriftDiagnostic:
    """Noise-free drift of the agents holding the largest and smallest belief."""
    x = ens.beliefs
    rows = np.array([int(np.argmax(x)), int(np.argmin(x))])
    sums = _block_sums(ens, x, rows, InteractionPath.PAIRWISE)
    alpha = ens.coefficients.alpha[rows]
    u = ens.coefficients.prejudice[rows]
    values = (1.0 - alpha) / ens.size * sums + alpha * (u - x[rows])
    return DriftDiagnostic(
        max_abs_belief=float(np.max(np.abs(x))),
        x_max=float(x[rows[0]]),
        x_min=float(x[rows[1]]),
        drift_at_max=float(values[0]),
        drift_at_min=float(values[1]),
    )
