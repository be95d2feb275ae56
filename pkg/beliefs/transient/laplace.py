"""Laplace-domain cross-checks of a computed phi path.

The transform of the self-consistency condition is, for every s, a Fredholm
equation in p. In product form phi does not depend on p and the equation
collapses to phi_hat(s) = (I0 + I1) / (1 - I2).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from beliefs.config import settings
from beliefs.errors import PathTooShort, PoleOnPath, UnsupportedScenario
from beliefs.model.scenario import ScenarioSpec
from beliefs.numerics.grid import Grid, trapezoid_weights, uniform_grid
from beliefs.numerics.linalg import solve_dense
from beliefs.transient.volterra import MeanDynamics, PhiPath, mean_dynamics

logger = logging.getLogger(__name__)

TAIL_TOL = 1e-10  # largest allowed e^{-s t_final}
POLE_TOL = 1e-12
RESIDUAL_FLOOR = 1e-9


@dataclass(frozen=True)
class LaplaceResidual:
    """Numerical against semi-analytic transform at one frequency."""

    s: float
    numeric: float  # largest |phi_hat| over p from the time-domain path
    reference: float  # same from the Laplace-domain equation
    residual: float  # max_p |numeric - reference| / max(max_p |reference|, floor)


def _personality_grid(spec: ScenarioSpec, n: int | None = None) -> Grid:
    return uniform_grid(spec.personality_domain, (-1.0, 1.0), n or settings.grid_np, 3)


def _check_poles(s: complex, w: np.ndarray) -> np.ndarray:
    shifted = s + w
    if np.any(np.abs(shifted) <= POLE_TOL * max(1.0, abs(s))):
        raise PoleOnPath(f"s + w(p) vanishes on the personality grid at s = {s}")
    return shifted


def laplace_I2(spec: ScenarioSpec, s: complex, grid: Grid | None = None) -> complex:  # noqa: N802
    """I2(s) = integral of zeta1 zeta2 rho0 abar / (s + w) over personalities.

    Raises:
        UnsupportedScenario: The influence is not in product form.
        PoleOnPath: s + w(p) vanishes at a node.
    """
    if not spec.product_form or spec.zeta.factors is None:
        raise UnsupportedScenario(f"scenario '{spec.name}' is not in product form")
    grid = grid or _personality_grid(spec)
    dyn = mean_dynamics(spec, grid)
    zeta1, zeta2 = spec.zeta.factors
    p = grid.p_nodes
    factors = np.broadcast_to(zeta1(p) * zeta2(p), p.shape)
    shifted = _check_poles(s, dyn.w)
    value = np.sum(grid.p_weights * factors * dyn.rho0 * (1.0 - dyn.alpha) / shifted)
    return complex(value) if np.iscomplexobj(value) else float(value)


def _product_form_transform(
    spec: ScenarioSpec, dyn: MeanDynamics, weights: np.ndarray, x0: np.ndarray, s: float
) -> np.ndarray:
    assert spec.zeta.factors is not None
    _, zeta2 = spec.zeta.factors
    z2 = np.broadcast_to(zeta2(dyn.p_nodes), dyn.p_nodes.shape)
    shifted = _check_poles(s, dyn.w)
    carried = weights * z2 * dyn.rho0
    eta = float(carried.sum())
    if eta == 0:
        return np.zeros_like(dyn.p_nodes)
    i0 = float(carried @ (x0 / shifted)) / eta
    i1 = float(carried @ (dyn.alpha * dyn.prejudice / (s * shifted))) / eta
    i2 = float(laplace_I2(spec, s, _grid_from(dyn.p_nodes)))
    # Personalities with eta = 0 feel no influence and keep phi = 0.
    return np.where(dyn.eta > 0, (i0 + i1) / (1.0 - i2), 0.0)


def _grid_from(p_nodes: np.ndarray) -> Grid:
    return Grid(
        p_nodes=p_nodes,
        x_nodes=np.array([-1.0, 0.0, 1.0]),
        p_weights=trapezoid_weights(p_nodes),
        x_weights=trapezoid_weights(np.array([-1.0, 0.0, 1.0])),
    )


def _general_transform(dyn: MeanDynamics, x0: np.ndarray, s: float) -> np.ndarray:
    shifted = _check_poles(s, dyn.w)
    source = dyn.coupling @ ((x0 + dyn.alpha * dyn.prejudice / s) / shifted)
    system = np.eye(len(dyn.p_nodes)) - dyn.coupling * (dyn.feedback / shifted)[None, :]
    return solve_dense(system, source)


def transform_path(phi_path: PhiPath, s: float) -> np.ndarray:
    """Integral of e^{-st} phi(p, t) dt on the path, trapezoid with end corrections.

    The end corrections subtract the leading Euler-Maclaurin term using
    second-order one-sided derivatives, so uniform paths converge at fourth order.
    """
    t = phi_path.t_nodes
    f = np.exp(-s * t)[None, :] * phi_path.phi
    h = float(t[1] - t[0])
    total = h * (f.sum(axis=1) - 0.5 * (f[:, 0] + f[:, -1]))
    if len(t) >= 3 and np.allclose(np.diff(t), h, rtol=1e-9, atol=0.0):
        d_start = (-3 * f[:, 0] + 4 * f[:, 1] - f[:, 2]) / (2 * h)
        d_end = (3 * f[:, -1] - 4 * f[:, -2] + f[:, -3]) / (2 * h)
        total -= h**2 / 12 * (d_end - d_start)
    return total


def laplace_consistency_check(
    spec: ScenarioSpec, phi_path: PhiPath, s_samples: list[float]
) -> list[LaplaceResidual]:
    """Compare the transform of a computed path with the Laplace-domain solution.

    Product-form scenarios use the scalar ratio; other belief-independent
    scenarios solve the transformed Fredholm equation by Nystrom per s.

    Raises:
        PathTooShort: e^{-s t_final} > 1e-10 for some sample.
        PoleOnPath: s + w(p) vanishes at a node.
    """
    for s in s_samples:
        if s <= 0:
            raise ValueError(f"Laplace samples must be positive, got {s}")
        if math.exp(-s * phi_path.t_final) > TAIL_TOL:
            raise PathTooShort(
                f"e^(-s t_final) = {math.exp(-s * phi_path.t_final):.2e} at s = {s}; "
                f"the path must reach t >= {-math.log(TAIL_TOL) / s:.4g}"
            )
    grid = _grid_from(phi_path.p_nodes)
    dyn = mean_dynamics(spec, grid)
    x0 = phi_path.initial.mean_at(spec, dyn.p_nodes)

    residuals = []
    for s in s_samples:
        numeric = transform_path(phi_path, s)
        if spec.product_form:
            reference = _product_form_transform(spec, dyn, grid.p_weights, x0, s)
        else:
            reference = _general_transform(dyn, x0, s)
        scale = max(float(np.max(np.abs(reference))), RESIDUAL_FLOOR)
        residual = float(np.max(np.abs(numeric - reference))) / scale
        logger.debug("Laplace check at s = %g: residual %.3e", s, residual)
        residuals.append(
            LaplaceResidual(
                s=float(s),
                numeric=float(np.max(np.abs(numeric))),
                reference=float(np.max(np.abs(reference))),
                residual=residual,
            )
        )
    return residuals
