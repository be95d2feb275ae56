"""Successive approximation of the stationary density.

Starts from the zero-drift iterate (every agent Gaussian around its
prejudice) and applies A until the L1 change falls below the tolerance.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

from beliefs.config import settings
from beliefs.errors import NotConverged
from beliefs.model.scenario import ScenarioSpec
from beliefs.numerics.density import DensityField
from beliefs.numerics.grid import Grid
from beliefs.stationary.operator import apply_operator_A, prejudice_density

logger = logging.getLogger(__name__)

GLOBAL_FACTOR = 1.0 / 8.0
LOCAL_FACTOR = 1.0 / 2.0


@dataclass(frozen=True)
class ContractionDiagnosis:
    """Sufficient conditions for A to contract, compared on S_zeta * S_x * X0.

    Attributes:
        global_contraction: lhs < sigma2 / 8, contraction everywhere.
        local_contraction: lhs < sigma2 / 2, contraction near the fixed point.
        lhs: S_zeta * S_x * X0.
        bounds: (sigma2 / 8, sigma2 / 2).
        applicable: False when S_x and X0 come from a truncated belief line.
    """

    global_contraction: bool
    local_contraction: bool
    lhs: float
    bounds: tuple[float, float]
    applicable: bool

    def summary(self) -> str:
        """One-line description for logs and reports."""
        verdict = (
            "global contraction"
            if self.global_contraction
            else "local contraction only"
            if self.local_contraction
            else "convergence unguaranteed"
        )
        scope = "" if self.applicable else " (truncated belief line)"
        low, high = self.bounds
        return f"{verdict}: S_zeta*S_x*X0 = {self.lhs:.6g} vs {low:.6g}/{high:.6g}{scope}"


def contraction_bound_check(spec: ScenarioSpec, grid: Grid | None = None) -> ContractionDiagnosis:
    """Evaluate both contraction conditions for a scenario.

    On the real line the sup of |x| is that of the truncated domain (from
    ``grid`` when given), and the result is marked not applicable.
    """
    domain = spec.belief_domain
    if domain.compact and domain.bounds is not None:
        s_x = domain.sup_abs
        diameter = domain.bounds[1] - domain.bounds[0]
        applicable = True
    else:
        if grid is not None:
            lo, hi = grid.x_bounds
            s_x = max(abs(lo), abs(hi))
        else:
            s_x = spec.truncation_radius(settings.validation_np)
        diameter = 2.0 * s_x
        applicable = False
    x0 = min(spec.zeta.support_radius, diameter)
    lhs = 0.0 if spec.zeta.bound == 0 or x0 == 0 else spec.zeta.bound * s_x * x0
    bounds = (spec.sigma2 * GLOBAL_FACTOR, spec.sigma2 * LOCAL_FACTOR)
    return ContractionDiagnosis(
        global_contraction=lhs < bounds[0],
        local_contraction=lhs < bounds[1],
        lhs=lhs,
        bounds=bounds,
        applicable=applicable,
    )


@dataclass
class FixedPointReport:
    """Progress of a successive-approximation run."""

    iterations: int = 0
    l1_deltas: list[float] = field(default_factory=list)
    converged: bool = False
    final_residual: float = math.nan
    tolerance: float = 0.0
    relaxation: float = 1.0
    diagnosis: ContractionDiagnosis | None = None

    @property
    def convergence_unguaranteed(self) -> bool:
        """True when neither contraction condition holds."""
        return self.diagnosis is not None and not self.diagnosis.local_contraction

    def to_dict(self) -> dict[str, object]:
        """Key/value form for the run report."""
        entries: dict[str, object] = {
            "iterations": self.iterations,
            "converged": self.converged,
            "final_residual": self.final_residual,
            "tolerance": self.tolerance,
            "relaxation": self.relaxation,
            "convergence_unguaranteed": self.convergence_unguaranteed,
        }
        if self.diagnosis is not None:
            entries["contraction"] = self.diagnosis.summary()
        return entries


def successive_approximation(
    spec: ScenarioSpec,
    grid: Grid,
    tol: float | None = None,
    max_iter: int | None = None,
    relaxation: float | None = None,
    initial: DensityField | None = None,
    threads: int | None = None,
) -> tuple[DensityField, FixedPointReport]:
    """Iterate rho <- (1 - lambda) rho + lambda A{rho} to a fixed point.

    Args:
        spec: The scenario.
        grid: Discretization of the plane.
        tol: L1 tolerance on A{rho} - rho (default from settings).
        max_iter: Iteration budget (default from settings).
        relaxation: lambda in (0, 1]; 1 is plain successive approximation.
        initial: Starting density; defaults to the zero-drift iterate.
        threads: Worker threads inside A.

    Returns:
        The last iterate and its report; the returned density satisfies
        ||A{rho} - rho||_1 = report.final_residual.

    Raises:
        NotConverged: The budget ran out; carries the report and last iterate.
    """
    tol = settings.fixed_point_tol if tol is None else tol
    max_iter = settings.fixed_point_max_iter if max_iter is None else max_iter
    relaxation = settings.relaxation if relaxation is None else relaxation
    if tol <= 0:
        raise ValueError(f"tolerance must be positive, got {tol}")
    if not 0 < relaxation <= 1:
        raise ValueError(f"relaxation must lie in (0, 1], got {relaxation}")

    diagnosis = contraction_bound_check(spec, grid)
    report = FixedPointReport(tolerance=tol, relaxation=relaxation, diagnosis=diagnosis)
    if not diagnosis.local_contraction:
        logger.warning("Contraction bound not met (%s); iterating anyway", diagnosis.summary())

    rho = initial if initial is not None else prejudice_density(spec, grid)
    for k in range(1, max_iter + 1):
        image = apply_operator_A(spec, rho, threads)
        residual = image.l1_distance(rho)
        report.iterations = k
        report.final_residual = residual
        if residual <= tol:
            report.converged = True
            report.l1_deltas.append(residual)
            logger.info("Fixed point after %d iterations, residual %.3e", k, residual)
            return rho, report
        if relaxation == 1.0:
            nxt = image
        else:
            nxt = DensityField(grid, (1.0 - relaxation) * rho.values + relaxation * image.values)
        report.l1_deltas.append(nxt.l1_distance(rho))
        if k % 100 == 0:
            logger.debug("Iteration %d: residual %.3e", k, residual)
        rho = nxt

    logger.warning(
        "Successive approximation stopped after %d iterations, residual %.3e > %.1e",
        max_iter,
        report.final_residual,
        tol,
    )
    raise NotConverged(
        f"no fixed point within {max_iter} iterations (residual {report.final_residual:.3e})",
        report,
        rho,
    )
