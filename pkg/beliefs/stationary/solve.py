"""Pick the right stationary solver for a scenario and collect its outputs."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from beliefs.errors import NotConverged, UnsupportedScenario
from beliefs.model.scenario import ScenarioSpec
from beliefs.numerics.density import DensityField
from beliefs.numerics.grid import Grid
from beliefs.stationary.closed_form import (
    GaussianFamilySolution,
    closed_form_product,
    solve_unbounded,
)
from beliefs.stationary.fixed_point import (
    ContractionDiagnosis,
    FixedPointReport,
    contraction_bound_check,
    successive_approximation,
)
from beliefs.stationary.fredholm import FredholmMethod
from beliefs.stationary.modes import find_modes

logger = logging.getLogger(__name__)

METHODS = ("auto", "closed-form", "fredholm", "neumann", "successive")


@dataclass(eq=False)
class StationaryResult:
    """A stationary density with the solver's bookkeeping."""

    method: str
    density: DensityField
    marginal: np.ndarray
    diagnosis: ContractionDiagnosis
    gaussian: GaussianFamilySolution | None = None
    report: FixedPointReport | None = None
    modes: list[float] = field(default_factory=list)

    @property
    def converged(self) -> bool:
        """False only for an iterative run that ran out of iterations."""
        return self.report is None or self.report.converged

    def to_dict(self) -> dict[str, object]:
        """Key/value form for the run report."""
        entries: dict[str, object] = {
            "method": self.method,
            "converged": self.converged,
            "mass": self.density.mass(),
            "modes": " ".join(f"{x:.6g}" for x in self.modes) or "none",
            "contraction": self.diagnosis.summary(),
        }
        if self.gaussian is not None:
            entries["phi_star_min"] = float(self.gaussian.phi_star.min())
            entries["phi_star_max"] = float(self.gaussian.phi_star.max())
        if self.report is not None:
            entries.update({f"fixed_point_{k}": v for k, v in self.report.to_dict().items()})
        return entries


def select_method(spec: ScenarioSpec) -> str:
    """Closed form for product form, Fredholm for other unbounded confidence, else iterate."""
    if spec.product_form:
        return "closed-form"
    if spec.belief_independent:
        return "fredholm"
    return "successive"


def solve_stationary(
    spec: ScenarioSpec,
    grid: Grid,
    method: str = "auto",
    tol: float | None = None,
    max_iter: int | None = None,
    relaxation: float | None = None,
    threads: int | None = None,
) -> StationaryResult:
    """Run the selected stationary solver.

    An iterative run that exhausts its budget is returned with
    ``converged`` False instead of raising.
    """
    if method not in METHODS:
        raise ValueError(f"unknown method '{method}'; choose from {', '.join(METHODS)}")
    chosen = select_method(spec) if method == "auto" else method
    if chosen != "successive" and not spec.belief_independent:
        raise UnsupportedScenario(f"method '{chosen}' needs belief-independent influence")
    logger.info("Stationary solve of '%s' by %s on %dx%d", spec.name, chosen, *grid.shape)

    diagnosis = contraction_bound_check(spec, grid)
    if chosen == "successive":
        try:
            density, report = successive_approximation(
                spec, grid, tol=tol, max_iter=max_iter, relaxation=relaxation, threads=threads
            )
        except NotConverged as e:
            assert e.field is not None
            density, report = e.field, e.report
        marginal = density.marginal_x()
        return StationaryResult(
            method=chosen,
            density=density,
            marginal=marginal,
            diagnosis=diagnosis,
            report=report,
            modes=find_modes(grid.x_nodes, marginal),
        )

    if chosen == "closed-form":
        gaussian = closed_form_product(spec, grid)
    else:
        fredholm = FredholmMethod.NEUMANN if chosen == "neumann" else FredholmMethod.NYSTROM
        gaussian = solve_unbounded(spec, grid, fredholm)
    marginal = gaussian.marginal(grid.x_nodes)
    return StationaryResult(
        method=chosen,
        density=gaussian.to_density(grid),
        marginal=marginal,
        diagnosis=diagnosis,
        gaussian=gaussian,
        modes=find_modes(grid.x_nodes, marginal),
    )
