"""Exception hierarchy shared by the solvers, the simulator and the CLI."""

from __future__ import annotations

from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from beliefs.numerics.density import DensityField
    from beliefs.stationary.fixed_point import FixedPointReport


class BeliefFluidError(Exception):
    """Base class for every error raised by the toolkit."""


# --- Scenario definition ---


class ScenarioError(BeliefFluidError, ValueError):
    """A scenario violates one of its invariants or cannot be built."""


class InvalidStubbornness(ScenarioError):
    """Alpha leaves [0, 1] or its infimum vanishes."""


class NonPositiveNoise(ScenarioError):
    """The endogenous noise variance is not strictly positive."""


class UnnormalizedRho0(ScenarioError):
    """The personality density does not integrate to one."""


class ProductFormMismatch(ScenarioError):
    """Declared product factors do not reproduce the interaction kernel."""


class BeliefDependentZeta(ScenarioError):
    """An operation that needs belief-independent interactions got bounded confidence."""


class VanishingInfluence(ScenarioError):
    """inf eta(p) is zero although agents interact."""


class UnknownPreset(ScenarioError):
    """No preset is registered under the requested name."""


class UnsupportedScenario(ScenarioError):
    """The requested analysis does not exist for this kind of scenario."""


# --- Discretization ---


class GridError(BeliefFluidError, ValueError):
    """A grid cannot be built as requested."""


class DomainEmpty(GridError):
    """Too few nodes or a degenerate interval."""


# --- Numerics ---


class NumericalError(BeliefFluidError, ArithmeticError):
    """A numerical procedure broke down."""


class SingularMatrix(NumericalError):
    """An LU pivot fell below the relative threshold."""


class OverflowGuard(NumericalError):
    """A log-density became non-finite before normalization."""


class SeriesDiverges(NumericalError):
    """The Neumann series was requested for a kernel with norm >= 1."""


class DenominatorVanishes(NumericalError):
    """The product-form ratio for phi* has a vanishing denominator."""


class PoleOnPath(NumericalError):
    """s + w(p) vanishes at a quadrature node."""


class NotConverged(NumericalError):
    """Successive approximation exhausted its iteration budget."""

    def __init__(
        self, message: str, report: FixedPointReport, field: DensityField | None = None
    ) -> None:
        """Keep the report and last iterate so callers can still write them out."""
        super().__init__(message)
        self.report = report
        self.field = field


# --- Time stepping ---


class StepTooLarge(BeliefFluidError, ValueError):
    """The requested time step breaks the stability or accuracy guard."""


class TimeOutOfRange(BeliefFluidError, ValueError):
    """A time outside the computed path was requested."""


class PathTooShort(BeliefFluidError, ValueError):
    """The phi path does not extend far enough for a Laplace transform."""
