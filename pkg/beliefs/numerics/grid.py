"""Tensor grids over the personality-belief plane with trapezoidal weights."""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from beliefs.errors import DomainEmpty

if TYPE_CHECKING:
    from beliefs.model.scenario import ScenarioSpec

MIN_NODES = 3


def trapezoid_weights(nodes: np.ndarray) -> np.ndarray:
    """Return composite trapezoid weights for sorted, possibly non-uniform nodes."""
    nodes = np.asarray(nodes, dtype=float)
    gaps = np.diff(nodes)
    weights = np.zeros_like(nodes)
    weights[:-1] += gaps / 2
    weights[1:] += gaps / 2
    return weights


@dataclass(frozen=True, eq=False)
class Grid:
    """Discretization of the (p, x) plane.

    Attributes:
        p_nodes: Sorted personality samples.
        x_nodes: Sorted belief samples.
        p_weights: Trapezoid weights over p_nodes.
        x_weights: Trapezoid weights over x_nodes.
    """

    p_nodes: np.ndarray
    x_nodes: np.ndarray
    p_weights: np.ndarray
    x_weights: np.ndarray

    @property
    def n_p(self) -> int:
        """Number of personality nodes."""
        return len(self.p_nodes)

    @property
    def n_x(self) -> int:
        """Number of belief nodes."""
        return len(self.x_nodes)

    @property
    def shape(self) -> tuple[int, int]:
        """Shape of field arrays living on this grid."""
        return self.n_p, self.n_x

    @property
    def x_bounds(self) -> tuple[float, float]:
        """First and last belief node."""
        return float(self.x_nodes[0]), float(self.x_nodes[-1])

    @property
    def p_bounds(self) -> tuple[float, float]:
        """First and last personality node."""
        return float(self.p_nodes[0]), float(self.p_nodes[-1])

    def nearest_x(self, x: float) -> int:
        """Index of the belief node closest to x (lowest index on ties)."""
        return int(np.argmin(np.abs(self.x_nodes - x)))

    def same_nodes(self, other: Grid) -> bool:
        """True if both grids sample the same points."""
        return (
            self.shape == other.shape
            and np.array_equal(self.p_nodes, other.p_nodes)
            and np.array_equal(self.x_nodes, other.x_nodes)
        )


def _uniform_nodes(lo: float, hi: float, n: int, axis: str) -> np.ndarray:
    if n < MIN_NODES:
        raise DomainEmpty(f"{axis} axis needs at least {MIN_NODES} nodes, got {n}")
    if not (np.isfinite(lo) and np.isfinite(hi)) or hi <= lo:
        raise DomainEmpty(f"{axis} interval [{lo}, {hi}] is empty or unbounded")
    return np.linspace(lo, hi, n)


def uniform_grid(
    p_bounds: tuple[float, float],
    x_bounds: tuple[float, float],
    n_p: int,
    n_x: int,
) -> Grid:
    """Build a uniform tensor grid on explicit intervals."""
    p_nodes = _uniform_nodes(*p_bounds, n_p, "personality")
    x_nodes = _uniform_nodes(*x_bounds, n_x, "belief")
    return Grid(
        p_nodes=p_nodes,
        x_nodes=x_nodes,
        p_weights=trapezoid_weights(p_nodes),
        x_weights=trapezoid_weights(x_nodes),
    )


def make_grid(
    spec: ScenarioSpec,
    n_p: int,
    n_x: int,
    x_reach: float | None = None,
) -> Grid:
    """Discretize a scenario's personality and belief domains.

    Unbounded belief lines are truncated symmetrically at the scenario's
    default radius, widened to ``x_reach`` when a caller needs room for an
    initial condition outside the prejudice range.

    Args:
        spec: The scenario whose domains are sampled.
        n_p: Personality nodes (>= 3).
        n_x: Belief nodes (>= 3).
        x_reach: Optional minimum truncation radius for unbounded lines.

    Returns:
        A uniform Grid with trapezoid weights.
    """
    if spec.belief_domain.compact:
        x_bounds = spec.belief_domain.bounds
    else:
        radius = spec.truncation_radius()
        if x_reach is not None:
            radius = max(radius, x_reach)
        x_bounds = (-radius, radius)
    return uniform_grid(spec.personality_domain, x_bounds, n_p, n_x)
