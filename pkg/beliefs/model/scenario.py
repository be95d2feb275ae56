"""Scenario definitions: the coefficient functions of the belief dynamics.

A scenario fixes the personality interval, the belief domain, stubbornness
alpha(p), prejudice u(p), the interaction function zeta, the endogenous noise
variance sigma2 and the personality density rho0(p). Coefficients are
vectorized callables over numpy arrays; ``Tabulated`` wraps sampled values
with linear interpolation.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np

from beliefs.errors import (
    BeliefDependentZeta,
    InvalidStubbornness,
    NonPositiveNoise,
    ProductFormMismatch,
    UnnormalizedRho0,
    VanishingInfluence,
)
from beliefs.numerics.grid import Grid, trapezoid_weights

logger = logging.getLogger(__name__)

Coefficient = Callable[[np.ndarray], np.ndarray]
PairKernel = Callable[[np.ndarray, np.ndarray], np.ndarray]

ALPHA_INF_THRESHOLD = 1e-6
RHO0_MASS_TOL = 1e-6
PRODUCT_FORM_TOL = 1e-12
TAIL_WIDTHS = 6.0


@dataclass(frozen=True, eq=False)
class Tabulated:
    """A coefficient sampled on sorted nodes, linearly interpolated between them."""

    nodes: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        """Check the table is usable for interpolation."""
        nodes = np.asarray(self.nodes, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if nodes.shape != values.shape or nodes.ndim != 1 or len(nodes) < 2:
            raise ValueError("tabulated coefficient needs matching 1-D nodes and values (>= 2)")
        if np.any(np.diff(nodes) <= 0):
            raise ValueError("tabulated nodes must be strictly increasing")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "values", values)

    def __call__(self, p: np.ndarray) -> np.ndarray:
        """Interpolate at p."""
        return np.interp(p, self.nodes, self.values)


def constant(value: float) -> Coefficient:
    """Coefficient returning ``value`` everywhere."""

    def fn(p: np.ndarray) -> np.ndarray:
        return np.full(np.shape(p), value, dtype=float)

    return fn


@dataclass(frozen=True)
class BeliefDomain:
    """Either the whole real line (truncated numerically) or a reflecting interval."""

    compact: bool = False
    bounds: tuple[float, float] | None = None

    @classmethod
    def line(cls) -> BeliefDomain:
        """The unbounded belief line."""
        return cls(compact=False, bounds=None)

    @classmethod
    def interval(cls, lo: float, hi: float) -> BeliefDomain:
        """A compact interval with reflecting ends."""
        if hi <= lo:
            raise ValueError(f"empty belief interval [{lo}, {hi}]")
        return cls(compact=True, bounds=(float(lo), float(hi)))

    @property
    def sup_abs(self) -> float:
        """S_x = sup |x| over the domain (infinite for the line)."""
        if not self.compact or self.bounds is None:
            return math.inf
        return max(abs(self.bounds[0]), abs(self.bounds[1]))


@dataclass(frozen=True, eq=False)
class InteractionKernel:
    """Mutual influence zeta(d, p, p') = g(d) * k(p, p').

    Attributes:
        personality: k(p, p'), broadcasting over its two arguments.
        belief: g(d) with d = |x' - x|; None means belief independent (g = 1).
        bound: S_zeta, an upper bound of zeta.
        support_radius: X0 such that zeta vanishes for d > X0 (inf allowed).
        factors: (zeta1, zeta2) when k(p, p') = zeta1(p) * zeta2(p').
    """

    personality: PairKernel
    belief: Coefficient | None = None
    bound: float = 1.0
    support_radius: float = math.inf
    factors: tuple[Coefficient, Coefficient] | None = None

    @property
    def belief_independent(self) -> bool:
        """True when the influence ignores the belief distance."""
        return self.belief is None

    @property
    def product_form(self) -> bool:
        """True for belief-independent kernels declared as zeta1(p) * zeta2(p')."""
        return self.belief is None and self.factors is not None

    def __call__(self, d: np.ndarray, p: np.ndarray, p2: np.ndarray) -> np.ndarray:
        """Evaluate zeta(d, p, p') with broadcasting."""
        k = self.personality(p, p2)
        if self.belief is None:
            return k * np.ones_like(np.asarray(d, dtype=float))
        return self.belief(np.abs(d)) * k

    def matrix(self, p_nodes: np.ndarray, q_nodes: np.ndarray | None = None) -> np.ndarray:
        """k(p_i, q_j) as a dense matrix."""
        q_nodes = p_nodes if q_nodes is None else q_nodes
        return np.broadcast_to(
            self.personality(p_nodes[:, None], q_nodes[None, :]), (len(p_nodes), len(q_nodes))
        ).astype(float)


def product_kernel(zeta1: Coefficient, zeta2: Coefficient, bound: float) -> InteractionKernel:
    """Belief-independent kernel zeta1(p) * zeta2(p')."""

    def personality(p: np.ndarray, p2: np.ndarray) -> np.ndarray:
        return zeta1(p) * zeta2(p2)

    return InteractionKernel(personality=personality, bound=bound, factors=(zeta1, zeta2))


@dataclass(frozen=True, eq=False)
class ScenarioSpec:
    """The full model of one population. Immutable once built."""

    personality_domain: tuple[float, float]
    belief_domain: BeliefDomain
    alpha: Coefficient
    prejudice: Coefficient
    zeta: InteractionKernel
    sigma2: float
    rho0: Coefficient
    name: str = "custom"
    parameters: dict[str, float | int | str] = field(default_factory=dict)

    @property
    def belief_independent(self) -> bool:
        """Unbounded confidence: zeta ignores the belief distance."""
        return self.zeta.belief_independent

    @property
    def product_form(self) -> bool:
        """zeta(p, p') = zeta1(p) * zeta2(p')."""
        return self.zeta.product_form

    @property
    def sigma(self) -> float:
        """Noise scale sqrt(sigma2)."""
        return math.sqrt(self.sigma2)

    def alpha_bar(self, p: np.ndarray) -> np.ndarray:
        """1 - alpha(p)."""
        return 1.0 - self.alpha(p)

    def sample_nodes(self, n: int) -> np.ndarray:
        """Uniform personality samples merged with every tabulation breakpoint."""
        lo, hi = self.personality_domain
        nodes = [np.linspace(lo, hi, n)]
        for coefficient in (self.alpha, self.prejudice, self.rho0):
            if isinstance(coefficient, Tabulated):
                inside = coefficient.nodes[(coefficient.nodes >= lo) & (coefficient.nodes <= hi)]
                nodes.append(inside)
        return np.unique(np.concatenate(nodes))

    def truncation_radius(self, n: int = 2001) -> float:
        """Default half-width of the truncated belief line.

        max |u| plus six noise widths sigma / sqrt(2 inf w); inf alpha stands in
        for inf w under bounded confidence.
        """
        p = self.sample_nodes(n)
        u_max = float(np.max(np.abs(self.prejudice(p))))
        if self.belief_independent:
            weights = trapezoid_weights(p)
            rho0 = _normalized(self.rho0(p), weights)
            eta = _eta_matrix(self, p, p) @ (weights * rho0)
            w_inf = float(np.min(self.alpha(p) + self.alpha_bar(p) * eta))
        else:
            w_inf = float(np.min(self.alpha(p)))
        return u_max + TAIL_WIDTHS * self.sigma / math.sqrt(2.0 * max(w_inf, ALPHA_INF_THRESHOLD))


def _normalized(rho0: np.ndarray, weights: np.ndarray) -> np.ndarray:
    return rho0 / float(weights @ rho0)


def _eta_matrix(spec: ScenarioSpec, p: np.ndarray, q: np.ndarray) -> np.ndarray:
    if not spec.belief_independent:
        raise BeliefDependentZeta(
            f"scenario '{spec.name}' has belief-dependent influence; eta(p) is undefined"
        )
    return spec.zeta.matrix(np.atleast_1d(p).astype(float), q)


def personality_density(spec: ScenarioSpec, grid: Grid) -> np.ndarray:
    """rho0 at the grid's p nodes, rescaled to unit trapezoid mass."""
    return _normalized(spec.rho0(grid.p_nodes), grid.p_weights)


def eval_eta(spec: ScenarioSpec, p: float | np.ndarray, grid: Grid) -> float | np.ndarray:
    """eta(p) = integral of zeta(p, p') rho0(p') dp' by trapezoid quadrature."""
    kernel = _eta_matrix(spec, np.asarray(p, dtype=float).reshape(-1), grid.p_nodes)
    eta = kernel @ (grid.p_weights * personality_density(spec, grid))
    return float(eta[0]) if np.ndim(p) == 0 else eta


def eval_w(spec: ScenarioSpec, p: float | np.ndarray, grid: Grid) -> float | np.ndarray:
    """w(p) = alpha(p) + (1 - alpha(p)) eta(p)."""
    eta = eval_eta(spec, p, grid)
    p_arr = np.asarray(p, dtype=float)
    w = spec.alpha(p_arr) + spec.alpha_bar(p_arr) * eta
    return float(w) if np.ndim(p) == 0 else w


def validate_scenario(spec: ScenarioSpec, n: int = 2001) -> ScenarioSpec:
    """Check every scenario invariant on a validation sampling of the personality axis.

    Raises:
        NonPositiveNoise: sigma2 <= 0.
        InvalidStubbornness: alpha outside [0, 1] or inf alpha below 1e-6.
        UnnormalizedRho0: rho0 negative or its integral off by more than 1e-6.
        ProductFormMismatch: declared factors do not reproduce zeta.
        VanishingInfluence: interacting, belief-independent kernel with inf eta = 0.
    """
    if not spec.sigma2 > 0:
        raise NonPositiveNoise(f"sigma2 must be positive, got {spec.sigma2}")

    p = spec.sample_nodes(n)
    alpha = spec.alpha(p)
    if np.any(alpha < 0) or np.any(alpha > 1):
        raise InvalidStubbornness(
            f"alpha leaves [0, 1]: range [{alpha.min():.6g}, {alpha.max():.6g}]"
        )
    if alpha.min() < ALPHA_INF_THRESHOLD:
        raise InvalidStubbornness(
            f"inf alpha = {alpha.min():.3g} < {ALPHA_INF_THRESHOLD:g}; the dynamics are not ergodic"
        )

    weights = trapezoid_weights(p)
    rho0 = spec.rho0(p)
    mass = float(weights @ rho0)
    if np.any(rho0 < 0) or abs(mass - 1.0) > RHO0_MASS_TOL:
        raise UnnormalizedRho0(f"integral of rho0 is {mass:.9f}, expected 1")

    if spec.product_form:
        _check_product_form(spec)

    if spec.belief_independent and spec.zeta.bound > 0:
        eta = _eta_matrix(spec, p, p) @ (weights * rho0)
        if eta.min() <= 0:
            raise VanishingInfluence(f"inf eta = {eta.min():.3g} for an interacting population")

    logger.debug("Scenario '%s' passed validation on %d personality samples", spec.name, len(p))
    return spec


def _check_product_form(spec: ScenarioSpec, n: int = 50) -> None:
    assert spec.zeta.factors is not None
    zeta1, zeta2 = spec.zeta.factors
    lo, hi = spec.personality_domain
    p = np.linspace(lo, hi, n)
    declared = zeta1(p)[:, None] * zeta2(p)[None, :]
    actual = spec.zeta.matrix(p)
    gap = float(np.max(np.abs(declared - actual)))
    if gap > PRODUCT_FORM_TOL:
        raise ProductFormMismatch(f"zeta differs from zeta1 * zeta2 by {gap:.3e}")


def rect_window(width: float, steepness: float) -> Coefficient:
    """Smoothed rectangle g(d) = 1 / (1 + (d / width)^steepness)."""

    def window(d: np.ndarray) -> np.ndarray:
        # Clipped so the power stays finite; 10^steepness already rounds g to 0.
        scaled = np.minimum(np.abs(d) / width, 10.0)
        return 1.0 / (1.0 + np.power(scaled, steepness))

    return window
