"""Finite agent populations and their reproducible random streams."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import cumulative_trapezoid

from beliefs.config import settings
from beliefs.model.initial import GaussianInit, InitialCondition, PrejudiceInit
from beliefs.model.scenario import BeliefDomain, ScenarioSpec

logger = logging.getLogger(__name__)

# Agents per random stream and per reduction block. Fixed so results do not
# depend on how many threads share the work.
BLOCK_SIZE = 256
INIT_STREAM = 0  # stream word reserved for the initial draw; steps count from 1


def stream(seed: int, step: int, block: int) -> np.random.Generator:
    """Philox generator for one block of agents at one step.

    The counter's two high words hold (step, block); the low words are left
    for the draws themselves, so streams never overlap.
    """
    return np.random.Generator(np.random.Philox(key=seed, counter=[0, 0, step, block]))


def block_slices(n_agents: int) -> list[slice]:
    """Contiguous agent blocks of BLOCK_SIZE (the last one may be shorter)."""
    return [slice(lo, min(lo + BLOCK_SIZE, n_agents)) for lo in range(0, n_agents, BLOCK_SIZE)]


def standard_normals(seed: int, step: int, n_agents: int) -> np.ndarray:
    """One N(0, 1) draw per agent, block by block."""
    blocks = block_slices(n_agents)
    return np.concatenate(
        [stream(seed, step, b).standard_normal(s.stop - s.start) for b, s in enumerate(blocks)]
    )


def reflect(x: np.ndarray, domain: BeliefDomain) -> np.ndarray:
    """Mirror overshoots back into a compact belief interval."""
    if not domain.compact:
        return x
    lo, hi = domain.bounds
    width = hi - lo
    y = np.mod(x - lo, 2.0 * width)
    return lo + np.where(y > width, 2.0 * width - y, y)


@dataclass(frozen=True)
class AgentCoefficients:
    """Per-agent values of the personality-dependent coefficients."""

    alpha: np.ndarray
    prejudice: np.ndarray
    zeta1: np.ndarray | None  # product-form factors, None otherwise
    zeta2: np.ndarray | None


@dataclass(eq=False)
class AgentEnsemble:
    """U agents with static personalities and evolving beliefs.

    Attributes:
        spec: The scenario the agents follow.
        personalities: P_i, drawn once from rho0.
        beliefs: X_i at the current time.
        time: Current simulation time.
        seed: Master seed of every random stream.
        step_count: Steps taken so far; selects the next stream counter.
        coefficients: alpha, u and product factors evaluated at P_i.
    """

    spec: ScenarioSpec
    personalities: np.ndarray
    beliefs: np.ndarray
    time: float = 0.0
    seed: int = 0
    step_count: int = 0
    coefficients: AgentCoefficients = field(init=False)
    _kernel: np.ndarray | None = field(default=None, init=False, repr=False)

    def __post_init__(self) -> None:
        """Check shapes and evaluate the per-agent coefficients."""
        self.personalities = np.asarray(self.personalities, dtype=float)
        self.beliefs = np.asarray(self.beliefs, dtype=float)
        if self.personalities.shape != self.beliefs.shape or self.personalities.ndim != 1:
            raise ValueError("personalities and beliefs must be 1-D arrays of equal length")
        if len(self.beliefs) < 2:
            raise ValueError(f"an ensemble needs at least 2 agents, got {len(self.beliefs)}")
        p = self.personalities
        zeta1 = zeta2 = None
        if self.spec.zeta.factors is not None and self.spec.product_form:
            f1, f2 = self.spec.zeta.factors
            zeta1 = np.broadcast_to(f1(p), p.shape).astype(float)
            zeta2 = np.broadcast_to(f2(p), p.shape).astype(float)
        self.coefficients = AgentCoefficients(
            alpha=np.broadcast_to(self.spec.alpha(p), p.shape).astype(float),
            prejudice=np.broadcast_to(self.spec.prejudice(p), p.shape).astype(float),
            zeta1=zeta1,
            zeta2=zeta2,
        )

    @property
    def size(self) -> int:
        """Number of agents U."""
        return len(self.beliefs)

    def personality_kernel(self) -> np.ndarray:
        """k(P_i, P_j) for all pairs, computed once and cached."""
        if self._kernel is None:
            self._kernel = self.spec.zeta.matrix(self.personalities)
        return self._kernel

    def copy(self) -> AgentEnsemble:
        """Independent ensemble with the same state."""
        twin = AgentEnsemble(
            spec=self.spec,
            personalities=self.personalities.copy(),
            beliefs=self.beliefs.copy(),
            time=self.time,
            seed=self.seed,
            step_count=self.step_count,
        )
        twin._kernel = self._kernel
        return twin


def sample_personalities(spec: ScenarioSpec, uniforms: np.ndarray) -> np.ndarray:
    """Inverse-CDF map of uniforms onto rho0, on the validation grid."""
    nodes = spec.sample_nodes(settings.validation_np)
    density = np.maximum(spec.rho0(nodes), 0.0)
    cdf = cumulative_trapezoid(density, nodes, initial=0.0)
    cdf /= cdf[-1]
    # Flat stretches (rho0 = 0) would make the inverse ambiguous; keep the first node.
    keep = np.concatenate([[True], np.diff(cdf) > 0])
    return np.interp(uniforms, cdf[keep], nodes[keep])


def init_ensemble(
    spec: ScenarioSpec,
    n_agents: int | None = None,
    seed: int | None = None,
    init: InitialCondition | None = None,
) -> AgentEnsemble:
    """Draw U personalities from rho0 and place the initial beliefs.

    Args:
        spec: The scenario.
        n_agents: U, at least 2. Defaults to settings.mc_agents.
        seed: Master seed. Defaults to settings.mc_seed.
        init: Prejudice point masses (default) or a common Gaussian.
    """
    n_agents = settings.mc_agents if n_agents is None else n_agents
    seed = settings.mc_seed if seed is None else seed
    init = init or PrejudiceInit()
    if n_agents < 2:
        raise ValueError(f"an ensemble needs at least 2 agents, got {n_agents}")

    rng = stream(seed, INIT_STREAM, 0)
    personalities = sample_personalities(spec, rng.random(n_agents))
    if isinstance(init, GaussianInit):
        beliefs = init.mean + np.sqrt(init.var) * rng.standard_normal(n_agents)
        beliefs = reflect(beliefs, spec.belief_domain)
    else:
        beliefs = init.mean_at(spec, personalities)
    logger.info(
        "Initialized %d agents for '%s' (seed %d, %s start)", n_agents, spec.name, seed, init.label
    )
    return AgentEnsemble(spec=spec, personalities=personalities, beliefs=beliefs, seed=seed)
