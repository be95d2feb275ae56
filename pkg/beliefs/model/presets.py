"""Named scenario families with their parameter defaults.

Every family shares uniform personalities on [-1, 1] and prejudice u(p) = p.
Builders take keyword parameters only; ``get_preset`` validates the result.
"""

from __future__ import annotations

import inspect
import logging
from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np

from beliefs.config import settings
from beliefs.errors import ScenarioError, UnknownPreset
from beliefs.model.initial import GaussianInit, InitialCondition, PrejudiceInit
from beliefs.model.scenario import (
    BeliefDomain,
    Coefficient,
    InteractionKernel,
    ScenarioSpec,
    constant,
    product_kernel,
    rect_window,
    validate_scenario,
)
from beliefs.numerics.special import erf_eval

logger = logging.getLogger(__name__)

PERSONALITY_DOMAIN = (-1.0, 1.0)
DEFAULT_SIGMA2 = 0.01
BOUNDED_SIGMA2 = 1e-3

# Power of |p| that concentrates stubbornness at the community extremes
COMMUNITY_STUBBORN_POWER = 8


@dataclass(frozen=True)
class ScenarioPreset:
    """A named, validated scenario plus the initial condition it is usually run from."""

    name: str
    spec: ScenarioSpec
    description: str
    initial: InitialCondition = field(default_factory=PrejudiceInit)


PresetBuilder = Callable[..., ScenarioPreset]

_REGISTRY: dict[str, PresetBuilder] = {}


def register(name: str) -> Callable[[PresetBuilder], PresetBuilder]:
    """Add a builder to the preset registry under ``name``."""

    def decorator(builder: PresetBuilder) -> PresetBuilder:
        _REGISTRY[name] = builder
        return builder

    return decorator


def preset_names() -> list[str]:
    """Registered preset names in registration order."""
    return list(_REGISTRY)


def preset_parameters(name: str) -> dict[str, object]:
    """Parameter names and defaults accepted by a preset."""
    builder = _lookup(name)
    return {
        param.name: param.default
        for param in inspect.signature(builder).parameters.values()
        if param.default is not inspect.Parameter.empty
    }


def get_preset(name: str, **parameters: float | int | str) -> ScenarioPreset:
    """Build and validate a preset.

    Raises:
        UnknownPreset: No builder is registered under ``name``.
        ScenarioError: A parameter is unknown or the resulting scenario is invalid.
    """
    builder = _lookup(name)
    accepted = preset_parameters(name)
    unknown = sorted(set(parameters) - set(accepted))
    if unknown:
        raise ScenarioError(
            f"preset '{name}' does not take {', '.join(unknown)}; "
            f"parameters are {', '.join(accepted)}"
        )
    preset = builder(**parameters)
    validate_scenario(preset.spec, n=settings.validation_np)
    logger.debug("Built preset '%s' with %s", name, parameters or "defaults")
    return preset


def _lookup(name: str) -> PresetBuilder:
    try:
        return _REGISTRY[name]
    except KeyError:
        raise UnknownPreset(
            f"unknown preset '{name}'; available: {', '.join(preset_names())}"
        ) from None


# --- Shared coefficients ---


def _identity(p: np.ndarray) -> np.ndarray:
    return np.asarray(p, dtype=float)


def _uniform_rho0() -> Coefficient:
    lo, hi = PERSONALITY_DOMAIN
    return constant(1.0 / (hi - lo))


def _floored(shape: Coefficient, floor: float) -> Coefficient:
    def alpha(p: np.ndarray) -> np.ndarray:
        return np.maximum(shape(p), floor)

    return alpha


def _spec(
    name: str,
    alpha: Coefficient,
    zeta: InteractionKernel,
    sigma2: float,
    parameters: dict[str, float | int | str],
    belief_domain: BeliefDomain | None = None,
) -> ScenarioSpec:
    return ScenarioSpec(
        personality_domain=PERSONALITY_DOMAIN,
        belief_domain=belief_domain or BeliefDomain.line(),
        alpha=alpha,
        prejudice=_identity,
        zeta=zeta,
        sigma2=float(sigma2),
        rho0=_uniform_rho0(),
        name=name,
        parameters=parameters,
    )


# --- Families ---


@register("homogeneous")
def homogeneous(alpha: float = 0.5, sigma2: float = DEFAULT_SIGMA2) -> ScenarioPreset:
    """Constant stubbornness and constant unit influence."""
    one = constant(1.0)
    spec = _spec(
        "homogeneous",
        constant(float(alpha)),
        product_kernel(one, one, bound=1.0),
        sigma2,
        {"alpha": alpha, "sigma2": sigma2},
    )
    return ScenarioPreset(
        "homogeneous", spec, "homogeneous agents, zeta = 1; closed form in erf"
    )


@register("inhomogeneous")
def inhomogeneous(
    shape: str = "one-minus-abs",
    n: float = 0,
    sigma2: float = DEFAULT_SIGMA2,
    alpha_floor: float = settings.alpha_floor,
) -> ScenarioPreset:
    """Personality-dependent stubbornness; the stubborn are the influential for n > 0.

    Args:
        shape: ``one-minus-abs`` for alpha = 1 - |p| (neutral stubborn agents)
            or ``abs`` for alpha = |p| (extremal stubborn agents).
        n: Influence exponent, zeta2(p') = alpha(p')^n.
        sigma2: Noise variance.
        alpha_floor: Lower clamp on alpha where the shape reaches 0.
    """
    shapes: dict[str, Coefficient] = {
        "one-minus-abs": lambda p: 1.0 - np.abs(p),
        "abs": lambda p: np.abs(np.asarray(p, dtype=float)),
    }
    if shape not in shapes:
        raise ScenarioError(f"inhomogeneous shape must be one of {sorted(shapes)}, got '{shape}'")
    alpha = _floored(shapes[shape], alpha_floor)
    exponent = float(n)

    def influence(p: np.ndarray) -> np.ndarray:
        return np.power(alpha(p), exponent)

    spec = _spec(
        "inhomogeneous",
        alpha,
        product_kernel(constant(1.0), influence, bound=1.0),
        sigma2,
        {"shape": shape, "n": n, "sigma2": sigma2, "alpha_floor": alpha_floor},
    )
    return ScenarioPreset(
        "inhomogeneous", spec, f"alpha = {shape}(p), zeta = alpha(p')^{n:g}"
    )


@register("proximity")
def proximity(
    n: float = 0,
    sigma2: float = DEFAULT_SIGMA2,
    alpha_floor: float = settings.alpha_floor,
) -> ScenarioPreset:
    """Stubbornness (p+1)^2/4 with influence 2 / (1 + (5|p - p'|)^n)."""
    alpha = _floored(lambda p: (np.asarray(p, dtype=float) + 1.0) ** 2 / 4.0, alpha_floor)
    exponent = float(n)
    parameters: dict[str, float | int | str] = {
        "n": n,
        "sigma2": sigma2,
        "alpha_floor": alpha_floor,
    }
    if exponent == 0:
        one = constant(1.0)
        zeta = product_kernel(one, one, bound=1.0)
    else:

        def personality(p: np.ndarray, p2: np.ndarray) -> np.ndarray:
            return 2.0 / (1.0 + np.power(5.0 * np.abs(p - p2), exponent))

        zeta = InteractionKernel(personality=personality, bound=2.0)
    spec = _spec("proximity", alpha, zeta, sigma2, parameters)
    return ScenarioPreset("proximity", spec, f"proximity-based influence, n = {n:g}")


@register("community")
def community(
    kappa: float = 1.0,
    variant: str = "symmetric",
    sigma2: float = DEFAULT_SIGMA2,
    alpha_base: float = 0.05,
    alpha_stubborn: float = 1.0,
) -> ScenarioPreset:
    """Two communities of opposite sign coupled through 1/2 + erf(p p' / kappa) / 2.

    Args:
        kappa: Inter-community coupling; larger values mix the communities.
        variant: ``symmetric`` puts stubborn agents at both extremes,
            ``one-sided`` only in the positive community.
        sigma2: Noise variance.
        alpha_base: Stubbornness of ordinary members.
        alpha_stubborn: Stubbornness reached at the community extremes.
    """
    if kappa <= 0:
        raise ScenarioError(f"kappa must be positive, got {kappa}")
    if variant == "symmetric":
        extremeness: Coefficient = lambda p: np.abs(np.asarray(p, dtype=float))  # noqa: E731
    elif variant == "one-sided":
        extremeness = lambda p: np.maximum(np.asarray(p, dtype=float), 0.0)  # noqa: E731
    else:
        raise ScenarioError(f"community variant must be symmetric or one-sided, got '{variant}'")

    def alpha(p: np.ndarray) -> np.ndarray:
        weight = np.power(extremeness(p), COMMUNITY_STUBBORN_POWER)
        return alpha_base + (alpha_stubborn - alpha_base) * weight

    def personality(p: np.ndarray, p2: np.ndarray) -> np.ndarray:
        return 0.5 + 0.5 * erf_eval(p * p2 / kappa)

    spec = _spec(
        "community",
        alpha,
        InteractionKernel(personality=personality, bound=1.0),
        sigma2,
        {
            "kappa": kappa,
            "variant": variant,
            "sigma2": sigma2,
            "alpha_base": alpha_base,
            "alpha_stubborn": alpha_stubborn,
        },
    )
    return ScenarioPreset(
        "community", spec, f"two communities, {variant} stubbornness, kappa = {kappa:g}"
    )


@register("bounded-rect")
def bounded_rect(
    alpha: float = 0.1,
    sigma2: float = BOUNDED_SIGMA2,
    width: float = 1.0 / 3.0,
    steepness: float = 64,
    domain: str = "line",
) -> ScenarioPreset:
    """Bounded confidence: influence 1 / (1 + (d / width)^steepness), near-rectangular.

    Args:
        alpha: Constant stubbornness.
        sigma2: Noise variance.
        width: Confidence radius X0.
        steepness: Exponent sharpening the window edge.
        domain: ``line`` for the real line, ``interval`` for reflecting [-1, 1].
    """
    if width <= 0:
        raise ScenarioError(f"confidence width must be positive, got {width}")
    if domain == "line":
        belief_domain = BeliefDomain.line()
    elif domain == "interval":
        belief_domain = BeliefDomain.interval(*PERSONALITY_DOMAIN)
    else:
        raise ScenarioError(f"bounded-rect domain must be line or interval, got '{domain}'")

    def personality(p: np.ndarray, p2: np.ndarray) -> np.ndarray:
        return np.ones(np.broadcast_shapes(np.shape(p), np.shape(p2)))

    zeta = InteractionKernel(
        personality=personality,
        belief=rect_window(width, steepness),
        bound=1.0,
        support_radius=width,
    )
    spec = _spec(
        "bounded-rect",
        constant(float(alpha)),
        zeta,
        sigma2,
        {
            "alpha": alpha,
            "sigma2": sigma2,
            "width": width,
            "steepness": steepness,
            "domain": domain,
        },
        belief_domain=belief_domain,
    )
    return ScenarioPreset(
        "bounded-rect", spec, f"bounded confidence, rectangular window of radius {width:.4g}"
    )


@register("event-driven")
def event_driven(
    alpha: float = 0.1,
    sigma2: float = DEFAULT_SIGMA2,
    init_mean: float = 1.0,
    init_var: float = 1e-4,
) -> ScenarioPreset:
    """Constant stubbornness, influence 1 / (1 + (p - p')^2), started from a shock."""

    def personality(p: np.ndarray, p2: np.ndarray) -> np.ndarray:
        return 1.0 / (1.0 + (p - p2) ** 2)

    spec = _spec(
        "event-driven",
        constant(float(alpha)),
        InteractionKernel(personality=personality, bound=1.0),
        sigma2,
        {"alpha": alpha, "sigma2": sigma2, "init_mean": init_mean, "init_var": init_var},
    )
    return ScenarioPreset(
        "event-driven",
        spec,
        f"all beliefs pushed to N({init_mean:g}, {init_var:g}) by an event",
        initial=GaussianInit(mean=float(init_mean), var=float(init_var)),
    )


@register("noninteracting")
def noninteracting(alpha: float = 0.5, sigma2: float = DEFAULT_SIGMA2) -> ScenarioPreset:
    """zeta = 0: independent Ornstein-Uhlenbeck agents pulled to their prejudice."""
    spec = _spec(
        "noninteracting",
        constant(float(alpha)),
        product_kernel(constant(0.0), constant(1.0), bound=0.0),
        sigma2,
        {"alpha": alpha, "sigma2": sigma2},
    )
    return ScenarioPreset("noninteracting", spec, "no mutual influence; Ornstein-Uhlenbeck agents")

