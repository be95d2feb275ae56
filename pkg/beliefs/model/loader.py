"""Turn configuration records into validated scenarios."""

from __future__ import annotations

import dataclasses
import logging
import math
import sys
from collections.abc import Mapping
from pathlib import Path
from typing import Any

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover
    import tomli as tomllib

import numpy as np
from pydantic import ValidationError
from scipy.interpolate import RegularGridInterpolator

from beliefs.config import settings
from beliefs.errors import ScenarioError
from beliefs.model.initial import InitialCondition, PrejudiceInit, parse_initial
from beliefs.model.presets import ScenarioPreset, get_preset
from beliefs.model.schemas import (
    BeliefDomainConfig,
    CoefficientConfig,
    ScenarioConfig,
    ZetaConfig,
)
from beliefs.model.scenario import (
    BeliefDomain,
    Coefficient,
    InteractionKernel,
    ScenarioSpec,
    Tabulated,
    constant,
    rect_window,
    validate_scenario,
)

logger = logging.getLogger(__name__)


def load_config(path: Path) -> ScenarioConfig:
    """Read and validate a TOML scenario file.

    Raises:
        FileNotFoundError: The file does not exist.
        ScenarioError: The file is not valid TOML or fails the schema.
    """
    with open(path, "rb") as f:
        try:
            raw = tomllib.load(f)
        except tomllib.TOMLDecodeError as e:
            raise ScenarioError(f"{path}: {e}") from e
    logger.debug("Loaded scenario config %s", path)
    return parse_config(raw)


def parse_config(raw: Mapping[str, Any] | ScenarioConfig) -> ScenarioConfig:
    """Validate a raw mapping against the scenario schema."""
    if isinstance(raw, ScenarioConfig):
        return raw
    try:
        return ScenarioConfig.model_validate(dict(raw))
    except ValidationError as e:
        raise ScenarioError(f"invalid scenario config: {e}") from e


def build_scenario(raw: Mapping[str, Any] | ScenarioConfig) -> ScenarioSpec:
    """Build and validate the scenario a configuration record describes.

    The record either names a preset (with optional parameter overrides and
    field tables replacing the preset's coefficients) or supplies every field.

    Raises:
        ScenarioError: Any invariant fails or the record is incomplete.
    """
    return load_scenario(raw).spec


def load_scenario(raw: Mapping[str, Any] | ScenarioConfig) -> ScenarioPreset:
    """Like build_scenario, also returning the initial condition the run should use."""
    config = parse_config(raw)
    if config.preset is not None:
        base = get_preset(config.preset, **config.parameters)
        spec = _apply_overrides(base.spec, config)
        initial: InitialCondition = base.initial
        description = base.description
    else:
        spec = _spec_from_tables(config)
        initial = PrejudiceInit()
        description = "scenario defined by its configuration tables"

    if config.run is not None and config.run.initial is not None:
        try:
            initial = parse_initial(config.run.initial)
        except ValueError as e:
            raise ScenarioError(str(e)) from e

    validate_scenario(spec, n=settings.validation_np)
    logger.info("Scenario '%s' ready (%s)", spec.name, description)
    return ScenarioPreset(spec.name, spec, description, initial)


def _apply_overrides(spec: ScenarioSpec, config: ScenarioConfig) -> ScenarioSpec:
    changes: dict[str, Any] = {}
    if config.name is not None:
        changes["name"] = config.name
    if config.personality_domain is not None:
        changes["personality_domain"] = config.personality_domain.bounds
    if config.belief_domain is not None:
        changes["belief_domain"] = _belief_domain(config.belief_domain)
    for field_name in ("alpha", "prejudice", "rho0"):
        table = getattr(config, field_name)
        if table is not None:
            changes[field_name] = _coefficient(table)
    if config.zeta is not None:
        changes["zeta"] = _kernel(config.zeta)
    if config.sigma2 is not None:
        changes["sigma2"] = config.sigma2.value
    if changes:
        logger.debug("Overriding preset fields: %s", ", ".join(sorted(changes)))
    return dataclasses.replace(spec, **changes)


def _spec_from_tables(config: ScenarioConfig) -> ScenarioSpec:
    # Completeness is enforced by the schema.
    assert config.personality_domain and config.alpha and config.prejudice
    assert config.zeta and config.sigma2 and config.rho0
    domain = config.belief_domain or BeliefDomainConfig()
    return ScenarioSpec(
        personality_domain=config.personality_domain.bounds,
        belief_domain=_belief_domain(domain),
        alpha=_coefficient(config.alpha),
        prejudice=_coefficient(config.prejudice),
        zeta=_kernel(config.zeta),
        sigma2=config.sigma2.value,
        rho0=_coefficient(config.rho0),
        name=config.name or "custom",
    )


def _belief_domain(config: BeliefDomainConfig) -> BeliefDomain:
    if config.kind == "line":
        return BeliefDomain.line()
    assert config.bounds is not None
    return BeliefDomain.interval(*config.bounds)


def _coefficient(config: CoefficientConfig) -> Coefficient:
    if config.constant is not None:
        return constant(config.constant)
    return Tabulated(np.asarray(config.nodes), np.asarray(config.values))


def _kernel(config: ZetaConfig) -> InteractionKernel:
    belief = None
    support = math.inf
    if config.belief_factor is not None:
        belief = rect_window(config.belief_factor.width, config.belief_factor.steepness)
        support = config.belief_factor.width
    if config.support_radius is not None:
        support = config.support_radius

    factors = None
    if config.constant is not None:
        value = config.constant
        factors = (constant(value), constant(1.0))
        bound = value

        def personality(p: np.ndarray, p2: np.ndarray) -> np.ndarray:
            return np.full(np.broadcast_shapes(np.shape(p), np.shape(p2)), value)

    elif config.factors is not None:
        nodes = np.asarray(config.nodes, dtype=float)
        zeta1 = Tabulated(nodes, np.asarray(config.factors.zeta1))
        zeta2 = Tabulated(nodes, np.asarray(config.factors.zeta2))
        factors = (zeta1, zeta2)
        bound = float(np.max(np.outer(zeta1.values, zeta2.values)))

        def personality(p: np.ndarray, p2: np.ndarray) -> np.ndarray:
            return zeta1(p) * zeta2(p2)

    else:
        nodes = np.asarray(config.nodes, dtype=float)
        table = np.asarray(config.kernel, dtype=float)
        if np.any(table < 0):
            raise ScenarioError("influence kernel must be non-negative")
        interpolator = RegularGridInterpolator((nodes, nodes), table, bounds_error=False)
        bound = float(table.max())

        def personality(p: np.ndarray, p2: np.ndarray) -> np.ndarray:
            pp, qq = np.broadcast_arrays(np.asarray(p, dtype=float), np.asarray(p2, dtype=float))
            clipped = np.clip(np.stack([pp, qq], axis=-1), nodes[0], nodes[-1])
            return interpolator(clipped)

    if config.bound is not None:
        bound = config.bound
    return InteractionKernel(
        personality=personality,
        belief=belief,
        bound=bound,
        support_radius=support,
        factors=factors,
    )
