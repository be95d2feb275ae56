"""Scenario definitions, presets and configuration loading."""

from beliefs.model.initial import GaussianInit, InitialCondition, PrejudiceInit
from beliefs.model.loader import build_scenario, load_config, load_scenario
from beliefs.model.presets import ScenarioPreset, get_preset, preset_names
from beliefs.model.scenario import (
    BeliefDomain,
    InteractionKernel,
    ScenarioSpec,
    Tabulated,
    eval_eta,
    eval_w,
    personality_density,
    validate_scenario,
)

__all__ = [
    "BeliefDomain",
    "GaussianInit",
    "InitialCondition",
    "InteractionKernel",
    "PrejudiceInit",
    "ScenarioPreset",
    "ScenarioSpec",
    "Tabulated",
    "build_scenario",
    "eval_eta",
    "eval_w",
    "get_preset",
    "load_config",
    "load_scenario",
    "personality_density",
    "preset_names",
    "validate_scenario",
]
