"""Tests for scenarios, presets, initial conditions and config loading."""

import dataclasses
import math
from pathlib import Path

import numpy as np
import pytest

from beliefs.errors import (
    InvalidStubbornness,
    NonPositiveNoise,
    ProductFormMismatch,
    ScenarioError,
    UnknownPreset,
    UnnormalizedRho0,
    VanishingInfluence,
)
from beliefs.model import (
    BeliefDomain,
    GaussianInit,
    InteractionKernel,
    PrejudiceInit,
    Tabulated,
    build_scenario,
    eval_eta,
    eval_w,
    get_preset,
    load_config,
    load_scenario,
    personality_density,
    preset_names,
    validate_scenario,
)
from beliefs.model.initial import parse_initial
from beliefs.model.presets import preset_parameters
from beliefs.model.scenario import constant, product_kernel, rect_window
from beliefs.numerics import uniform_grid

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"

FULL_TABLES = """
name = "from-tables"

[personality_domain]
bounds = [-1.0, 1.0]

[alpha]
nodes = [-1.0, 0.0, 1.0]
values = [0.6, 0.2, 0.6]

[prejudice]
nodes = [-1.0, 1.0]
values = [-1.0, 1.0]

[rho0]
constant = 0.5

[sigma2]
value = 0.01

[zeta]
nodes = [-1.0, 1.0]
kernel = [[1.0, 0.5], [0.5, 1.0]]
"""


def _make_spec(**changes):
    """Homogeneous scenario with selected fields replaced (not validated)."""
    return dataclasses.replace(get_preset("homogeneous").spec, **changes)


def _write(tmp_path: Path, text: str, name: str = "scenario.toml") -> Path:
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


# --- Coefficients ---


class TestTabulated:
    def test_linear_interpolation(self) -> None:
        table = Tabulated(np.array([-1.0, 0.0, 1.0]), np.array([0.6, 0.2, 0.6]))
        np.testing.assert_allclose(table(np.array([-0.5, 0.0, 0.25])), [0.4, 0.2, 0.3])

    def test_nodes_must_increase(self) -> None:
        with pytest.raises(ValueError, match="increasing"):
            Tabulated(np.array([0.0, 0.0, 1.0]), np.array([1.0, 2.0, 3.0]))

    def test_lengths_must_match(self) -> None:
        with pytest.raises(ValueError):
            Tabulated(np.array([0.0, 1.0]), np.array([1.0, 2.0, 3.0]))


class TestBeliefDomain:
    def test_line_is_unbounded(self) -> None:
        domain = BeliefDomain.line()
        assert not domain.compact
        assert math.isinf(domain.sup_abs)

    def test_interval(self) -> None:
        domain = BeliefDomain.interval(-2.0, 1.0)
        assert domain.compact
        assert domain.sup_abs == 2.0

    def test_empty_interval_rejected(self) -> None:
        with pytest.raises(ValueError, match="empty"):
            BeliefDomain.interval(1.0, 1.0)


class TestInteractionKernel:
    def test_product_form(self) -> None:
        kernel = product_kernel(constant(2.0), lambda p: np.abs(p), bound=2.0)
        assert kernel.product_form
        assert kernel.belief_independent
        matrix = kernel.matrix(np.array([0.0, 1.0]))
        np.testing.assert_allclose(matrix, [[0.0, 2.0], [0.0, 2.0]])

    def test_belief_factor_breaks_product_form(self) -> None:
        kernel = InteractionKernel(
            personality=lambda p, q: np.ones(np.broadcast_shapes(np.shape(p), np.shape(q))),
            belief=rect_window(0.5, 64),
            factors=(constant(1.0), constant(1.0)),
        )
        assert not kernel.product_form
        assert not kernel.belief_independent

    def test_rect_window_shape(self) -> None:
        window = rect_window(1.0 / 3.0, 64)
        values = window(np.array([0.0, 1.0 / 3.0, 0.5, 50.0]))
        assert values[0] == 1.0
        assert values[1] == pytest.approx(0.5)
        assert values[2] < 1e-10
        assert values[3] == pytest.approx(0.0, abs=1e-60)


# --- Scenario validation ---


class TestValidateScenario:
    def test_zero_noise_rejected(self) -> None:
        with pytest.raises(NonPositiveNoise):
            validate_scenario(_make_spec(sigma2=0.0))

    def test_alpha_above_one_rejected(self) -> None:
        with pytest.raises(InvalidStubbornness, match="leaves"):
            validate_scenario(_make_spec(alpha=constant(1.5)))

    def test_vanishing_alpha_rejected(self) -> None:
        with pytest.raises(InvalidStubbornness, match="ergodic"):
            validate_scenario(_make_spec(alpha=lambda p: np.abs(np.asarray(p, dtype=float))))

    def test_unnormalized_rho0_rejected(self) -> None:
        with pytest.raises(UnnormalizedRho0):
            validate_scenario(_make_spec(rho0=constant(1.0)))

    def test_declared_factors_must_match(self) -> None:
        zeta = InteractionKernel(
            personality=lambda p, q: np.full(np.broadcast_shapes(np.shape(p), np.shape(q)), 2.0),
            factors=(constant(1.0), constant(1.0)),
        )
        with pytest.raises(ProductFormMismatch):
            validate_scenario(_make_spec(zeta=zeta))

    def test_vanishing_influence_rejected(self) -> None:
        zeta = product_kernel(constant(0.0), constant(1.0), bound=1.0)
        with pytest.raises(VanishingInfluence):
            validate_scenario(_make_spec(zeta=zeta))

    def test_errors_are_scenario_errors(self) -> None:
        with pytest.raises(ScenarioError):
            validate_scenario(_make_spec(sigma2=-1.0))

    def test_valid_scenario_returned(self) -> None:
        spec = _make_spec()
        assert validate_scenario(spec) is spec


class TestScenarioQuantities:
    def setup_method(self) -> None:
        self.grid = uniform_grid((-1.0, 1.0), (-2.0, 2.0), 101, 11)

    def test_homogeneous_eta_and_w(self) -> None:
        spec = get_preset("homogeneous").spec
        assert eval_eta(spec, 0.3, self.grid) == pytest.approx(1.0)
        np.testing.assert_allclose(eval_w(spec, self.grid.p_nodes, self.grid), 1.0)

    def test_personality_density_normalized(self) -> None:
        spec = get_preset("homogeneous").spec
        rho0 = personality_density(spec, self.grid)
        assert self.grid.p_weights @ rho0 == pytest.approx(1.0)

    def test_noninteracting_w_is_alpha(self) -> None:
        spec = get_preset("noninteracting", alpha=0.3).spec
        assert eval_w(spec, 0.0, self.grid) == pytest.approx(0.3)

    def test_truncation_radius(self) -> None:
        spec = get_preset("homogeneous", alpha=0.5, sigma2=0.01).spec
        assert spec.truncation_radius() == pytest.approx(1.0 + 6.0 * 0.1 / math.sqrt(2.0))

    def test_sample_nodes_include_breakpoints(self) -> None:
        spec = _make_spec(alpha=Tabulated(np.array([-1.0, 0.123, 1.0]), np.array([0.5] * 3)))
        assert 0.123 in spec.sample_nodes(11)


# --- Presets ---


class TestPresets:
    @pytest.mark.parametrize("name", preset_names())
    def test_every_preset_builds_valid(self, name: str) -> None:
        preset = get_preset(name)
        assert preset.spec.name == name
        assert preset.spec.sigma2 > 0

    def test_unknown_preset(self) -> None:
        with pytest.raises(UnknownPreset, match="available"):
            get_preset("nonexistent")

    def test_unknown_parameter(self) -> None:
        with pytest.raises(ScenarioError, match="beta"):
            get_preset("homogeneous", beta=1.0)

    def test_parameters_listed_with_defaults(self) -> None:
        assert preset_parameters("homogeneous") == {"alpha": 0.5, "sigma2": 0.01}

    def test_bad_shape_rejected(self) -> None:
        with pytest.raises(ScenarioError, match="shape"):
            get_preset("inhomogeneous", shape="square")

    def test_homogeneous_is_product_form(self) -> None:
        assert get_preset("homogeneous").spec.product_form

    def test_proximity_exponent_selects_kernel(self) -> None:
        assert get_preset("proximity", n=0).spec.product_form
        spec = get_preset("proximity", n=2).spec
        assert spec.belief_independent and not spec.product_form
        assert spec.zeta.bound == 2.0

    def test_bounded_rect_is_belief_dependent(self) -> None:
        spec = get_preset("bounded-rect", domain="interval").spec
        assert not spec.belief_independent
        assert spec.belief_domain.bounds == (-1.0, 1.0)
        assert spec.zeta.support_radius == pytest.approx(1.0 / 3.0)

    def test_event_driven_starts_from_gaussian(self) -> None:
        preset = get_preset("event-driven", init_mean=2.0)
        assert preset.initial == GaussianInit(mean=2.0, var=1e-4)

    def test_community_stubborn_extremes(self) -> None:
        spec = get_preset("community", variant="one-sided").spec
        alpha = spec.alpha(np.array([-1.0, 0.0, 1.0]))
        np.testing.assert_allclose(alpha, [0.05, 0.05, 1.0])


# --- Initial conditions ---


class TestInitialConditions:
    def test_parse_prejudice(self) -> None:
        assert isinstance(parse_initial("prejudice"), PrejudiceInit)

    def test_parse_gaussian(self) -> None:
        assert parse_initial(" Gaussian:1,0.0001 ") == GaussianInit(mean=1.0, var=1e-4)

    def test_parse_unknown(self) -> None:
        with pytest.raises(ValueError, match="unknown initial condition"):
            parse_initial("uniform")

    def test_negative_variance_rejected(self) -> None:
        with pytest.raises(ValueError, match="variance"):
            GaussianInit(mean=0.0, var=-1.0)

    def test_prejudice_moments(self) -> None:
        spec = get_preset("homogeneous").spec
        p = np.array([-0.5, 0.5])
        np.testing.assert_array_equal(PrejudiceInit().mean_at(spec, p), p)
        np.testing.assert_array_equal(PrejudiceInit().var_at(p), 0.0)


# --- Config loading ---


class TestLoadConfig:
    def test_preset_with_parameters(self, tmp_path: Path) -> None:
        path = _write(tmp_path, 'preset = "homogeneous"\n[parameters]\nalpha = 0.2\n')
        spec = build_scenario(load_config(path))
        assert spec.alpha(np.array([0.0]))[0] == pytest.approx(0.2)
        assert spec.parameters["alpha"] == 0.2

    def test_preset_field_override(self, tmp_path: Path) -> None:
        path = _write(tmp_path, 'preset = "homogeneous"\n[sigma2]\nvalue = 0.05\n')
        assert build_scenario(load_config(path)).sigma2 == 0.05

    def test_missing_file(self, tmp_path: Path) -> None:
        with pytest.raises(FileNotFoundError):
            load_config(tmp_path / "absent.toml")

    def test_invalid_toml(self, tmp_path: Path) -> None:
        with pytest.raises(ScenarioError):
            load_config(_write(tmp_path, "preset = \n"))

    def test_unknown_key(self, tmp_path: Path) -> None:
        with pytest.raises(ScenarioError, match="invalid scenario config"):
            load_config(_write(tmp_path, 'preset = "homogeneous"\ncolour = "blue"\n'))

    def test_incomplete_tables(self, tmp_path: Path) -> None:
        with pytest.raises(ScenarioError, match="must define"):
            load_config(_write(tmp_path, "[sigma2]\nvalue = 0.01\n"))

    def test_invalid_values_rejected_on_build(self, tmp_path: Path) -> None:
        path = _write(tmp_path, 'preset = "homogeneous"\n[sigma2]\nvalue = 0.0\n')
        with pytest.raises(NonPositiveNoise):
            build_scenario(load_config(path))

    def test_full_tables_with_kernel(self, tmp_path: Path) -> None:
        spec = build_scenario(load_config(_write(tmp_path, FULL_TABLES)))
        assert spec.name == "from-tables"
        assert spec.belief_independent and not spec.product_form
        assert spec.zeta.matrix(np.array([0.0]))[0, 0] == pytest.approx(0.75)
        assert spec.zeta.bound == 1.0

    def test_belief_factor_table(self, tmp_path: Path) -> None:
        text = FULL_TABLES + "belief_factor = { width = 0.5 }\n"
        spec = build_scenario(load_config(_write(tmp_path, text)))
        assert not spec.belief_independent
        assert spec.zeta.support_radius == 0.5

    def test_run_initial_override(self, tmp_path: Path) -> None:
        text = 'preset = "homogeneous"\n[run]\ninitial = "gaussian:0.5,0.01"\n'
        preset = load_scenario(load_config(_write(tmp_path, text)))
        assert preset.initial == GaussianInit(mean=0.5, var=0.01)

    def test_bad_run_initial(self, tmp_path: Path) -> None:
        text = 'preset = "homogeneous"\n[run]\ninitial = "flat"\n'
        with pytest.raises(ScenarioError):
            load_scenario(load_config(_write(tmp_path, text)))

    @pytest.mark.parametrize("name", ["homogeneous.toml", "bounded_rect_mc.toml", "tabulated.toml"])
    def test_shipped_configs_load(self, name: str) -> None:
        preset = load_scenario(load_config(CONFIG_DIR / name))
        assert preset.spec.sigma2 > 0

    def test_tabulated_product_factors(self) -> None:
        spec = build_scenario(load_config(CONFIG_DIR / "tabulated.toml"))
        assert spec.product_form
        assert spec.zeta.bound == 2.0
