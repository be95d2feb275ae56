"""Tests for phi(p, t) marching, Green-function densities and the Laplace checks."""

import dataclasses

import numpy as np
import pytest

from beliefs.errors import (
    BeliefDependentZeta,
    PathTooShort,
    PoleOnPath,
    StepTooLarge,
    TimeOutOfRange,
    UnsupportedScenario,
)
from beliefs.model import GaussianInit, Tabulated, get_preset, personality_density
from beliefs.numerics import make_grid
from beliefs.stationary import closed_form_product, fredholm_phi, solve_stationary
from beliefs.transient import (
    default_horizon,
    density_at,
    green_mean_var,
    laplace_consistency_check,
    laplace_I2,
    slowest_relaxation_rate,
    solve_phi_volterra,
    solve_transient,
)
from beliefs.transient.green import green_variance
from beliefs.transient.volterra import step_weights


def _right_case_reference(spec, grid, t: np.ndarray) -> np.ndarray:
    """phi(t) for zeta = 1 and w = 1 with the grid's quadrature constants."""
    weights = grid.p_weights * personality_density(spec, grid)
    alpha = spec.alpha(grid.p_nodes)
    a = float(weights @ (alpha * spec.prejudice(grid.p_nodes)))
    b = float(weights @ (1.0 - alpha))
    rate = 1.0 - b
    j = a / rate + a / b * np.exp(-t) - (a / rate + a / b) * np.exp(-rate * t)
    return a * -np.expm1(-t) + b * j


def _shifted_homogeneous():
    spec = get_preset("homogeneous").spec
    prejudice = Tabulated(np.array([-1.0, 1.0]), np.array([-0.7, 1.3]))
    return dataclasses.replace(spec, prejudice=prejudice)


# --- Marching phi ---


class TestSolvePhiVolterra:
    def test_right_leaning_population(self) -> None:
        spec = get_preset("proximity", n=0).spec
        grid = make_grid(spec, 101, 3)
        path = solve_phi_volterra(spec, grid, t_final=20.0, dt=0.005)
        reference = _right_case_reference(spec, grid, path.t_nodes)
        assert np.max(np.abs(path.phi - reference[None, :])) <= 1e-6
        # Same population in closed form: 1/2 (1 - e^{-t/3}) up to the alpha floor.
        assert path.at(20.0)[0] == pytest.approx(0.5 * (1 - np.exp(-20.0 / 3)), abs=5e-3)

    def test_symmetric_population_stays_neutral(self) -> None:
        spec = get_preset("inhomogeneous").spec
        path = solve_phi_volterra(spec, make_grid(spec, 101, 3), t_final=10.0, dt=0.01)
        assert np.max(np.abs(path.phi)) <= 1e-12

    def test_mean_belief_conserved(self) -> None:
        spec = _shifted_homogeneous()
        grid = make_grid(spec, 101, 3)
        solution = solve_transient(spec, grid, t_final=10.0, dt=0.01)
        np.testing.assert_allclose(solution.mean_belief(), 0.3, atol=1e-6)

    def test_step_rounded_to_divide_horizon(self) -> None:
        spec = get_preset("homogeneous").spec
        path = solve_phi_volterra(spec, make_grid(spec, 21, 3), t_final=1.0, dt=0.3)
        assert len(path.t_nodes) == 5
        assert path.t_final == pytest.approx(1.0)

    def test_step_too_large(self) -> None:
        spec = get_preset("homogeneous").spec
        with pytest.raises(StepTooLarge):
            solve_phi_volterra(spec, make_grid(spec, 21, 3), t_final=2.0, dt=1.0)

    def test_non_positive_step(self) -> None:
        spec = get_preset("homogeneous").spec
        with pytest.raises(ValueError, match="positive"):
            solve_phi_volterra(spec, make_grid(spec, 21, 3), t_final=2.0, dt=-0.1)

    def test_bounded_confidence_rejected(self) -> None:
        spec = get_preset("bounded-rect").spec
        with pytest.raises(BeliefDependentZeta):
            solve_phi_volterra(spec, make_grid(spec, 21, 3), t_final=1.0, dt=0.01)

    def test_time_outside_path(self) -> None:
        spec = get_preset("homogeneous").spec
        path = solve_phi_volterra(spec, make_grid(spec, 21, 3), t_final=1.0, dt=0.1)
        with pytest.raises(TimeOutOfRange):
            path.at(1.5)
        with pytest.raises(TimeOutOfRange):
            path.at(-0.1)

    def test_event_starts_from_shock_mean(self) -> None:
        preset = get_preset("event-driven")
        path = solve_phi_volterra(
            preset.spec, make_grid(preset.spec, 41, 3), t_final=1.0, dt=0.05, init=preset.initial
        )
        np.testing.assert_allclose(path.at(0.0), 1.0, atol=1e-12)

    def test_event_settles_on_fredholm_solution(self) -> None:
        preset = get_preset("event-driven")
        grid = make_grid(preset.spec, 41, 3)
        path = solve_phi_volterra(preset.spec, grid, t_final=200.0, dt=0.05, init=preset.initial)
        np.testing.assert_allclose(path.at(200.0), fredholm_phi(preset.spec, grid), atol=1e-6)

    def test_second_order_in_step(self) -> None:
        preset = get_preset("event-driven")
        grid = make_grid(preset.spec, 41, 3)
        phis = [
            solve_phi_volterra(preset.spec, grid, t_final=2.0, dt=dt, init=preset.initial).at(2.0)
            for dt in (0.04, 0.02, 0.01)
        ]
        coarse = float(np.max(np.abs(phis[0] - phis[1])))
        fine = float(np.max(np.abs(phis[1] - phis[2])))
        assert fine > 0
        assert 3.0 <= coarse / fine <= 5.0

    def test_interpolates_between_steps(self) -> None:
        spec = get_preset("proximity", n=0).spec
        path = solve_phi_volterra(spec, make_grid(spec, 21, 3), t_final=1.0, dt=0.1)
        midpoint = path.at(0.25)
        np.testing.assert_allclose(midpoint, (path.phi[:, 2] + path.phi[:, 3]) / 2)


class TestHorizon:
    def test_homogeneous_relaxes_at_alpha(self) -> None:
        spec = get_preset("homogeneous", alpha=0.5).spec
        grid = make_grid(spec, 51, 3)
        assert slowest_relaxation_rate(spec, grid) == pytest.approx(0.5, rel=1e-9)
        t_final, dt = default_horizon(spec, grid)
        assert t_final == pytest.approx(40.0, rel=1e-9)
        assert dt == pytest.approx(0.01)

    def test_step_weights_integrate_exactly(self) -> None:
        w, h = np.array([1e-6, 0.5, 3.0]), 0.2
        decay, a, b = step_weights(w, h)
        np.testing.assert_allclose(decay, np.exp(-w * h))
        # a + b is the integral of e^{-ws} over one step.
        np.testing.assert_allclose(a + b, -np.expm1(-w * h) / w, rtol=1e-12)


# --- Green function ---


class TestGreenFunction:
    def test_variance_limits(self) -> None:
        assert float(green_variance(0.01, 0.5, 0.0, v0=0.2)) == pytest.approx(0.2)
        assert float(green_variance(0.01, 0.5, 100.0)) == pytest.approx(0.01)

    def test_solution_variances(self) -> None:
        spec = get_preset("noninteracting", alpha=0.5).spec
        solution = solve_transient(spec, make_grid(spec, 21, 3), t_final=2.0, dt=0.01)
        np.testing.assert_array_equal(solution.var[:, 0], 0.0)
        expected = green_variance(0.01, 0.5, 2.0)
        np.testing.assert_allclose(solution.var[:, -1], expected)

    def test_gaussian_start_keeps_initial_spread(self) -> None:
        spec = get_preset("homogeneous").spec
        init = GaussianInit(mean=1.0, var=0.04)
        solution = solve_transient(spec, make_grid(spec, 21, 3), t_final=1.0, dt=0.01, init=init)
        m, var = solution.moments_at(0.0)
        np.testing.assert_allclose(m, 1.0)
        np.testing.assert_allclose(var, 0.04)

    def test_mean_matches_marched_slice(self) -> None:
        spec = get_preset("proximity", n=0).spec
        grid = make_grid(spec, 101, 3)
        solution = solve_transient(spec, grid, t_final=5.0, dt=0.01)
        i = 75
        p = float(grid.p_nodes[i])
        mean, var = green_mean_var(spec, p, p, solution.phi_path, 5.0)
        assert mean == pytest.approx(solution.m[i, -1], abs=1e-4)
        assert var == pytest.approx(solution.var[i, -1])

    def test_green_function_needs_belief_independence(self) -> None:
        spec = get_preset("homogeneous").spec
        path = solve_phi_volterra(spec, make_grid(spec, 21, 3), t_final=1.0, dt=0.1)
        bounded = get_preset("bounded-rect").spec
        with pytest.raises(BeliefDependentZeta):
            green_mean_var(bounded, 0.0, 0.0, path, 0.5)

    def test_point_masses_keep_their_mass(self) -> None:
        spec = get_preset("homogeneous").spec
        grid = make_grid(spec, 41, 201)
        solution = solve_transient(spec, grid, t_final=2.0, dt=0.01)
        assert density_at(spec, solution, 0.0, grid).mass() == pytest.approx(1.0, abs=1e-12)
        assert density_at(spec, solution, 2.0, grid).mass() == pytest.approx(1.0, abs=1e-6)

    def test_density_outside_path(self) -> None:
        spec = get_preset("homogeneous").spec
        grid = make_grid(spec, 21, 51)
        solution = solve_transient(spec, grid, t_final=1.0, dt=0.1)
        with pytest.raises(TimeOutOfRange):
            density_at(spec, solution, 3.0, grid)

    @pytest.mark.slow
    def test_relaxes_to_stationary_density(self) -> None:
        preset = get_preset("event-driven")
        spec = preset.spec
        grid = make_grid(spec, 101, 401)
        t = 20.0 / slowest_relaxation_rate(spec, grid)
        solution = solve_transient(spec, grid, t_final=t, init=preset.initial)
        stationary = solve_stationary(spec, grid).density
        assert density_at(spec, solution, t, grid).l1_distance(stationary) <= 1e-2

    @pytest.mark.slow
    @pytest.mark.parametrize(
        ("name", "options"), [("inhomogeneous", {"shape": "abs", "n": 0}), ("proximity", {"n": 0})]
    )
    def test_prejudice_start_relaxes(self, name: str, options: dict) -> None:
        spec = get_preset(name, **options).spec
        grid = make_grid(spec, 101, 401)
        t = 20.0 / slowest_relaxation_rate(spec, grid)
        solution = solve_transient(spec, grid, t_final=t)
        stationary = solve_stationary(spec, grid).density
        assert density_at(spec, solution, t, grid).l1_distance(stationary) <= 1e-2

    @pytest.mark.slow
    def test_late_density_matches_product_closed_form(self) -> None:
        spec = get_preset("inhomogeneous", shape="abs", n=0).spec
        grid = make_grid(spec, 101, 401)
        t = 20.0 / slowest_relaxation_rate(spec, grid)
        solution = solve_transient(spec, grid, t_final=t)
        closed = closed_form_product(spec, grid).to_density(grid)
        assert density_at(spec, solution, t, grid).l1_distance(closed) <= 1e-3


# --- Laplace checks ---


class TestLaplace:
    def test_I2_homogeneous(self) -> None:  # noqa: N802
        spec = get_preset("homogeneous", alpha=0.5).spec
        assert laplace_I2(spec, 1.0) == pytest.approx(0.25)
        assert laplace_I2(spec, 1j) == pytest.approx(0.5 / (1 + 1j))

    def test_pole_on_path(self) -> None:
        spec = get_preset("homogeneous").spec
        with pytest.raises(PoleOnPath):
            laplace_I2(spec, -1.0)

    def test_I2_needs_product_form(self) -> None:  # noqa: N802
        with pytest.raises(UnsupportedScenario):
            laplace_I2(get_preset("event-driven").spec, 1.0)

    def test_product_form_residuals(self) -> None:
        spec = get_preset("proximity", n=0).spec
        path = solve_phi_volterra(spec, make_grid(spec, 101, 3), t_final=50.0, dt=0.01)
        residuals = laplace_consistency_check(spec, path, [0.5, 1.0, 2.0])
        assert [r.s for r in residuals] == [0.5, 1.0, 2.0]
        assert max(r.residual for r in residuals) <= 1e-4

    def test_general_kernel_residuals(self) -> None:
        spec = get_preset("proximity", n=2).spec
        path = solve_phi_volterra(spec, make_grid(spec, 61, 3), t_final=50.0, dt=0.01)
        residuals = laplace_consistency_check(spec, path, [1.0])
        assert residuals[0].residual <= 1e-4

    def test_symmetric_population_has_zero_residual(self) -> None:
        spec = get_preset("inhomogeneous").spec
        path = solve_phi_volterra(spec, make_grid(spec, 41, 3), t_final=30.0, dt=0.05)
        (residual,) = laplace_consistency_check(spec, path, [1.0])
        assert residual.residual <= 1e-6

    def test_path_too_short(self) -> None:
        spec = get_preset("homogeneous").spec
        path = solve_phi_volterra(spec, make_grid(spec, 21, 3), t_final=5.0, dt=0.1)
        with pytest.raises(PathTooShort, match="t >="):
            laplace_consistency_check(spec, path, [0.5])

    def test_samples_must_be_positive(self) -> None:
        spec = get_preset("homogeneous").spec
        path = solve_phi_volterra(spec, make_grid(spec, 21, 3), t_final=5.0, dt=0.1)
        with pytest.raises(ValueError, match="positive"):
            laplace_consistency_check(spec, path, [-1.0])
