"""Tests for grids, density fields, special functions and dense solves."""

from pathlib import Path

import numpy as np
import pytest

from beliefs.errors import DomainEmpty, SingularMatrix
from beliefs.numerics import (
    DenseSolver,
    DensityField,
    erf_eval,
    solve_dense,
    trapezoid_weights,
    uniform_grid,
)
from beliefs.numerics.density import integrate_x, write_marginal
from beliefs.numerics.special import gaussian_pdf


def _make_grid(n_p: int = 5, n_x: int = 9):
    return uniform_grid((-1.0, 1.0), (-2.0, 2.0), n_p, n_x)


# --- Grids ---


class TestTrapezoidWeights:
    def test_uniform_weights_sum_to_length(self) -> None:
        weights = trapezoid_weights(np.linspace(0.0, 3.0, 7))
        assert weights.sum() == pytest.approx(3.0)
        assert weights[0] == pytest.approx(0.25)
        assert weights[3] == pytest.approx(0.5)

    def test_non_uniform_nodes_integrate_linear_exactly(self) -> None:
        nodes = np.array([0.0, 0.1, 0.5, 0.6, 2.0])
        weights = trapezoid_weights(nodes)
        assert weights @ (3.0 * nodes + 1.0) == pytest.approx(1.5 * 4.0 + 2.0)


class TestGrid:
    def test_shape_and_bounds(self) -> None:
        grid = _make_grid(5, 9)
        assert grid.shape == (5, 9)
        assert grid.p_bounds == (-1.0, 1.0)
        assert grid.x_bounds == (-2.0, 2.0)

    def test_too_few_nodes_rejected(self) -> None:
        with pytest.raises(DomainEmpty):
            uniform_grid((-1.0, 1.0), (-1.0, 1.0), 2, 10)

    def test_empty_interval_rejected(self) -> None:
        with pytest.raises(DomainEmpty):
            uniform_grid((1.0, 1.0), (-1.0, 1.0), 5, 10)

    def test_unbounded_interval_rejected(self) -> None:
        with pytest.raises(DomainEmpty):
            uniform_grid((-1.0, 1.0), (-np.inf, np.inf), 5, 10)

    def test_nearest_x_prefers_lowest_index_on_ties(self) -> None:
        grid = uniform_grid((-1.0, 1.0), (0.0, 1.0), 3, 3)
        assert grid.nearest_x(0.25) == 0
        assert grid.nearest_x(0.9) == 2

    def test_same_nodes(self) -> None:
        assert _make_grid().same_nodes(_make_grid())
        assert not _make_grid(5, 9).same_nodes(_make_grid(5, 11))


# --- Density fields ---


class TestDensityField:
    def setup_method(self) -> None:
        self.grid = _make_grid(5, 9)

    def test_constant_field_mass(self) -> None:
        field = DensityField(self.grid, np.full(self.grid.shape, 0.125))
        assert field.mass() == pytest.approx(1.0)

    def test_shape_mismatch_rejected(self) -> None:
        with pytest.raises(ValueError, match="shape"):
            DensityField(self.grid, np.ones((4, 9)))

    def test_normalize(self) -> None:
        field = DensityField(self.grid, np.full(self.grid.shape, 3.0)).normalize()
        assert field.mass() == pytest.approx(1.0)

    def test_marginals(self) -> None:
        field = DensityField(self.grid, np.full(self.grid.shape, 0.125))
        np.testing.assert_allclose(field.marginal_p(), 0.5)
        np.testing.assert_allclose(field.marginal_x(), 0.25)
        assert integrate_x(field, 2) == pytest.approx(0.5)

    def test_mean_belief_per_slice(self) -> None:
        values = np.zeros(self.grid.shape)
        values[1, 6] = 2.0  # x = 1.0, cell weight 0.5
        field = DensityField(self.grid, values)
        mean = field.mean_belief()
        assert mean[1] == pytest.approx(1.0)
        assert mean[0] == 0.0

    def test_l1_distance(self) -> None:
        a = DensityField(self.grid, np.full(self.grid.shape, 0.125))
        b = DensityField(self.grid, np.zeros(self.grid.shape))
        assert a.l1_distance(b) == pytest.approx(1.0)
        assert a.l1_distance(a) == 0.0

    def test_l1_distance_needs_same_grid(self) -> None:
        a = DensityField(self.grid, np.zeros(self.grid.shape))
        other = _make_grid(5, 11)
        with pytest.raises(ValueError, match="different grids"):
            a.l1_distance(DensityField(other, np.zeros(other.shape)))

    def test_csv_keeps_full_precision(self, tmp_path: Path) -> None:
        rng = np.random.default_rng(0)
        field = DensityField(self.grid, rng.random(self.grid.shape))
        path = tmp_path / "density.csv"
        field.to_csv(path)
        restored = DensityField.from_csv(path)
        assert restored.grid.same_nodes(self.grid)
        np.testing.assert_array_equal(restored.values, field.values)

    def test_csv_header_and_line_endings(self, tmp_path: Path) -> None:
        field = DensityField(self.grid, np.zeros(self.grid.shape))
        path = tmp_path / "out" / "density.csv"
        field.to_csv(path)
        raw = path.read_bytes()
        assert raw.startswith(b"p,x,rho\n")
        assert b"\r\n" not in raw
        assert raw.count(b"\n") == 1 + 5 * 9

    def test_write_marginal(self, tmp_path: Path) -> None:
        path = tmp_path / "marginal.csv"
        write_marginal(np.array([0.0, 1.0]), np.array([0.5, 0.25]), path)
        assert path.read_text(encoding="utf-8") == "x,rho\n0,0.5\n1,0.25\n"


# --- Special functions ---


class TestSpecial:
    def test_erf_scalar_and_array(self) -> None:
        assert erf_eval(0.0) == 0.0
        assert isinstance(erf_eval(0.5), float)
        np.testing.assert_allclose(erf_eval(np.array([-3.0, 3.0])), [-0.9999779095, 0.9999779095])

    def test_gaussian_pdf_integrates_to_one(self) -> None:
        x = np.linspace(-2.0, 2.0, 4001)
        density = gaussian_pdf(x, 0.3, 0.01)
        assert trapezoid_weights(x) @ density == pytest.approx(1.0, abs=1e-12)


# --- Dense solves ---


class TestDenseSolver:
    def test_solves_system(self) -> None:
        a = np.array([[4.0, 1.0], [2.0, 3.0]])
        x = solve_dense(a, np.array([1.0, 2.0]))
        np.testing.assert_allclose(a @ x, [1.0, 2.0])

    def test_factor_reused_for_many_right_hand_sides(self) -> None:
        a = np.array([[2.0, 0.0, 0.0], [0.0, 4.0, 0.0], [1.0, 0.0, 1.0]])
        solver = DenseSolver(a)
        for b in np.eye(3):
            np.testing.assert_allclose(a @ solver.solve(b), b)

    def test_singular_matrix(self) -> None:
        with pytest.raises(SingularMatrix):
            DenseSolver(np.array([[1.0, 2.0], [2.0, 4.0]]))

    def test_non_square_rejected(self) -> None:
        with pytest.raises(ValueError, match="square"):
            DenseSolver(np.ones((2, 3)))

    def test_wrong_rhs_length(self) -> None:
        with pytest.raises(ValueError, match="rows"):
            DenseSolver(np.eye(2)).solve(np.ones(3))
