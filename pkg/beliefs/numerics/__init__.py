"""Grids, quadrature, special functions and dense linear algebra."""

from beliefs.numerics.density import DensityField, integrate_x
from beliefs.numerics.grid import Grid, make_grid, trapezoid_weights, uniform_grid
from beliefs.numerics.linalg import DenseSolver, solve_dense
from beliefs.numerics.special import erf_eval

__all__ = [
    "DenseSolver",
    "DensityField",
    "Grid",
    "erf_eval",
    "integrate_x",
    "make_grid",
    "solve_dense",
    "trapezoid_weights",
    "uniform_grid",
]
