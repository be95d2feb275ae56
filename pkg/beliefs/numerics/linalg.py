"""Dense LU solves with partial pivoting."""

import warnings

import numpy as np
from scipy.linalg import LinAlgWarning, lu_factor, lu_solve

from beliefs.errors import SingularMatrix

PIVOT_RTOL = 1e-14


class DenseSolver:
    """LU factorization of a square matrix, reusable across right-hand sides."""

    def __init__(self, a: np.ndarray) -> None:
        """Factor ``a``; raise SingularMatrix when a pivot is negligible."""
        a = np.asarray(a, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {a.shape}")
        self.n = a.shape[0]
        row_norm = float(np.abs(a).sum(axis=1).max()) if self.n else 0.0
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", LinAlgWarning)
            self._lu, self._piv = lu_factor(a)
        pivots = np.abs(np.diag(self._lu))
        if row_norm == 0.0 or pivots.min() < PIVOT_RTOL * row_norm:
            raise SingularMatrix(
                f"pivot {pivots.min():.3e} below {PIVOT_RTOL:g} x row norm {row_norm:.3e}"
            )

    def solve(self, b: np.ndarray) -> np.ndarray:
        """Solve A x = b for the factored A."""
        b = np.asarray(b, dtype=float)
        if b.shape[0] != self.n:
            raise ValueError(f"right-hand side has {b.shape[0]} rows, expected {self.n}")
        return lu_solve((self._lu, self._piv), b)


def solve_dense(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve a dense square system in one call."""
    return DenseSolver(a).solve(b)
