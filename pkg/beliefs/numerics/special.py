"""Special functions and Gaussian helpers."""

import numpy as np
from scipy import special


def erf_eval(z: float | np.ndarray) -> float | np.ndarray:
    """Error function, accurate to double precision over the real line."""
    result = special.erf(z)
    return float(result) if np.ndim(result) == 0 else result


def gaussian_pdf(x: np.ndarray, mean: np.ndarray, var: np.ndarray) -> np.ndarray:
    """Normal density N(mean, var) evaluated with broadcasting."""
    return np.exp(-((x - mean) ** 2) / (2 * var)) / np.sqrt(2 * np.pi * var)
