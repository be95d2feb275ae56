"""Locate the modes of a belief marginal."""

import numpy as np
from scipy.signal import find_peaks

MIN_PROMINENCE = 0.01  # fraction of the marginal's maximum


def find_modes(
    x_nodes: np.ndarray, rho_x: np.ndarray, prominence: float = MIN_PROMINENCE
) -> list[float]:
    """Beliefs where the marginal peaks with at least ``prominence`` x max height."""
    rho_x = np.asarray(rho_x, dtype=float)
    peak_height = float(rho_x.max())
    if peak_height <= 0:
        return []
    # Pad with zeros so maxima sitting on the domain ends still count.
    padded = np.concatenate([[0.0], rho_x, [0.0]])
    peaks, _ = find_peaks(padded, prominence=prominence * peak_height)
    return [float(x_nodes[i - 1]) for i in peaks]


def two_cluster_split(
    x_nodes: np.ndarray,
    rho_x: np.ndarray,
    center: float = 0.5,
    tol: float = 0.05,
    max_valley: float = 0.5,
) -> bool:
    """Whether the marginal splits into two clusters at -center and +center.

    The two tallest modes must lie within ``tol`` of -center and +center,
    and the marginal between them must drop below ``max_valley`` times the
    lower of the two peaks.
    """
    x_nodes = np.asarray(x_nodes, dtype=float)
    rho_x = np.asarray(rho_x, dtype=float)
    modes = find_modes(x_nodes, rho_x)
    if len(modes) < 2:
        return False
    heights = np.interp(modes, x_nodes, rho_x)
    tallest = np.argsort(heights)[::-1][:2]
    left, right = sorted(modes[i] for i in tallest)
    if abs(left + center) > tol or abs(right - center) > tol:
        return False
    between = (x_nodes >= left) & (x_nodes <= right)
    valley = float(rho_x[between].min())
    return valley <= max_valley * float(heights[tallest].min())
