"""Empirical measures of an agent ensemble."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import pandas as pd
from scipy.integrate import cumulative_trapezoid

from beliefs.config import settings
from beliefs.mcsim.ensemble import AgentEnsemble
from beliefs.model.scenario import ScenarioSpec


@dataclass(eq=False)
class EmpiricalHistogram:
    """Fraction of agents per (p, x) bin at time t.

    Attributes:
        t: Capture time.
        p_edges: Personality bin edges.
        x_edges: Belief bin edges.
        mass: mass[i, j] = fraction of agents in p bin i and x bin j; sums to 1.
    """

    t: float
    p_edges: np.ndarray
    x_edges: np.ndarray
    mass: np.ndarray

    @property
    def p_centers(self) -> np.ndarray:
        """Personality bin midpoints."""
        return (self.p_edges[1:] + self.p_edges[:-1]) / 2

    @property
    def x_centers(self) -> np.ndarray:
        """Belief bin midpoints."""
        return (self.x_edges[1:] + self.x_edges[:-1]) / 2

    def marginal_x(self) -> np.ndarray:
        """Fraction of agents per belief bin."""
        return self.mass.sum(axis=0)

    def density_x(self) -> np.ndarray:
        """Belief marginal as a piecewise-constant density."""
        return self.marginal_x() / np.diff(self.x_edges)

    def to_frame(self) -> pd.DataFrame:
        """Rows ``t,p_bin_center,x_bin_center,mass``."""
        p, x = np.meshgrid(self.p_centers, self.x_centers, indexing="ij")
        return pd.DataFrame(
            {
                "t": np.full(p.size, self.t),
                "p_bin_center": p.ravel(),
                "x_bin_center": x.ravel(),
                "mass": self.mass.ravel(),
            }
        )


def histogram_range(spec: ScenarioSpec) -> tuple[float, float]:
    """Belief range of the bins: the compact domain, or the truncation radius."""
    if spec.belief_domain.compact:
        return spec.belief_domain.bounds
    radius = spec.truncation_radius(settings.validation_np)
    return -radius, radius


def empirical_density(
    ens: AgentEnsemble,
    p_bins: int | None = None,
    x_bins: int | None = None,
    x_range: tuple[float, float] | None = None,
) -> EmpiricalHistogram:
    """Normalized 2-D histogram of (P_i, X_i).

    Agents outside x_range are counted in the edge bins so the mass is
    exactly one.
    """
    p_bins = p_bins or settings.mc_p_bins
    x_bins = x_bins or settings.mc_x_bins
    if p_bins < 1 or x_bins < 1:
        raise ValueError(f"bin counts must be >= 1, got p_bins={p_bins}, x_bins={x_bins}")
    x_lo, x_hi = x_range or histogram_range(ens.spec)
    p_lo, p_hi = ens.spec.personality_domain
    p_edges = np.linspace(p_lo, p_hi, p_bins + 1)
    x_edges = np.linspace(x_lo, x_hi, x_bins + 1)
    p_index = np.clip(np.searchsorted(p_edges, ens.personalities, side="right") - 1, 0, p_bins - 1)
    x_index = np.clip(np.searchsorted(x_edges, ens.beliefs, side="right") - 1, 0, x_bins - 1)
    counts = np.zeros((p_bins, x_bins))
    np.add.at(counts, (p_index, x_index), 1.0)
    return EmpiricalHistogram(
        t=ens.time, p_edges=p_edges, x_edges=x_edges, mass=counts / ens.size
    )


def average_histograms(snapshots: list[EmpiricalHistogram], burn_in: float) -> EmpiricalHistogram:
    """Mean of the snapshots captured at or after burn_in * (last time).

    Raises:
        ValueError: No snapshots, or they use different bins.
    """
    if not snapshots:
        raise ValueError("no histogram snapshots to average")
    first = snapshots[0]
    for snap in snapshots[1:]:
        same = np.array_equal(snap.p_edges, first.p_edges) and np.array_equal(
            snap.x_edges, first.x_edges
        )
        if not same:
            raise ValueError("snapshots use different bins")
    t_end = snapshots[-1].t
    kept = [snap for snap in snapshots if snap.t >= burn_in * t_end] or [snapshots[-1]]
    mass = np.mean([snap.mass for snap in kept], axis=0)
    return EmpiricalHistogram(t=t_end, p_edges=first.p_edges, x_edges=first.x_edges, mass=mass)


def bin_marginal(x_nodes: np.ndarray, rho_x: np.ndarray, x_edges: np.ndarray) -> np.ndarray:
    """Mass of a sampled belief marginal inside each bin (normalized to 1)."""
    cdf = cumulative_trapezoid(rho_x, x_nodes, initial=0.0)
    at_edges = np.interp(x_edges, x_nodes, cdf)
    # Mass beyond the outer edges belongs to the edge bins, as for the agents.
    at_edges[0], at_edges[-1] = 0.0, cdf[-1]
    mass = np.diff(at_edges)
    return mass / mass.sum()


def marginal_l1(hist: EmpiricalHistogram, x_nodes: np.ndarray, rho_x: np.ndarray) -> float:
    """L1 distance between the histogram's belief marginal and a density marginal."""
    return float(np.sum(np.abs(hist.marginal_x() - bin_marginal(x_nodes, rho_x, hist.x_edges))))
