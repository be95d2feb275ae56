"""Densities sampled on a Grid, plus their CSV form."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pandas as pd

from beliefs.numerics.grid import Grid, trapezoid_weights

logger = logging.getLogger(__name__)

CSV_FLOAT_FORMAT = "%.17g"


@dataclass(eq=False)
class DensityField:
    """rho(p_i, x_j) on a grid; rows are personalities, columns beliefs."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self) -> None:
        """Coerce values to a float matrix matching the grid."""
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != self.grid.shape:
            raise ValueError(
                f"values have shape {self.values.shape}, grid expects {self.grid.shape}"
            )

    def mass(self) -> float:
        """Total mass by tensor trapezoid quadrature."""
        return float(self.grid.p_weights @ self.values @ self.grid.x_weights)

    def normalize(self) -> DensityField:
        """Return a copy scaled to unit total mass."""
        return DensityField(self.grid, self.values / self.mass())

    def marginal_p(self) -> np.ndarray:
        """Personality marginal: the integral over x for every p node."""
        return self.values @ self.grid.x_weights

    def marginal_x(self) -> np.ndarray:
        """Belief marginal rho(x): the integral over p for every x node."""
        return self.grid.p_weights @ self.values

    def mean_belief(self) -> np.ndarray:
        """First belief moment per p slice, normalized by the slice mass."""
        slice_mass = self.marginal_p()
        first = self.values @ (self.grid.x_weights * self.grid.x_nodes)
        return np.divide(first, slice_mass, out=np.zeros_like(first), where=slice_mass > 0)

    def l1_distance(self, other: DensityField) -> float:
        """Integral of |self - other| over the shared grid."""
        if not self.grid.same_nodes(other.grid):
            raise ValueError("fields live on different grids")
        diff = np.abs(self.values - other.values)
        return float(self.grid.p_weights @ diff @ self.grid.x_weights)

    def to_frame(self) -> pd.DataFrame:
        """Long-form table with columns p, x, rho in row-major grid order."""
        p, x = np.meshgrid(self.grid.p_nodes, self.grid.x_nodes, indexing="ij")
        return pd.DataFrame({"p": p.ravel(), "x": x.ravel(), "rho": self.values.ravel()})

    def to_csv(self, path: Path) -> None:
        """Write the field as ``p,x,rho`` with 17 significant digits."""
        write_frame(self.to_frame(), path)

    @classmethod
    def from_csv(cls, path: Path) -> DensityField:
        """Read a field written by to_csv, rebuilding trapezoid weights."""
        frame = pd.read_csv(path, float_precision="round_trip")
        p_nodes = np.unique(frame["p"].to_numpy())
        x_nodes = np.unique(frame["x"].to_numpy())
        values = frame["rho"].to_numpy().reshape(len(p_nodes), len(x_nodes))
        grid = Grid(
            p_nodes=p_nodes,
            x_nodes=x_nodes,
            p_weights=trapezoid_weights(p_nodes),
            x_weights=trapezoid_weights(x_nodes),
        )
        return cls(grid, values)


def integrate_x(field: DensityField, p_index: int) -> float:
    """Integral over beliefs of one personality slice."""
    return float(field.grid.x_weights @ field.values[p_index])


def write_frame(frame: pd.DataFrame, path: Path) -> None:
    """Write a CSV with full float precision, UTF-8 and LF endings."""
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(
        path,
        index=False,
        float_format=CSV_FLOAT_FORMAT,
        encoding="utf-8",
        lineterminator="\n",
    )
    logger.debug("Wrote %d rows to %s", len(frame), path)


def write_marginal(x_nodes: np.ndarray, rho_x: np.ndarray, path: Path) -> None:
    """Write a belief marginal as ``x,rho``."""
    write_frame(pd.DataFrame({"x": x_nodes, "rho": rho_x}), path)
