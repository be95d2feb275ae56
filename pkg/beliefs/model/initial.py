"""Initial belief distributions shared by the transient solver and the simulator."""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

if TYPE_CHECKING:
    from beliefs.model.scenario import ScenarioSpec


@dataclass(frozen=True)
class PrejudiceInit:
    """Every agent starts at its own prejudice: a point mass at u(p)."""

    label = "prejudice"

    def mean_at(self, spec: ScenarioSpec, p: np.ndarray) -> np.ndarray:
        """Initial mean belief x0(p) = u(p)."""
        return np.asarray(spec.prejudice(np.asarray(p, dtype=float)), dtype=float)

    def var_at(self, p: np.ndarray) -> np.ndarray:
        """Initial belief variance (zero for point masses)."""
        return np.zeros(np.shape(p))


@dataclass(frozen=True)
class GaussianInit:
    """All agents drawn from N(mean, var) regardless of personality."""

    mean: float
    var: float

    label = "gaussian"

    def __post_init__(self) -> None:
        """Reject negative variances."""
        if self.var < 0:
            raise ValueError(f"initial variance must be >= 0, got {self.var}")

    def mean_at(self, spec: ScenarioSpec, p: np.ndarray) -> np.ndarray:
        """Initial mean belief, constant in p."""
        return np.full(np.shape(p), self.mean, dtype=float)

    def var_at(self, p: np.ndarray) -> np.ndarray:
        """Initial belief variance, constant in p."""
        return np.full(np.shape(p), self.var, dtype=float)


InitialCondition = PrejudiceInit | GaussianInit


def parse_initial(text: str) -> InitialCondition:
    """Parse ``prejudice`` or ``gaussian:MEAN,VAR`` as used on the command line."""
    text = text.strip().lower()
    if text == "prejudice":
        return PrejudiceInit()
    if text.startswith("gaussian:"):
        mean, var = (float(part) for part in text.removeprefix("gaussian:").split(","))
        return GaussianInit(mean=mean, var=var)
    raise ValueError(f"unknown initial condition '{text}' (use prejudice or gaussian:MEAN,VAR)")
