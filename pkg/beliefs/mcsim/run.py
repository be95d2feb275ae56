"""Repeated stepping with periodic capture of histograms and summary statistics."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import pandas as pd

from beliefs.config import settings
from beliefs.mcsim.dynamics import check_step, default_dt, mc_step, select_path
from beliefs.mcsim.ensemble import AgentEnsemble
from beliefs.mcsim.histogram import (
    EmpiricalHistogram,
    average_histograms,
    empirical_density,
    histogram_range,
)
from beliefs.numerics.density import write_frame

logger = logging.getLogger(__name__)

SUMMARY_STATS = ("mean_belief", "belief_variance", "max_abs_belief")


@dataclass(eq=False)
class MCTrajectory:
    """Histograms and summary time series captured during a run."""

    snapshots: list[EmpiricalHistogram] = field(default_factory=list)
    times: list[float] = field(default_factory=list)
    stats: dict[str, list[float]] = field(
        default_factory=lambda: {name: [] for name in SUMMARY_STATS}
    )

    def record(
        self, ens: AgentEnsemble, p_bins: int, x_bins: int, x_range: tuple[float, float]
    ) -> None:
        """Capture the ensemble's current histogram and statistics."""
        x = ens.beliefs
        self.times.append(ens.time)
        self.stats["mean_belief"].append(float(np.mean(x)))
        self.stats["belief_variance"].append(float(np.var(x)))
        self.stats["max_abs_belief"].append(float(np.max(np.abs(x))))
        self.snapshots.append(empirical_density(ens, p_bins, x_bins, x_range))

    @property
    def final(self) -> EmpiricalHistogram:
        """Last captured histogram."""
        return self.snapshots[-1]

    def averaged(self, burn_in: float | None = None) -> EmpiricalHistogram:
        """Histogram averaged over the snapshots after the burn-in fraction."""
        return average_histograms(
            self.snapshots, settings.mc_burn_in if burn_in is None else burn_in
        )

    def series(self, name: str) -> np.ndarray:
        """One summary statistic over the capture times."""
        return np.asarray(self.stats[name])

    def summary_frame(self) -> pd.DataFrame:
        """Long-form ``t,stat_name,value`` table."""
        rows = [
            (t, name, value)
            for name in SUMMARY_STATS
            for t, value in zip(self.times, self.stats[name], strict=True)
        ]
        return pd.DataFrame(rows, columns=["t", "stat_name", "value"])

    def histogram_frame(self) -> pd.DataFrame:
        """Every snapshot stacked as ``t,p_bin_center,x_bin_center,mass``."""
        return pd.concat([snap.to_frame() for snap in self.snapshots], ignore_index=True)

    def write(self, out_dir: Path) -> dict[str, Path]:
        """Write trajectory.csv and histograms.csv under out_dir."""
        paths = {
            "trajectory": out_dir / "trajectory.csv",
            "histograms": out_dir / "histograms.csv",
        }
        write_frame(self.summary_frame(), paths["trajectory"])
        write_frame(self.histogram_frame(), paths["histograms"])
        return paths


def mc_run(
    ens: AgentEnsemble,
    t_final: float,
    dt: float | None = None,
    record_every: int | None = None,
    p_bins: int | None = None,
    x_bins: int | None = None,
    x_range: tuple[float, float] | None = None,
    threads: int | None = None,
) -> MCTrajectory:
    """Step the ensemble up to time t_final, recording as it goes.

    Args:
        ens: The ensemble; advanced in place.
        t_final: Absolute end time.
        dt: Step; defaults to 1e-3 / max(1, S_zeta). The last step is shortened
            to land on t_final.
        record_every: Steps between captures; the start and end are always captured.
        p_bins: Personality bins of the histograms.
        x_bins: Belief bins of the histograms.
        x_range: Belief range of the bins; defaults to the belief domain.
        threads: Worker threads for the interaction sums.

    Raises:
        StepTooLarge: dt * (max alpha + S_zeta) >= 0.5.
    """
    dt = default_dt(ens.spec) if dt is None else dt
    record_every = record_every or settings.mc_record_every
    p_bins = p_bins or settings.mc_p_bins
    x_bins = x_bins or settings.mc_x_bins
    x_range = x_range or histogram_range(ens.spec)
    check_step(ens, dt)

    remaining = t_final - ens.time
    n_steps = max(0, math.ceil(remaining / dt - 1e-9))
    logger.info(
        "Simulating %d agents of '%s' for %d steps of %.3g (%s interactions)",
        ens.size,
        ens.spec.name,
        n_steps,
        dt,
        select_path(ens.spec).value,
    )
    trajectory = MCTrajectory()
    trajectory.record(ens, p_bins, x_bins, x_range)
    for k in range(1, n_steps + 1):
        left = t_final - ens.time
        step = left if k == n_steps and 0 < left < dt else dt
        mc_step(ens, step, threads)
        if k % record_every == 0 or k == n_steps:
            trajectory.record(ens, p_bins, x_bins, x_range)
        if k % (record_every * 100) == 0:
            logger.debug("t = %.4g, mean belief %.4g", ens.time, np.mean(ens.beliefs))
    return trajectory
