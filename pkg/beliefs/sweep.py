"""Parameter sweeps of the stationary belief marginal, as plot-ready tables."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path

import pandas as pd

from beliefs.config import settings
from beliefs.errors import NotConverged
from beliefs.model.presets import get_preset
from beliefs.numerics.density import write_frame
from beliefs.numerics.grid import make_grid
from beliefs.stationary import solve_stationary

logger = logging.getLogger(__name__)

ParameterSet = dict[str, float | int | str]


@dataclass(frozen=True)
class SweepFamily:
    """One preset solved at several parameter sets."""

    name: str
    preset: str
    members: list[ParameterSet]

    def label(self, params: ParameterSet) -> str:
        """Short label such as ``alpha=0.1,n=8``."""
        return ",".join(f"{k}={v}" for k, v in params.items())


FAMILIES: list[SweepFamily] = [
    SweepFamily(
        "homogeneous-sigma2",
        "homogeneous",
        [{"alpha": 0.5, "sigma2": s} for s in (0.001, 0.005, 0.01, 0.05)],
    ),
    SweepFamily(
        "homogeneous-alpha",
        "homogeneous",
        [{"alpha": a, "sigma2": 0.01} for a in (0.1, 0.3, 0.5, 1.0)],
    ),
    SweepFamily(
        "inhomogeneous",
        "inhomogeneous",
        [{"shape": s, "n": n} for s in ("one-minus-abs", "abs") for n in (0, 8)],
    ),
    SweepFamily("proximity", "proximity", [{"n": n} for n in (0, 1, 2, 4, 8)]),
    SweepFamily(
        "community-symmetric",
        "community",
        [{"kappa": k, "variant": "symmetric"} for k in (0.1, 0.5, 1.0, 2.0)],
    ),
    SweepFamily(
        "community-one-sided",
        "community",
        [{"kappa": k, "variant": "one-sided"} for k in (0.1, 0.5, 1.0, 2.0)],
    ),
    SweepFamily(
        "bounded-sigma2",
        "bounded-rect",
        [{"alpha": 0.1, "sigma2": s} for s in (1e-3, 1e-2, 1e-1)],
    ),
    SweepFamily(
        "bounded-alpha",
        "bounded-rect",
        [{"alpha": a, "sigma2": 1e-3} for a in (0.1, 0.2, 0.3)],
    ),
]


@dataclass
class SweepResult:
    """Marginals of every member of a family, plus the members that failed."""

    family: str
    frame: pd.DataFrame
    modes: dict[str, list[float]] = field(default_factory=dict)
    unconverged: list[str] = field(default_factory=list)


def family_names() -> list[str]:
    """Names of the built-in sweep families."""
    return [family.name for family in FAMILIES]


def run_family(
    family: SweepFamily,
    n_p: int | None = None,
    n_x: int | None = None,
    threads: int | None = None,
) -> SweepResult:
    """Solve each member and stack the marginals as ``label,x,rho``."""
    n_p = n_p or settings.grid_np
    n_x = n_x or settings.grid_nx
    frames = []
    result = SweepResult(family=family.name, frame=pd.DataFrame())
    for params in family.members:
        label = family.label(params)
        spec = get_preset(family.preset, **params).spec
        grid = make_grid(spec, n_p, n_x)
        try:
            solved = solve_stationary(spec, grid, threads=threads)
        except NotConverged as e:
            logger.warning("%s [%s]: %s", family.name, label, e)
            result.unconverged.append(label)
            continue
        if not solved.converged:
            result.unconverged.append(label)
        result.modes[label] = solved.modes
        frames.append(pd.DataFrame({"label": label, "x": grid.x_nodes, "rho": solved.marginal}))
        logger.info("%s [%s]: %d mode(s)", family.name, label, len(solved.modes))
    if frames:
        result.frame = pd.concat(frames, ignore_index=True)
    return result


def run_sweeps(
    names: list[str] | None,
    out_dir: Path,
    n_p: int | None = None,
    n_x: int | None = None,
    threads: int | None = None,
) -> list[SweepResult]:
    """Run the selected families and write ``sweep_<family>.csv`` for each."""
    selected = [f for f in FAMILIES if names is None or f.name in names]
    results = []
    for family in selected:
        result = run_family(family, n_p, n_x, threads)
        write_frame(result.frame, out_dir / f"sweep_{family.name}.csv")
        results.append(result)
    return results
