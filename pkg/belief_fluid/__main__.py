"""CLI interface for the belief-fluid toolkit.

Usage:
    python -m belief_fluid stationary --preset homogeneous --alpha 0.5 --sigma2 0.01
    python -m belief_fluid transient --preset event-driven --snapshot-times 0,1,10
    python -m belief_fluid mc --preset bounded-rect --alpha 0.3 --U 1000 --seed 7
    python -m belief_fluid validate --only stationary
    python -m belief_fluid scenarios

Exit codes: 0 success, 1 validation failure or numerical error, 2 configuration
error, 3 fixed point not converged (results still written), 4 scenario not
supported by the solver, 5 time step too large.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import asdict
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd

from beliefs.config import __version__, settings
from beliefs.errors import (
    BeliefDependentZeta,
    GridError,
    NotConverged,
    NumericalError,
    ScenarioError,
    StepTooLarge,
    UnsupportedScenario,
)
from beliefs.manifest import RunManifest
from beliefs.mcsim import drift_diagnostic, init_ensemble, marginal_l1, mc_run
from beliefs.mcsim.dynamics import default_dt
from beliefs.model import GaussianInit, InitialCondition, ScenarioPreset
from beliefs.model.initial import parse_initial
from beliefs.model.loader import load_config, load_scenario
from beliefs.model.presets import get_preset, preset_names, preset_parameters
from beliefs.model.schemas import CoefficientConfig, NoiseConfig, ScenarioConfig
from beliefs.numerics.density import DensityField, write_frame, write_marginal
from beliefs.numerics.grid import Grid, make_grid
from beliefs.reports import write_report
from beliefs.stationary.solve import METHODS, solve_stationary
from beliefs.transient import density_at, laplace_consistency_check, solve_transient
from beliefs.transient.volterra import slowest_relaxation_rate
from beliefs.validation import GROUPS, run_validation

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_CONFIG = 2
EXIT_NOT_CONVERGED = 3
EXIT_UNSUPPORTED = 4
EXIT_STEP = 5

# Six standard deviations keep a Gaussian start inside the truncated belief line.
INITIAL_TAIL_WIDTHS = 6.0


# --- Argument helpers ---


def parse_floats(text: str) -> list[float]:
    """Comma-separated floats, e.g. ``0,1,10``."""
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        message = f"expected comma-separated numbers, got '{text}'"
        raise argparse.ArgumentTypeError(message) from None


def parse_grid(text: str) -> tuple[int, int]:
    """``np,nx`` grid sizes."""
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected np,nx, got '{text}'")
    try:
        return int(parts[0]), int(parts[1])
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected two integers, got '{text}'") from None


def scenario_config(args: argparse.Namespace) -> ScenarioConfig:
    """The configuration record after command-line overrides.

    Flags beat file values, which beat preset defaults.
    """
    if args.config is not None:
        config = load_config(args.config)
        if args.preset is not None:
            config = config.model_copy(update={"preset": args.preset})
    elif args.preset is not None:
        config = ScenarioConfig(preset=args.preset)
    else:
        raise ScenarioError("give --config or --preset (see the 'scenarios' subcommand)")

    parameters = dict(config.parameters)
    updates: dict[str, object] = {}
    accepted = preset_parameters(config.preset) if config.preset is not None else {}
    if args.alpha is not None:
        if "alpha" in accepted and config.alpha is None:
            parameters["alpha"] = args.alpha
        else:
            updates["alpha"] = CoefficientConfig(constant=args.alpha)
    if args.sigma2 is not None:
        if "sigma2" in accepted and config.sigma2 is None:
            parameters["sigma2"] = args.sigma2
        else:
            updates["sigma2"] = NoiseConfig(value=args.sigma2)
    if parameters != config.parameters:
        updates["parameters"] = parameters
    return config.model_copy(update=updates) if updates else config


def resolve_initial(args: argparse.Namespace, preset: ScenarioPreset) -> InitialCondition:
    """--init beats the configured or preset initial condition."""
    if getattr(args, "init", None) is None:
        return preset.initial
    try:
        return parse_initial(args.init)
    except ValueError as e:
        raise ScenarioError(str(e)) from e


def resolve_grid(
    args: argparse.Namespace,
    config: ScenarioConfig,
    preset: ScenarioPreset,
    init: InitialCondition | None = None,
) -> Grid:
    """Grid from --grid, then the config's [grid], then settings."""
    n_p, n_x = settings.grid_np, settings.grid_nx
    if config.grid is not None:
        n_p = config.grid.n_p or n_p
        n_x = config.grid.n_x or n_x
    if args.grid is not None:
        n_p, n_x = args.grid
    x_reach = None
    if isinstance(init, GaussianInit):
        x_reach = abs(init.mean) + INITIAL_TAIL_WIDTHS * float(np.sqrt(init.var))
    return make_grid(preset.spec, n_p, n_x, x_reach=x_reach)


def run_value(args: argparse.Namespace, config: ScenarioConfig, name: str) -> Any:
    """A run control from its flag, else from the config's [run] table."""
    flag = getattr(args, name, None)
    if flag is not None:
        return flag
    if config.run is not None:
        return getattr(config.run, name)
    return None


def start_run(
    args: argparse.Namespace,
    preset: ScenarioPreset,
    grid: Grid | None = None,
    seed: int | None = None,
    **parameters: object,
) -> Path:
    """Create the output directory and write the manifest before any result."""
    out_dir: Path = args.out
    source = str(args.config) if args.config is not None else f"preset:{preset.name}"
    manifest = RunManifest(
        subcommand=args.command,
        scenario_source=source,
        argv=list(args.argv),
        output_dir=str(out_dir),
        seed=seed,
        grid={"np": grid.n_p, "nx": grid.n_x} if grid is not None else {},
        parameters={
            "scenario": preset.name,
            **preset.spec.parameters,
            **{k: v for k, v in parameters.items() if v is not None},
        },
    )
    manifest.write(out_dir)
    return out_dir


# --- Commands ---


def cmd_stationary(args: argparse.Namespace) -> int:
    """Solve for the stationary density and write density, marginal and report."""
    config = scenario_config(args)
    preset = load_scenario(config)
    spec = preset.spec
    grid = resolve_grid(args, config, preset)
    out_dir = start_run(args, preset, grid, method=args.method, tol=args.tol)

    result = solve_stationary(
        spec,
        grid,
        method=args.method,
        tol=args.tol,
        max_iter=args.max_iter,
        relaxation=args.relaxation,
        threads=args.threads,
    )
    result.density.to_csv(out_dir / "density.csv")
    write_marginal(grid.x_nodes, result.marginal, out_dir / "marginal.csv")
    write_report(
        {
            "scenario": spec.name,
            "description": preset.description,
            "grid": f"{grid.n_p}x{grid.n_x}",
            "x_bounds": f"{grid.x_bounds[0]:.17g},{grid.x_bounds[1]:.17g}",
            **result.to_dict(),
        },
        out_dir / "report.txt",
    )

    print(f"  {result.diagnosis.summary()}")
    print(f"  method: {result.method}, modes: {', '.join(f'{x:.4g}' for x in result.modes)}")
    if not result.converged:
        print("  warning: fixed point not converged; results written and flagged", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    return EXIT_OK


def cmd_transient(args: argparse.Namespace) -> int:
    """March phi(p, t) and write the path, snapshots and optional Laplace residuals."""
    config = scenario_config(args)
    preset = load_scenario(config)
    spec = preset.spec
    if not spec.belief_independent:
        raise BeliefDependentZeta(f"'{spec.name}' has bounded confidence; no transient solver")
    init = resolve_initial(args, preset)
    grid = resolve_grid(args, config, preset, init)
    t_final = run_value(args, config, "t_final")
    dt = run_value(args, config, "dt")
    out_dir = start_run(args, preset, grid, t_final=t_final, dt=dt, initial=init.label)

    solution = solve_transient(spec, grid, t_final=t_final, dt=dt, init=init)
    path = solution.phi_path
    t, p = np.meshgrid(path.t_nodes, path.p_nodes)
    write_frame(
        pd.DataFrame({"t": t.T.ravel(), "p": p.T.ravel(), "phi": path.phi.T.ravel()}),
        out_dir / "phi.csv",
    )
    write_frame(
        pd.DataFrame({"t": path.t_nodes, "mean_belief": solution.mean_belief()}),
        out_dir / "mean_belief.csv",
    )

    marginals = []
    for snapshot in args.snapshot_times or []:
        field = density_at(spec, solution, snapshot, grid)
        field.to_csv(out_dir / f"snapshot_t{snapshot:g}.csv")
        marginals.append(
            pd.DataFrame(
                {
                    "t": np.full(grid.n_x, snapshot),
                    "x": grid.x_nodes,
                    "rho_marginal": field.marginal_x(),
                }
            )
        )
    if marginals:
        write_frame(pd.concat(marginals, ignore_index=True), out_dir / "snapshot_marginals.csv")

    entries: dict[str, object] = {
        "scenario": spec.name,
        "initial": init.label,
        "t_final": path.t_final,
        "steps": len(path.t_nodes) - 1,
        "slowest_relaxation_rate": slowest_relaxation_rate(spec, grid),
        "final_mean_belief": float(solution.mean_belief()[-1]),
    }
    if args.laplace_check:
        residuals = laplace_consistency_check(spec, path, args.laplace_check)
        write_frame(
            pd.DataFrame([asdict(r) for r in residuals]),
            out_dir / "laplace.csv",
        )
        for r in residuals:
            entries[f"laplace_residual_s{r.s:g}"] = r.residual
            print(f"  Laplace residual at s = {r.s:g}: {r.residual:.3e}")
    write_report(entries, out_dir / "report.txt")
    print(f"  phi path to t = {path.t_final:.4g} in {len(path.t_nodes) - 1} steps")
    return EXIT_OK


def cmd_mc(args: argparse.Namespace) -> int:
    """Simulate the finite population and write trajectory and histograms."""
    config = scenario_config(args)
    preset = load_scenario(config)
    spec = preset.spec
    init = resolve_initial(args, preset)
    agents = run_value(args, config, "agents") or settings.mc_agents
    seed = run_value(args, config, "seed")
    seed = settings.mc_seed if seed is None else seed
    dt = run_value(args, config, "dt") or default_dt(spec)
    t_final = run_value(args, config, "t_final")
    if t_final is None:
        raise ScenarioError("mc needs --t-final (or [run] t_final in the config)")
    out_dir = start_run(
        args, preset, seed=int(seed), agents=agents, dt=dt, t_final=t_final, initial=init.label
    )

    ens = init_ensemble(spec, int(agents), seed=int(seed), init=init)
    trajectory = mc_run(
        ens,
        float(t_final),
        dt=float(dt),
        record_every=args.record_every,
        p_bins=args.p_bins,
        x_bins=args.x_bins,
        threads=args.threads,
    )
    trajectory.write(out_dir)
    averaged = trajectory.averaged(args.burn_in)
    write_frame(trajectory.final.to_frame(), out_dir / "histogram_final.csv")
    write_frame(averaged.to_frame(), out_dir / "histogram_averaged.csv")

    diagnostic = drift_diagnostic(ens)
    entries: dict[str, object] = {
        "scenario": spec.name,
        "agents": ens.size,
        "seed": ens.seed,
        "steps": ens.step_count,
        "t_final": ens.time,
        **diagnostic.to_dict(),
    }
    if args.validate_against is not None:
        reference = DensityField.from_csv(args.validate_against)
        distance = marginal_l1(averaged, reference.grid.x_nodes, reference.marginal_x())
        entries["l1_against_reference"] = distance
        print(f"  L1 distance to {args.validate_against}: {distance:.4f}")
    write_report(entries, out_dir / "report.txt")
    return EXIT_OK


def cmd_validate(args: argparse.Namespace) -> int:
    """Run the cross-check battery and print the pass/fail table."""
    args.out.mkdir(parents=True, exist_ok=True)
    RunManifest(
        subcommand="validate",
        scenario_source="battery",
        argv=list(args.argv),
        output_dir=str(args.out),
        parameters={"only": ",".join(args.only or []), "skip_slow": args.skip_slow},
    ).write(args.out)
    result = run_validation(only=args.only, skip_slow=args.skip_slow)
    table = result.table()
    print(table)
    (args.out / "validation.txt").write_text(table + "\n", encoding="utf-8", newline="\n")
    return EXIT_OK if result.passed else EXIT_FAILED


def cmd_scenarios(args: argparse.Namespace) -> int:
    """List the presets with their parameters."""
    print()
    for name in preset_names():
        preset = get_preset(name)
        params = ", ".join(f"{k}={v}" for k, v in preset_parameters(name).items())
        print(f"  {name:<16} {preset.description}")
        print(f"  {'':<16} {params}")
    print()
    return EXIT_OK


# --- Parser ---


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with one subparser per command."""
    parser = argparse.ArgumentParser(
        prog="belief_fluid",
        description="Mean-field belief dynamics: stationary, transient and Monte Carlo solvers",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="Enable debug logging")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", help="Available commands")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, default=None, help="Scenario TOML file")
    common.add_argument("--preset", default=None, help="Preset name (see 'scenarios')")
    common.add_argument("--out", type=Path, default=settings.output_dir, help="Output directory")
    common.add_argument("--grid", type=parse_grid, default=None, help="Grid sizes np,nx")
    common.add_argument("--seed", type=int, default=None, help="Random seed")
    common.add_argument("--threads", type=int, default=None, help="Worker threads")
    common.add_argument("--alpha", type=float, default=None, help="Override stubbornness")
    common.add_argument("--sigma2", type=float, default=None, help="Override noise variance")

    # stationary
    stationary = subparsers.add_parser(
        "stationary", parents=[common], help="Solve for the stationary density"
    )
    stationary.add_argument("--method", choices=METHODS, default="auto", help="Solver")
    stationary.add_argument("--tol", type=float, default=None, help="Fixed-point L1 tolerance")
    stationary.add_argument("--max-iter", type=int, default=None, help="Fixed-point budget")
    stationary.add_argument(
        "--relaxation", type=float, default=None, help="Under-relaxation factor in (0, 1]"
    )

    # transient
    transient = subparsers.add_parser(
        "transient", parents=[common], help="Transient density under unbounded confidence"
    )
    transient.add_argument("--t-final", type=float, default=None, help="Horizon")
    transient.add_argument("--dt", type=float, default=None, help="Time step")
    transient.add_argument("--init", default=None, help="prejudice or gaussian:MEAN,VAR")
    transient.add_argument(
        "--snapshot-times", type=parse_floats, default=None, help="Snapshot times, e.g. 0,1,10"
    )
    transient.add_argument(
        "--laplace-check", type=parse_floats, default=None, help="Laplace samples s1,s2,..."
    )

    # mc
    mc = subparsers.add_parser("mc", parents=[common], help="Monte Carlo agent simulation")
    mc.add_argument("--U", dest="agents", type=int, default=None, help="Number of agents")
    mc.add_argument("--dt", type=float, default=None, help="Time step")
    mc.add_argument("--t-final", type=float, default=None, help="End time")
    mc.add_argument("--init", default=None, help="prejudice or gaussian:MEAN,VAR")
    mc.add_argument("--record-every", type=int, default=None, help="Steps between captures")
    mc.add_argument("--x-bins", type=int, default=None, help="Belief bins")
    mc.add_argument("--p-bins", type=int, default=None, help="Personality bins")
    mc.add_argument(
        "--burn-in", type=float, default=None, help="Fraction discarded before averaging"
    )
    mc.add_argument(
        "--validate-against", type=Path, default=None, help="density.csv to compare against"
    )

    # validate
    validate = subparsers.add_parser("validate", help="Run the cross-check battery")
    validate.add_argument(
        "--only", type=lambda s: s.split(","), default=None, help=f"Groups or checks: {GROUPS}"
    )
    validate.add_argument("--skip-slow", action="store_true", help="Leave out slow checks")
    validate.add_argument("--out", type=Path, default=settings.output_dir, help="Output directory")

    # scenarios
    subparsers.add_parser("scenarios", help="List the scenario presets")
    return parser


def main(argv: list[str] | None = None) -> int:
    """Entry point for the belief-fluid CLI."""
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else argv
    args = parser.parse_args(argv)
    args.argv = argv

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s %(levelname)-8s %(name)s: %(message)s",
        datefmt="%H:%M:%S",
    )

    if not args.command:
        parser.print_help()
        return EXIT_OK

    cmd_map = {
        "stationary": cmd_stationary,
        "transient": cmd_transient,
        "mc": cmd_mc,
        "validate": cmd_validate,
        "scenarios": cmd_scenarios,
    }
    try:
        return cmd_map[args.command](args)
    except (BeliefDependentZeta, UnsupportedScenario) as e:
        print(f"error: unsupported scenario: {e}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except StepTooLarge as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_STEP
    except NotConverged as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    except (ScenarioError, GridError, FileNotFoundError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as e:
        print(f"error: numerical failure: {e}", file=sys.stderr)
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
