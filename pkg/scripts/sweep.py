"""CLI script to regenerate the stationary parameter sweeps as CSV.

Usage:
    python -m scripts.sweep
    python -m scripts.sweep --families proximity bounded-alpha --grid 101,401
    python -m scripts.sweep --output ./out/sweeps -v
"""

import argparse
import logging
import sys
from pathlib import Path

from beliefs.manifest import RunManifest
from beliefs.sweep import family_names, run_sweeps


def main() -> None:
    parser = argparse.ArgumentParser(
        description="Solve the stationary marginal across parameter families",
    )
    parser.add_argument(
        "--output",
        type=Path,
        default=Path("out/sweeps"),
        help="Output directory for the sweep tables (default: out/sweeps)",
    )
    parser.add_argument(
        "--families",
        nargs="+",
        choices=family_names(),
        default=None,
        help="Which families to run (default: all)",
    )
    parser.add_argument(
        "--grid",
        default=None,
        help="Grid sizes np,nx (default: from settings)",
    )
    parser.add_argument("--threads", type=int, default=None, help="Worker threads")
    parser.add_argument(
        "--verbose",
        "-v",
        action="store_true",
        help="Enable verbose logging",
    )
    args = parser.parse_args()

    # Configure logging
    log_level = logging.DEBUG if args.verbose else logging.INFO
    logging.basicConfig(
        level=log_level,
        format="%(asctime)s %(levelname)-8s %(name)s: %(message)s",
        datefmt="%H:%M:%S",
    )

    n_p = n_x = None
    if args.grid:
        try:
            n_p, n_x = (int(part) for part in args.grid.split(","))
        except ValueError:
            print(f"Error: --grid expects np,nx, got {args.grid}", file=sys.stderr)
            sys.exit(2)

    output = args.output.resolve()
    print(f"Output: {output}")
    print()
    RunManifest(
        subcommand="sweep",
        scenario_source="families:" + ",".join(args.families or family_names()),
        argv=sys.argv[1:],
        output_dir=str(output),
        grid={"np": n_p, "nx": n_x} if n_p and n_x else {},
    ).write(output)

    results = run_sweeps(args.families, output, n_p, n_x, args.threads)

    # Print summary
    print()
    print("=" * 50)
    print("SWEEP COMPLETE")
    print("=" * 50)
    for result in results:
        print(f"{result.family}:")
        for label, modes in result.modes.items():
            print(f"  {label:<32} modes: {', '.join(f'{x:.3g}' for x in modes)}")
        for label in result.unconverged:
            print(f"  {label:<32} NOT CONVERGED")


if __name__ == "__main__":
    main()
