"""Tests for CLI commands, output files and exit codes."""

import argparse
import json
from pathlib import Path

import numpy as np
import pandas as pd
import pytest

from belief_fluid.__main__ import (
    EXIT_CONFIG,
    EXIT_NOT_CONVERGED,
    EXIT_OK,
    EXIT_STEP,
    EXIT_UNSUPPORTED,
    build_parser,
    main,
    parse_floats,
    parse_grid,
)
from beliefs.stationary import homogeneous_closed_form

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"


def _read_report(path: Path) -> dict[str, str]:
    entries = {}
    for line in path.read_text(encoding="utf-8").splitlines():
        key, _, value = line.partition(": ")
        entries[key] = value
    return entries


# --- Argument parsing ---


class TestArguments:
    def test_parse_grid(self) -> None:
        assert parse_grid("201,401") == (201, 401)

    def test_parse_grid_rejects_bad_input(self) -> None:
        with pytest.raises(argparse.ArgumentTypeError, match="np,nx"):
            parse_grid("201")

    def test_parse_floats(self) -> None:
        assert parse_floats("0,1,10") == [0.0, 1.0, 10.0]

    def test_mc_agent_flag(self) -> None:
        args = build_parser().parse_args(["mc", "--preset", "homogeneous", "--U", "50"])
        assert args.agents == 50

    def test_no_command_prints_help(self, capsys: pytest.CaptureFixture[str]) -> None:
        assert main([]) == EXIT_OK
        assert "stationary" in capsys.readouterr().out


# --- Subcommands ---


class TestScenarios:
    def test_lists_presets(self, capsys: pytest.CaptureFixture[str]) -> None:
        assert main(["scenarios"]) == EXIT_OK
        out = capsys.readouterr().out
        assert "homogeneous" in out
        assert "bounded-rect" in out


class TestStationary:
    def test_writes_outputs(self, tmp_path: Path) -> None:
        out = tmp_path / "run"
        argv = ["stationary", "--preset", "homogeneous", "--grid", "201,401", "--out", str(out)]
        code = main(argv)
        assert code == EXIT_OK
        for name in ("density.csv", "marginal.csv", "report.txt", "manifest.json"):
            assert (out / name).exists()

        marginal = pd.read_csv(out / "marginal.csv")
        expected = homogeneous_closed_form(0.5, 0.01, marginal["x"].to_numpy())
        assert np.max(np.abs(marginal["rho"].to_numpy() - expected)) <= 1e-5

        report = _read_report(out / "report.txt")
        assert report["scenario"] == "homogeneous"
        assert report["converged"] == "true"

    def test_manifest_records_the_run(self, tmp_path: Path) -> None:
        argv = ["stationary", "--preset", "homogeneous", "--grid", "41,101", "--out", str(tmp_path)]
        assert main(argv) == EXIT_OK
        manifest = json.loads((tmp_path / "manifest.json").read_text(encoding="utf-8"))
        assert manifest["subcommand"] == "stationary"
        assert manifest["scenario_source"] == "preset:homogeneous"
        assert manifest["argv"] == argv
        assert manifest["grid"] == {"np": 41, "nx": 101}

    def test_from_config_file(self, tmp_path: Path) -> None:
        config = CONFIG_DIR / "homogeneous.toml"
        code = main(
            ["stationary", "--config", str(config), "--grid", "41,101", "--out", str(tmp_path)]
        )
        assert code == EXIT_OK
        assert _read_report(tmp_path / "report.txt")["grid"] == "41x101"

    def test_alpha_override(self, tmp_path: Path) -> None:
        argv = ["stationary", "--preset", "homogeneous", "--alpha", "0.25", "--grid", "41,101"]
        assert main([*argv, "--out", str(tmp_path)]) == EXIT_OK
        manifest = json.loads((tmp_path / "manifest.json").read_text(encoding="utf-8"))
        assert manifest["parameters"]["alpha"] == 0.25

    def test_missing_config_file(self, tmp_path: Path) -> None:
        code = main(
            ["stationary", "--config", str(tmp_path / "absent.toml"), "--out", str(tmp_path)]
        )
        assert code == EXIT_CONFIG

    def test_no_scenario_given(self, tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
        assert main(["stationary", "--out", str(tmp_path)]) == EXIT_CONFIG
        assert "--preset" in capsys.readouterr().err

    def test_unknown_preset(self, tmp_path: Path) -> None:
        assert main(["stationary", "--preset", "nope", "--out", str(tmp_path)]) == EXIT_CONFIG

    def test_unconverged_run_still_writes_results(self, tmp_path: Path) -> None:
        code = main(
            [
                "stationary",
                "--preset",
                "bounded-rect",
                "--grid",
                "11,101",
                "--max-iter",
                "1",
                "--out",
                str(tmp_path),
            ]
        )
        assert code == EXIT_NOT_CONVERGED
        assert (tmp_path / "density.csv").exists()
        assert _read_report(tmp_path / "report.txt")["converged"] == "false"


class TestTransient:
    def test_bounded_confidence_unsupported(self, tmp_path: Path) -> None:
        code = main(["transient", "--preset", "bounded-rect", "--out", str(tmp_path)])
        assert code == EXIT_UNSUPPORTED

    def test_writes_path_and_snapshots(self, tmp_path: Path) -> None:
        code = main(
            [
                "transient",
                "--preset",
                "homogeneous",
                "--grid",
                "21,51",
                "--t-final",
                "1",
                "--dt",
                "0.1",
                "--snapshot-times",
                "0,1",
                "--out",
                str(tmp_path),
            ]
        )
        assert code == EXIT_OK
        phi = pd.read_csv(tmp_path / "phi.csv")
        assert list(phi.columns) == ["t", "p", "phi"]
        assert len(phi) == 21 * 11
        assert (tmp_path / "snapshot_t0.csv").exists()
        assert (tmp_path / "snapshot_t1.csv").exists()
        marginals = pd.read_csv(tmp_path / "snapshot_marginals.csv")
        assert sorted(marginals["t"].unique()) == [0.0, 1.0]

    def test_laplace_check(self, tmp_path: Path) -> None:
        code = main(
            [
                "transient",
                "--preset",
                "inhomogeneous",
                "--grid",
                "41,3",
                "--t-final",
                "30",
                "--dt",
                "0.05",
                "--laplace-check",
                "1",
                "--out",
                str(tmp_path),
            ]
        )
        assert code == EXIT_OK
        laplace = pd.read_csv(tmp_path / "laplace.csv")
        assert list(laplace["s"]) == [1.0]
        assert laplace["residual"].iloc[0] <= 1e-6

    def test_step_too_large(self, tmp_path: Path) -> None:
        code = main(
            ["transient", "--preset", "homogeneous", "--grid", "21,51"]
            + ["--t-final", "2", "--dt", "1", "--out", str(tmp_path)]
        )
        assert code == EXIT_STEP


class TestMC:
    def _run(self, out: Path, *extra: str) -> int:
        return main(
            ["mc", "--preset", "noninteracting", "--U", "50", "--dt", "0.01"]
            + ["--t-final", "0.1", "--seed", "3", "--record-every", "2", "--out", str(out)]
            + list(extra)
        )

    def test_step_too_large(self, tmp_path: Path) -> None:
        code = main(
            ["mc", "--preset", "homogeneous", "--dt", "1", "--t-final", "1", "--out", str(tmp_path)]
        )
        assert code == EXIT_STEP

    def test_t_final_required(self, tmp_path: Path) -> None:
        assert main(["mc", "--preset", "homogeneous", "--out", str(tmp_path)]) == EXIT_CONFIG

    def test_writes_outputs(self, tmp_path: Path) -> None:
        assert self._run(tmp_path) == EXIT_OK
        for name in (
            "trajectory.csv",
            "histograms.csv",
            "histogram_final.csv",
            "histogram_averaged.csv",
            "report.txt",
            "manifest.json",
        ):
            assert (tmp_path / name).exists()
        report = _read_report(tmp_path / "report.txt")
        assert report["agents"] == "50"
        assert report["steps"] == "10"

    def test_same_seed_same_bytes(self, tmp_path: Path) -> None:
        assert self._run(tmp_path / "a") == EXIT_OK
        assert self._run(tmp_path / "b") == EXIT_OK
        for name in ("trajectory.csv", "histograms.csv"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_validate_against_density(self, tmp_path: Path) -> None:
        reference = tmp_path / "stationary"
        argv = ["stationary", "--preset", "noninteracting", "--grid", "41,101"]
        assert main([*argv, "--out", str(reference)]) == EXIT_OK
        out = tmp_path / "mc"
        assert self._run(out, "--validate-against", str(reference / "density.csv")) == EXIT_OK
        distance = float(_read_report(out / "report.txt")["l1_against_reference"])
        assert 0.0 <= distance <= 2.0


class TestValidate:
    def test_single_check(self, tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
        code = main(["validate", "--only", "fast-path", "--out", str(tmp_path)])
        assert code == EXIT_OK
        assert "fast-path" in capsys.readouterr().out
        assert "1/1 passed" in (tmp_path / "validation.txt").read_text(encoding="utf-8")
