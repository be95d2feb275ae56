"""Tests for report files and run manifests."""

import dataclasses
import json
from pathlib import Path

from beliefs.config import __version__
from beliefs.manifest import MANIFEST_NAME, RunManifest
from beliefs.reports import format_report, format_value, write_report


def _make_manifest(out_dir: Path) -> RunManifest:
    return RunManifest(
        subcommand="mc",
        scenario_source="preset:homogeneous",
        argv=["mc", "--preset", "homogeneous", "--seed", "7"],
        output_dir=str(out_dir),
        seed=7,
        parameters={"alpha": 0.5, "agents": 1000},
    )


class TestReports:
    def test_format_value(self) -> None:
        assert format_value(True) == "true"
        assert format_value(0.1) == "0.10000000000000001"
        assert format_value(3) == "3"
        assert format_value("closed-form") == "closed-form"

    def test_keeps_insertion_order(self) -> None:
        text = format_report({"b": 1, "a": False})
        assert text == "b: 1\na: false\n"

    def test_write_creates_directory(self, tmp_path: Path) -> None:
        path = write_report({"mass": 1.0}, tmp_path / "nested" / "report.txt")
        assert path.read_bytes() == b"mass: 1\n"


class TestRunManifest:
    def test_write(self, tmp_path: Path) -> None:
        manifest = _make_manifest(tmp_path)
        path = manifest.write(tmp_path)
        assert path.name == MANIFEST_NAME
        assert json.loads(path.read_text(encoding="utf-8")) == dataclasses.asdict(manifest)

    def test_records_version_and_start(self, tmp_path: Path) -> None:
        manifest = _make_manifest(tmp_path)
        assert manifest.tool_version == __version__
        assert "T" in manifest.started_at

    def test_json_keys_sorted(self, tmp_path: Path) -> None:
        text = _make_manifest(tmp_path).to_json()
        assert text.index('"argv"') < text.index('"seed"') < text.index('"subcommand"')
        assert text.endswith("\n")
