"""Tests for stationary parameter sweeps."""

from pathlib import Path

import pandas as pd
import pytest

from beliefs.sweep import FAMILIES, SweepFamily, family_names, run_family, run_sweeps


class TestSweepFamily:
    def test_label(self) -> None:
        family = SweepFamily("f", "inhomogeneous", [])
        assert family.label({"shape": "abs", "n": 8}) == "shape=abs,n=8"

    def test_builtin_families_resolve(self) -> None:
        assert family_names() == [family.name for family in FAMILIES]
        assert "bounded-alpha" in family_names()


class TestRunFamily:
    def setup_method(self) -> None:
        self.family = SweepFamily(
            "small", "homogeneous", [{"alpha": 0.3, "sigma2": 0.01}, {"alpha": 0.5, "sigma2": 0.01}]
        )

    def test_stacks_marginals(self) -> None:
        result = run_family(self.family, n_p=41, n_x=101)
        assert result.family == "small"
        assert list(result.frame.columns) == ["label", "x", "rho"]
        assert len(result.frame) == 2 * 101
        assert result.unconverged == []

    def test_symmetric_members_have_central_mode(self) -> None:
        result = run_family(self.family, n_p=41, n_x=101)
        for modes in result.modes.values():
            assert modes == pytest.approx([0.0], abs=0.05)


class TestRunSweeps:
    def test_writes_one_table_per_family(self, tmp_path: Path) -> None:
        results = run_sweeps(["homogeneous-alpha"], tmp_path, n_p=41, n_x=101)
        assert [r.family for r in results] == ["homogeneous-alpha"]
        frame = pd.read_csv(tmp_path / "sweep_homogeneous-alpha.csv")
        assert frame["label"].nunique() == 4
