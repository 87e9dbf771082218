"""Tests for the hetero-bi command line."""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
from pathlib import Path
from unittest.mock import patch

import pytest

from hetero_bi.engine.config import SolverConfig
from hetero_bi.engine.errors import DegenerateWellError
from hetero_bi.engine.schema import parse_run_config
from hetero_bi.recipes.transitions.__main__ import _apply_overrides, main

_REPO_ROOT = Path(__file__).resolve().parents[3]


@pytest.fixture(autouse=True)
def _default_log(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.delenv("HETERO_BI_LOG", raising=False)


def _write_config(tmp_path: Path, data: dict, name: str = "run.json") -> Path:
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return path


def _quadrature_config(tmp_path: Path) -> Path:
    return _write_config(tmp_path, {"command": "quadrature", "quadrature": {"step": 0.01}})


class TestArguments:

    def test_config_required(self) -> None:
        assert main([]) == 4

    def test_help(self) -> None:
        assert main(["--help"]) == 0

    def test_unknown_format(self, tmp_path: Path) -> None:
        assert main(["--config", str(_quadrature_config(tmp_path)), "--format", "xml"]) == 4

    def test_missing_config_file(self, tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
        assert main(["--config", str(tmp_path / "absent.json")]) == 4
        assert "error: " in capsys.readouterr().err

    def test_bad_log_level(self, tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> None:
        monkeypatch.setenv("HETERO_BI_LOG", "chatty")
        assert main(["--config", str(_quadrature_config(tmp_path))]) == 4

    def test_bad_jobs(self, tmp_path: Path) -> None:
        assert main(["--config", str(_quadrature_config(tmp_path)), "--jobs", "0"]) == 4

    def test_invalid_config_names_field(self, tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
        path = _write_config(tmp_path, {"command": "solve", "solver": {"cells": 4}})
        assert main(["--config", str(path)]) == 4
        assert "solver.cells" in capsys.readouterr().err


class TestOverrides:

    def test_seed_reaches_sweep_rows(self, tmp_path: Path) -> None:
        data = {"command": "sweep", "runs": [{"command": "solve"}, {"command": "solve"}]}
        config = parse_run_config(data, tmp_path, SolverConfig())
        args = argparse.Namespace(out=tmp_path / "o", format="json", jobs=3, seed=11)
        changed = _apply_overrides(config, args)
        assert changed.output_dir == tmp_path / "o"
        assert changed.format == "json"
        assert changed.jobs == 3
        assert changed.solver.seed == 11
        assert [row.solver.seed for row in changed.runs] == [11, 11]

    def test_no_overrides(self, tmp_path: Path) -> None:
        config = parse_run_config({"command": "solve"}, tmp_path, SolverConfig())
        args = argparse.Namespace(out=None, format=None, jobs=None, seed=None)
        assert _apply_overrides(config, args) is config


class TestRuns:

    def test_quadrature_ok(self, tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
        out = tmp_path / "results"
        code = main(["--config", str(_quadrature_config(tmp_path)), "--out", str(out), "--format", "json"])
        assert code == 0
        assert (out / "profile.json").exists()
        stdout = capsys.readouterr().out
        assert "Command:    quadrature" in stdout
        assert "Exit:       0 (ok)" in stdout

    def test_verification_failure(self, tmp_path: Path) -> None:
        profile = tmp_path / "steep.csv"
        rows = "\n".join(f"{t / 100:.2f},{-1.0 if t < 0 else 1.0}" for t in range(-300, 301, 300))
        profile.write_text("t,u\n" + rows + "\n")
        path = _write_config(tmp_path, {"command": "verify", "profile": "steep.csv"})
        assert main(["--config", str(path), "--out", str(tmp_path / "out")]) == 2

    def test_solver_failure(self, tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
        target = "hetero_bi.recipes.transitions.orchestrator.quadrature_heteroclinic"
        with patch(target, side_effect=DegenerateWellError("W vanishes at u=0")):
            code = main(["--config", str(_quadrature_config(tmp_path)), "--out", str(tmp_path / "out")])
        assert code == 3
        assert "error: W vanishes at u=0" in capsys.readouterr().err


class TestModuleEntryPoint:

    def test_exit_code_from_subprocess(self, tmp_path: Path) -> None:
        env = {**os.environ, "PYTHONPATH": str(_REPO_ROOT), "HETERO_BI_LOG": "error"}
        path = _write_config(tmp_path, {"command": "integrate"})
        proc = subprocess.run(
            [sys.executable, "-m", "hetero_bi.recipes.transitions", "--config", str(path)],
            capture_output=True,
            text=True,
            env=env,
            timeout=120,
        )
        assert proc.returncode == 4
        assert "command" in proc.stderr
