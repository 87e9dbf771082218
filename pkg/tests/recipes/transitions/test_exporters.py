"""Tests for profile, trajectory and report files."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest

from hetero_bi.engine.errors import ConfigError
from hetero_bi.engine.functional import Profile
from hetero_bi.engine.phase import Trajectory
from hetero_bi.recipes.transitions.exporters import (
    read_profile,
    write_json,
    write_profile,
    write_trajectory_csv,
)


@pytest.fixture
def profile() -> Profile:
    t = np.linspace(-3.0, 3.0, 61)
    return Profile(t, np.tanh(t / np.sqrt(2.0)))


class TestWriteProfile:

    def test_csv_exact(self, tmp_path: Path, profile: Profile) -> None:
        path = write_profile(tmp_path, profile, "csv")
        assert path == tmp_path / "profile.csv"
        assert path.read_text().splitlines()[0] == "t,u"
        back = read_profile(path)
        np.testing.assert_array_equal(back.t, profile.t)
        np.testing.assert_array_equal(back.u, profile.u)

    def test_json_exact(self, tmp_path: Path, profile: Profile) -> None:
        path = write_profile(tmp_path / "nested", profile, "json", stem="half")
        assert path == tmp_path / "nested" / "half.json"
        back = read_profile(path)
        np.testing.assert_array_equal(back.u, profile.u)


class TestReadProfile:

    def test_missing(self, tmp_path: Path) -> None:
        with pytest.raises(ConfigError, match="cannot read") as info:
            read_profile(tmp_path / "absent.csv")
        assert info.value.field == "profile"

    def test_wrong_header(self, tmp_path: Path) -> None:
        path = tmp_path / "p.csv"
        path.write_text("x,y\n0,0\n1,1\n")
        with pytest.raises(ConfigError, match="expected header"):
            read_profile(path)

    def test_spaces_in_header(self, tmp_path: Path) -> None:
        path = tmp_path / "p.csv"
        path.write_text("t, u\n0,-1\n1,1\n")
        assert read_profile(path).u.tolist() == [-1.0, 1.0]

    def test_wrong_columns(self, tmp_path: Path) -> None:
        path = tmp_path / "p.csv"
        path.write_text("t,u\n0,0,0\n1,1,1\n")
        with pytest.raises(ConfigError, match="2 columns"):
            read_profile(path)

    def test_unsorted_nodes(self, tmp_path: Path) -> None:
        path = tmp_path / "p.csv"
        path.write_text("t,u\n1,0\n0,1\n")
        with pytest.raises(ConfigError, match="strictly increasing"):
            read_profile(path)

    def test_json_missing_key(self, tmp_path: Path) -> None:
        path = tmp_path / "p.json"
        path.write_text(json.dumps({"t": [0, 1]}))
        with pytest.raises(ConfigError):
            read_profile(path)


class TestOtherWriters:

    def test_json_numpy_values(self, tmp_path: Path) -> None:
        path = write_json(tmp_path / "r.json", {"a": np.float64(1.5), "b": np.arange(3), "c": tmp_path})
        data = json.loads(path.read_text())
        assert data == {"a": 1.5, "b": [0, 1, 2], "c": str(tmp_path)}

    def test_json_rejects_objects(self, tmp_path: Path) -> None:
        with pytest.raises(TypeError):
            write_json(tmp_path / "r.json", {"a": object()})

    def test_trajectory(self, tmp_path: Path) -> None:
        traj = Trajectory(t=np.array([0.0, 0.5]), u=np.array([0.0, 0.3]), p=np.array([0.75, 0.7]))
        path = write_trajectory_csv(tmp_path / "trajectory.csv", traj)
        lines = path.read_text().splitlines()
        assert lines[0] == "t,u,p"
        assert lines[1] == "0,0,0.75"
