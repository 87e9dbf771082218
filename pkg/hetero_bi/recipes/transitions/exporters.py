"""CSV and JSON readers and writers for profiles, trajectories and reports.

CSV files use ',' separators, '.' decimals, a header row and 17 significant
digits, so every double survives a write/read round trip unchanged.
"""

from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Any

import numpy as np

from hetero_bi.engine.errors import ConfigError, ProfileError
from hetero_bi.engine.functional import Profile
from hetero_bi.engine.phase import Trajectory

logger = logging.getLogger(__name__)

_FLOAT_FORMAT = "%.17g"


def _jsonable(value: Any) -> Any:
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, Path):
        return str(value)
    raise TypeError(f"{type(value).__name__} is not JSON serializable")


def write_json(path: Path, payload: dict) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, default=_jsonable) + "\n", encoding="utf-8")
    logger.info("Wrote %s", path)
    return path


def write_profile_csv(path: Path, p: Profile) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    np.savetxt(path, np.column_stack([p.t, p.u]), delimiter=",", header="t,u", comments="", fmt=_FLOAT_FORMAT)
    logger.info("Wrote %s (%d nodes)", path, p.t.size)
    return path


def write_profile(out_dir: Path, p: Profile, fmt: str, stem: str = "profile") -> Path:
    """Write p as <stem>.csv or <stem>.json under out_dir.

    CSV has the header t,u and full round-trip precision; JSON holds the
    arrays {"t": [...], "u": [...]}.

    Returns:
        Path of the written file.
    """
    if fmt == "json":
        return write_json(out_dir / f"{stem}.json", {"t": p.t.tolist(), "u": p.u.tolist()})
    return write_profile_csv(out_dir / f"{stem}.csv", p)


def write_trajectory_csv(path: Path, traj: Trajectory) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    np.savetxt(
        path,
        np.column_stack([traj.t, traj.u, traj.p]),
        delimiter=",",
        header="t,u,p",
        comments="",
        fmt=_FLOAT_FORMAT,
    )
    logger.info("Wrote %s (%d samples)", path, traj.t.size)
    return path


def read_profile(path: Path) -> Profile:
    """Read a profile from CSV (header "t,u") or JSON ({"t": [...], "u": [...]}).

    Raises:
        ConfigError: If the file is missing or malformed.
    """
    try:
        if path.suffix == ".json":
            data = json.loads(path.read_text(encoding="utf-8"))
            return Profile(np.asarray(data["t"], dtype=float), np.asarray(data["u"], dtype=float))
        with open(path, encoding="utf-8") as f:
            header = f.readline().strip().replace(" ", "")
            if header != "t,u":
                raise ConfigError("profile", f"{path}: expected header 't,u', got {header!r}")
            table = np.loadtxt(f, delimiter=",", ndmin=2)
    except OSError as exc:
        raise ConfigError("profile", f"cannot read {path}: {exc}") from exc
    except (KeyError, TypeError, ValueError, ProfileError) as exc:
        raise ConfigError("profile", f"{path}: {exc}") from exc
    if table.shape[1] != 2:
        raise ConfigError("profile", f"{path}: expected 2 columns, got {table.shape[1]}")
    try:
        return Profile(table[:, 0], table[:, 1])
    except ProfileError as exc:
        raise ConfigError("profile", f"{path}: {exc}") from exc
