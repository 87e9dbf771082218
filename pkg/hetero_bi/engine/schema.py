"""Run configuration schema and validation.

Run configs are JSON documents (YAML is read by the same loader, JSON being
a YAML subset). parse_run_config checks required fields, resolves the
potential and weight through the registries, merges solver settings over the
defaults, and returns a frozen RunConfig or raises ConfigError naming the
offending field.
"""

from __future__ import annotations

import copy
import dataclasses
import itertools
from collections.abc import Mapping
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import yaml

from hetero_bi.engine.config import (
    DEFAULT_WARN_FRACTION,
    EngineConfig,
    SolverConfig,
    VerificationConfig,
    load_config,
    resolve_potential,
    resolve_weight,
)
from hetero_bi.engine.errors import ConfigError, SolverConfigError
from hetero_bi.engine.potentials import Potential
from hetero_bi.engine.weights import Weight

COMMANDS: tuple[str, ...] = ("solve", "solve-odd", "quadrature", "verify", "rearrange", "gibbons2d", "sweep")
FORMATS: tuple[str, ...] = ("csv", "json")

RUN_CONFIG_SCHEMA: dict = {
    "required": ["command"],
    "optional": [
        "potential",
        "weight",
        "solver",
        "output_dir",
        "format",
        "jobs",
        "profile",
        "gibbons",
        "quadrature",
        "runs",
        "base",
        "vary",
    ],
    "needs_profile": ["verify", "rearrange"],
}

_SOLVER_TYPES: dict[str, type] = {
    "half_length": float,
    "cells": int,
    "delta_slope": float,
    "delta_bc": float,
    "delta_pin": float,
    "tol": float,
    "max_iterations": int,
    "regularization": int,
    "seed": int,
    "multistart": int,
    "center": float,
}


@dataclass(frozen=True)
class GibbonsConfig:
    """Strip test data u(x, y) = tanh((x + amplitude sin(2πy)) / √2)."""

    amplitude: float = 0.1
    nx: int = 400
    ny: int = 40
    half_length: float = 10.0


@dataclass(frozen=True)
class RunConfig:
    """A validated run configuration.

    Attributes:
        command: One of COMMANDS.
        potential: Resolved potential.
        weight: Resolved weight (constant 1 by default).
        solver: Merged and validated solver settings.
        output_dir: Directory receiving the result files.
        format: "csv" or "json" for profiles.
        jobs: Worker threads for sweeps.
        profile: Input profile path (verify, rearrange).
        gibbons: Strip test settings.
        quadrature_step: Grid step of the quadrature profile.
        verification: Thresholds for verify_minimizer, from the engine defaults.
        budget_warn_fraction: Share of max_iterations after which the solver warns.
        runs: Sweep rows, in input order.
        raw: The source mapping, kept for sweep expansion and reports.
    """

    command: str
    potential: Potential
    weight: Weight
    solver: SolverConfig
    output_dir: Path = Path("out")
    format: str = "csv"
    jobs: int = 1
    profile: Path | None = None
    gibbons: GibbonsConfig = field(default_factory=GibbonsConfig)
    quadrature_step: float = 1e-3
    verification: VerificationConfig = field(default_factory=VerificationConfig)
    budget_warn_fraction: float = DEFAULT_WARN_FRACTION
    runs: tuple[RunConfig, ...] = ()
    raw: Mapping[str, Any] = field(default_factory=dict)


def _cast(name: str, value: Any, kind: type) -> Any:
    if value is None and name == "solver.regularization":
        return None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(name, f"expected a number, got {value!r}")
    if kind is int and float(value) != int(value):
        raise ConfigError(name, f"expected an integer, got {value!r}")
    return kind(value)


def _solver(raw: Any, defaults: SolverConfig) -> SolverConfig:
    if raw is None:
        return defaults
    if not isinstance(raw, Mapping):
        raise ConfigError("solver", f"expected an object, got {type(raw).__name__}")
    unknown = sorted(set(raw) - set(_SOLVER_TYPES))
    if unknown:
        raise ConfigError(f"solver.{unknown[0]}", f"unknown solver field; known: {sorted(_SOLVER_TYPES)}")
    changes = {k: _cast(f"solver.{k}", v, _SOLVER_TYPES[k]) for k, v in raw.items()}
    try:
        return defaults.replace(**changes)
    except SolverConfigError as exc:
        raise ConfigError(f"solver.{exc.field}", exc.message) from exc


def _gibbons(raw: Any) -> GibbonsConfig:
    if raw is None:
        return GibbonsConfig()
    if not isinstance(raw, Mapping):
        raise ConfigError("gibbons", "expected an object")
    known = {f.name: f.type for f in dataclasses.fields(GibbonsConfig)}
    unknown = sorted(set(raw) - set(known))
    if unknown:
        raise ConfigError(f"gibbons.{unknown[0]}", f"unknown field; known: {sorted(known)}")
    cfg = GibbonsConfig(**{
        k: _cast(f"gibbons.{k}", v, int if k in ("nx", "ny") else float) for k, v in raw.items()
    })
    if cfg.nx < 2 or cfg.ny < 1 or not cfg.half_length > 0.0:
        raise ConfigError("gibbons", "needs nx >= 2, ny >= 1 and half_length > 0")
    return cfg


def _set_dotted(target: dict, dotted: str, value: Any) -> None:
    keys = dotted.split(".")
    node = target
    for key in keys[:-1]:
        node = node.setdefault(key, {})
        if not isinstance(node, dict):
            raise ConfigError(f"vary.{dotted}", f"{key} is not an object")
    node[keys[-1]] = value


def expand_sweep(data: Mapping[str, Any]) -> list[dict]:
    """Sweep rows from "runs", or from "base" and "vary" (cartesian product in sorted key order).

    vary keys are dotted paths into the base object, e.g. "solver.regularization".

    Raises:
        ConfigError: If runs is not a list of objects, a vary entry is not a
            list, or neither runs nor base is given.
    """
    if "runs" in data:
        runs = data["runs"]
        if not isinstance(runs, list) or not all(isinstance(r, Mapping) for r in runs):
            raise ConfigError("runs", "expected a list of run objects")
        return [dict(r) for r in runs]
    base = data.get("base")
    vary = data.get("vary", {})
    if not isinstance(base, Mapping) or not isinstance(vary, Mapping):
        raise ConfigError("runs", "a sweep needs either runs or base with vary")
    keys = sorted(vary)
    for key in keys:
        if not isinstance(vary[key], list):
            raise ConfigError(f"vary.{key}", "expected a list of values")
    rows = []
    for combo in itertools.product(*(vary[k] for k in keys)):
        row = copy.deepcopy(dict(base))
        for key, value in zip(keys, combo):
            _set_dotted(row, key, value)
        rows.append(row)
    return rows


def parse_run_config(
    data: Any,
    base_dir: Path | None = None,
    defaults: SolverConfig | None = None,
    engine: EngineConfig | None = None,
) -> RunConfig:
    """Validate a run configuration mapping.

    Args:
        data: Parsed JSON/YAML document.
        base_dir: Directory that relative paths are resolved against.
        defaults: Solver defaults; engine.solver when omitted.
        engine: Engine defaults supplying the solver defaults, verification
            thresholds and budget warning fraction. load_config() when both
            engine and defaults are omitted; built-in verification and
            budget settings when only defaults is given.

    Raises:
        ConfigError: Naming the first field that fails.
    """
    if not isinstance(data, Mapping):
        raise ConfigError("", f"expected a JSON object, got {type(data).__name__}")
    missing = [f for f in RUN_CONFIG_SCHEMA["required"] if f not in data]
    if missing:
        raise ConfigError(missing[0], "required field is missing")
    known = set(RUN_CONFIG_SCHEMA["required"]) | set(RUN_CONFIG_SCHEMA["optional"])
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigError(unknown[0], f"unknown field; known: {sorted(known)}")

    command = data["command"]
    if command not in COMMANDS:
        raise ConfigError("command", f"unknown command {command!r}; known: {list(COMMANDS)}")
    fmt = data.get("format", "csv")
    if fmt not in FORMATS:
        raise ConfigError("format", f"expected one of {list(FORMATS)}, got {fmt!r}")
    jobs = _cast("jobs", data.get("jobs", 1), int)
    if jobs < 1:
        raise ConfigError("jobs", f"must be at least 1, got {jobs}")

    base_dir = base_dir or Path.cwd()
    if engine is None and defaults is None:
        engine = load_config()
    elif engine is None:
        engine = EngineConfig(defaults, VerificationConfig(), DEFAULT_WARN_FRACTION)
    defaults = defaults or engine.solver
    output_dir = Path(str(data.get("output_dir", "out")))

    runs: tuple[RunConfig, ...] = ()
    if command == "sweep":
        rows = expand_sweep(data)
        commands = {row.get("command") for row in rows}
        if "sweep" in commands:
            raise ConfigError("runs", "sweeps cannot be nested")
        if len(commands) > 1:
            raise ConfigError("runs", f"sweep rows mix commands {sorted(map(str, commands))}")
        parsed = []
        for index, row in enumerate(rows):
            try:
                parsed.append(parse_run_config(row, base_dir, defaults, engine))
            except ConfigError as exc:
                raise ConfigError(f"runs[{index}].{exc.field}".rstrip("."), exc.message) from exc
        runs = tuple(parsed)

    potential_spec = data.get("potential", {"name": "allen_cahn"})
    if not isinstance(potential_spec, Mapping):
        raise ConfigError("potential", "expected an object")
    weight_spec = data.get("weight")
    if weight_spec is not None and not isinstance(weight_spec, Mapping):
        raise ConfigError("weight", "expected an object")

    profile = data.get("profile")
    if command in RUN_CONFIG_SCHEMA["needs_profile"] and profile is None:
        raise ConfigError("profile", f"required for {command}")
    profile_path = None
    if profile is not None:
        profile_path = Path(str(profile))
        if not profile_path.is_absolute():
            profile_path = base_dir / profile_path

    quadrature = data.get("quadrature") or {}
    if not isinstance(quadrature, Mapping):
        raise ConfigError("quadrature", "expected an object")
    step = _cast("quadrature.step", quadrature.get("step", 1e-3), float)
    if not 0.0 < step < 1.0:
        raise ConfigError("quadrature.step", f"must lie in (0, 1), got {step}")

    return RunConfig(
        command=command,
        potential=resolve_potential(potential_spec),
        weight=resolve_weight(weight_spec),
        solver=_solver(data.get("solver"), defaults),
        output_dir=output_dir,
        format=fmt,
        jobs=jobs,
        profile=profile_path,
        gibbons=_gibbons(data.get("gibbons")),
        quadrature_step=step,
        runs=runs,
        verification=engine.verification,
        budget_warn_fraction=engine.budget_warn_fraction,
        raw=dict(data),
    )


def load_run_config(
    path: Path, defaults: SolverConfig | None = None, engine: EngineConfig | None = None
) -> RunConfig:
    """Read and validate a run config file.

    Args:
        path: JSON or YAML run config.
        defaults: Solver defaults, as for parse_run_config.
        engine: Engine defaults, as for parse_run_config.

    Raises:
        ConfigError: If the file is unreadable, not JSON/YAML, or invalid.
    """
    try:
        with open(path, encoding="utf-8") as f:
            data = yaml.safe_load(f)
    except OSError as exc:
        raise ConfigError("", f"cannot read config {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError("", f"config {path} is not valid JSON: {exc}") from exc
    return parse_run_config(data, path.parent, defaults, engine)
