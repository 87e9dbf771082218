"""Solver configuration, defaults loading and the potential/weight registries."""

from __future__ import annotations

import dataclasses
import os
from collections.abc import Callable, Mapping
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import yaml

from hetero_bi.engine.errors import ConfigError, ParameterError, SolverConfigError
from hetero_bi.engine.potentials import (
    Potential,
    allen_cahn,
    compact_truncate,
    exact_example,
    expression_potential,
)
from hetero_bi.engine.weights import (
    Weight,
    asymptotically_constant,
    asymptotically_periodic,
    constant,
    expression_weight,
    monotone_even,
    periodic_sin,
)

POTENTIAL_REGISTRY: dict[str, Callable[[], Potential]] = {
    "allen_cahn": allen_cahn,
    "exact_example": exact_example,
}

WEIGHT_FAMILIES: dict[str, Callable[..., Weight]] = {
    "constant": constant,
    "periodic_sin": periodic_sin,
    "asymptotically_constant": asymptotically_constant,
    "asymptotically_periodic": asymptotically_periodic,
    "monotone_even": monotone_even,
}

_DEFAULT_CONFIG_PATH = Path(__file__).parent / "config.yaml"

DEFAULT_WARN_FRACTION = 0.8

_ENV_OVERRIDES: dict[str, tuple[str, Callable[[str], Any]]] = {
    "HETERO_BI_HALF_LENGTH": ("half_length", float),
    "HETERO_BI_CELLS": ("cells", int),
    "HETERO_BI_SEED": ("seed", int),
    "HETERO_BI_MAX_ITERATIONS": ("max_iterations", int),
}


@dataclass(frozen=True)
class SolverConfig:
    """Discretization and iteration settings for the direct solvers.

    Attributes:
        half_length: L, the window is [center - L, center + L].
        cells: N, the grid has nodes t_0..t_N.
        delta_slope: Slopes are capped at 1 - delta_slope during iteration.
        delta_bc: Boundary tolerance: endpoints must lie within delta_bc of the wells.
        delta_pin: Endpoints are pinned at -(1 - delta_pin) and 1 - delta_pin.
        tol: Convergence threshold on the scaled projected gradient.
        max_iterations: Newton iteration budget per start.
        regularization: Index n of Ψₙ to minimize instead of the exact kernel.
        seed: Seed for multistart perturbations.
        multistart: Number of perturbed starts tried besides the linear ramp.
        center: Window center.
    """

    half_length: float = 10.0
    cells: int = 2000
    delta_slope: float = 1e-6
    delta_bc: float = 1e-3
    delta_pin: float = 0.0
    tol: float = 1e-8
    max_iterations: int = 200
    regularization: int | None = None
    seed: int = 0
    multistart: int = 0
    center: float = 0.0

    def validate(self) -> SolverConfig:
        """Check every invariant and return self.

        Raises:
            SolverConfigError: Naming the first field that fails.
        """
        if not self.half_length > 0.0:
            raise SolverConfigError("half_length", f"must be positive, got {self.half_length}")
        if self.cells < 16:
            raise SolverConfigError("cells", f"must be at least 16, got {self.cells}")
        if not 0.0 < self.delta_slope < 1.0:
            raise SolverConfigError("delta_slope", f"must lie in (0, 1), got {self.delta_slope}")
        if not 0.0 < self.delta_bc < 1.0:
            raise SolverConfigError("delta_bc", f"must lie in (0, 1), got {self.delta_bc}")
        if not 0.0 <= self.delta_pin <= self.delta_bc:
            raise SolverConfigError("delta_pin", f"must lie in [0, delta_bc], got {self.delta_pin}")
        if not self.tol > 0.0:
            raise SolverConfigError("tol", f"must be positive, got {self.tol}")
        if self.max_iterations < 1:
            raise SolverConfigError("max_iterations", f"must be at least 1, got {self.max_iterations}")
        if self.regularization is not None and self.regularization < 2:
            raise SolverConfigError("regularization", f"must be at least 2, got {self.regularization}")
        if self.multistart < 0:
            raise SolverConfigError("multistart", f"must be nonnegative, got {self.multistart}")
        rise = 2.0 * (1.0 - self.delta_pin)
        reach = 2.0 * self.half_length * (1.0 - self.delta_slope)
        if rise > reach:
            raise SolverConfigError(
                "half_length",
                f"pinned rise {rise:g} exceeds the reachable rise {reach:g} under the slope cap",
            )
        return self

    @property
    def pin(self) -> float:
        return 1.0 - self.delta_pin

    @property
    def slope_cap(self) -> float:
        return 1.0 - self.delta_slope

    def replace(self, **changes: Any) -> SolverConfig:
        """Copy with changes applied, validated."""
        return dataclasses.replace(self, **changes).validate()


@dataclass(frozen=True)
class VerificationConfig:
    """Thresholds used by verify_minimizer."""

    el_tol: float = 1e-3
    stretch_bands: int = 20
    stretch_thetas: tuple[float, ...] = (0.1, 0.01)
    stretch_tol: float = 1e-4
    crossing_eps: float = 0.2


@dataclass(frozen=True)
class EngineConfig:
    """Complete engine configuration.

    Attributes:
        solver: Default solver settings.
        verification: Thresholds handed to verify_minimizer.
        budget_warn_fraction: Share of max_iterations after which the solver warns.
    """

    solver: SolverConfig
    verification: VerificationConfig
    budget_warn_fraction: float


def _read_yaml(path: Path) -> dict:
    if not path.exists():
        return {}
    with open(path, encoding="utf-8") as f:
        return yaml.safe_load(f) or {}


def load_config(config_path: Path | None = None) -> EngineConfig:
    """Load engine defaults from YAML, with environment overrides for the solver.

    Args:
        config_path: Path to a defaults YAML. Defaults to engine/config.yaml.

    Raises:
        SolverConfigError: If the merged solver settings are invalid.
        ConfigError: If an environment override is not a number or the
            budget warning fraction lies outside (0, 1].
    """
    raw = _read_yaml(config_path or _DEFAULT_CONFIG_PATH)
    solver_raw = dict(raw.get("solver", {}))
    for var, (field, cast) in _ENV_OVERRIDES.items():
        value = os.environ.get(var)
        if value is None:
            continue
        try:
            solver_raw[field] = cast(value)
        except ValueError as exc:
            raise ConfigError(field, f"{var}={value!r} is not a valid {cast.__name__}") from exc

    known = {f.name for f in dataclasses.fields(SolverConfig)}
    solver = SolverConfig(**{k: v for k, v in solver_raw.items() if k in known}).validate()

    verification_raw = raw.get("verification", {})
    verification = VerificationConfig(
        el_tol=float(verification_raw.get("el_tol", 1e-3)),
        stretch_bands=int(verification_raw.get("stretch_bands", 20)),
        stretch_thetas=tuple(float(x) for x in verification_raw.get("stretch_thetas", (0.1, 0.01))),
        stretch_tol=float(verification_raw.get("stretch_tol", 1e-4)),
        crossing_eps=float(verification_raw.get("crossing_eps", 0.2)),
    )
    warn_fraction = float(raw.get("budget", {}).get("warn_fraction", DEFAULT_WARN_FRACTION))
    if not 0.0 < warn_fraction <= 1.0:
        raise ConfigError("budget.warn_fraction", f"must lie in (0, 1], got {warn_fraction}")
    return EngineConfig(solver=solver, verification=verification, budget_warn_fraction=warn_fraction)


def load_solver_defaults(path: Path | None = None) -> SolverConfig:
    """SolverConfig from the defaults file and HETERO_BI_* environment overrides."""
    return load_config(path).solver


# ---------------------------------------------------------------------------
# Registries
# ---------------------------------------------------------------------------


def resolve_potential(spec: Mapping[str, Any]) -> Potential:
    """Build a Potential from {"name": ...} or {"expression": ...}, optionally truncated.

    Raises:
        ConfigError: If the name is unknown or the expression is rejected.
    """
    truncate = bool(spec.get("truncate", False))
    try:
        if "expression" in spec:
            return expression_potential(str(spec["expression"]), truncate=truncate)
        name = spec.get("name")
        if name not in POTENTIAL_REGISTRY:
            raise ConfigError(
                "potential.name",
                f"unknown potential {name!r}. Known potentials: {sorted(POTENTIAL_REGISTRY)}",
            )
        potential = POTENTIAL_REGISTRY[name]()
        return compact_truncate(potential) if truncate else potential
    except ParameterError as exc:
        raise ConfigError("potential", str(exc)) from exc


def resolve_weight(spec: Mapping[str, Any] | None) -> Weight:
    """Build a Weight from {"family": ..., params} or {"expression": ...}; constant 1 when omitted.

    Raises:
        ConfigError: If the family is unknown, its parameters do not fit, or the weight is invalid.
    """
    if not spec:
        return constant(1.0)
    params = {k: v for k, v in spec.items() if k not in ("family", "expression")}
    try:
        if "expression" in spec:
            dominating = params.pop("dominating", None)
            return expression_weight(
                str(spec["expression"]),
                dominating=resolve_weight(dominating) if dominating else None,
                **params,
            )
        family = spec.get("family")
        if family not in WEIGHT_FAMILIES:
            raise ConfigError(
                "weight.family",
                f"unknown weight family {family!r}. Known families: {sorted(WEIGHT_FAMILIES)}",
            )
        return WEIGHT_FAMILIES[family](**params)
    except TypeError as exc:
        raise ConfigError("weight", f"bad parameters {sorted(params)}: {exc}") from exc
    except ParameterError as exc:
        raise ConfigError("weight", str(exc)) from exc
