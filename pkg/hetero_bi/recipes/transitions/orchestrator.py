"""Orchestrator for the transitions recipe.

Turns one validated RunConfig into result files and an exit code. Every
command writes into the config's output directory; sweeps give each row its
own run-NNN subdirectory and aggregate the rows into sweep.json.
"""

from __future__ import annotations

import dataclasses
import logging
import math
from dataclasses import dataclass, field
from enum import IntEnum
from pathlib import Path
from typing import Any

import numpy as np

from hetero_bi.engine.errors import (
    ConfigError,
    DegenerateWellError,
    HypothesisError,
    IntegrationError,
    NonConvergenceError,
    ParameterError,
)
from hetero_bi.engine.functional import StripGrid, action, slice_compare
from hetero_bi.engine.phase import shoot_both_ways
from hetero_bi.engine.pipeline import run_sweep
from hetero_bi.engine.potentials import scale_potential
from hetero_bi.engine.schema import RunConfig
from hetero_bi.engine.solver import (
    Solution,
    direct_minimize,
    is_monotone_after,
    odd_minimize,
    quadrature_heteroclinic,
    quadrature_phase_point,
)
from hetero_bi.engine.transforms import count_ties, oddify, rearrange
from hetero_bi.engine.verification import CheckResult, CheckStatus, VerificationReport, verify_minimizer
from hetero_bi.recipes.transitions.exporters import (
    read_profile,
    write_json,
    write_profile,
    write_trajectory_csv,
)

logger = logging.getLogger(__name__)

# Half-width of the shooting cross-check around u = 0.
_SHOOT_HALF_SPAN = 8.0
_SHOOT_STEP = 1e-3


class ExitCode(IntEnum):
    OK = 0
    VERIFICATION_FAILED = 2
    SOLVER_FAILED = 3
    CONFIG_ERROR = 4


@dataclass(frozen=True)
class RunResult:
    """Outcome of one run.

    Attributes:
        exit_code: Process exit code for the run.
        files: Files written, in order.
        summary: Headline metrics (used as the sweep row).
        error: Message for exit codes 3 and 4.
    """

    exit_code: ExitCode
    files: tuple[Path, ...] = ()
    summary: dict[str, Any] = field(default_factory=dict)
    error: str | None = None


class TransitionRunner:
    """Runs a RunConfig command and maps failures to exit codes."""

    def __init__(self, config: RunConfig) -> None:
        self._config = config
        self._out = config.output_dir
        self._files: list[Path] = []

    def run(self) -> RunResult:
        handler = {
            "solve": self._solve,
            "solve-odd": self._solve_odd,
            "quadrature": self._quadrature,
            "verify": self._verify,
            "rearrange": self._rearrange,
            "gibbons2d": self._gibbons,
            "sweep": self._sweep,
        }[self._config.command]
        logger.info("Running %s into %s", self._config.command, self._out)
        try:
            code, summary = handler()
        except (ConfigError, HypothesisError, ParameterError) as exc:
            logger.error("Configuration error: %s", exc)
            return RunResult(ExitCode.CONFIG_ERROR, tuple(self._files), {"error": str(exc)}, str(exc))
        except NonConvergenceError as exc:
            self._emit_profile(exc.best, "profile")
            self._emit_json("diagnostics.json", exc.diagnostics.to_dict())
            return RunResult(ExitCode.SOLVER_FAILED, tuple(self._files), {"error": str(exc)}, str(exc))
        except (DegenerateWellError, IntegrationError) as exc:
            logger.error("Solver failure: %s", exc)
            return RunResult(ExitCode.SOLVER_FAILED, tuple(self._files), {"error": str(exc)}, str(exc))
        return RunResult(code, tuple(self._files), summary)

    # ------------------------------------------------------------------
    # Output helpers
    # ------------------------------------------------------------------

    def _emit_json(self, name: str, payload: dict) -> None:
        self._files.append(write_json(self._out / name, payload))

    def _emit_profile(self, p: Any, stem: str) -> None:
        self._files.append(write_profile(self._out, p, self._config.format, stem))

    def _emit_solution(self, solution: Solution, report: VerificationReport) -> tuple[ExitCode, dict]:
        self._emit_profile(solution.profile, "profile")
        self._emit_json("breakdown.json", solution.breakdown.to_dict())
        self._emit_json("diagnostics.json", solution.diagnostics.to_dict())
        self._emit_json("verification.json", report.to_dict())
        d = solution.diagnostics
        summary = {
            "action": d.action,
            "max_slope": d.max_slope,
            "conservation_residual": d.conservation_residual,
            "el_residual": d.el_residual,
            "converged": d.converged,
            "verified": report.passed,
        }
        return (ExitCode.OK if report.passed else ExitCode.VERIFICATION_FAILED), summary

    # ------------------------------------------------------------------
    # Commands
    # ------------------------------------------------------------------

    def _solve(self) -> tuple[ExitCode, dict]:
        cfg = self._config
        solution = direct_minimize(
            cfg.solver, cfg.potential, cfg.weight, warn_fraction=cfg.budget_warn_fraction
        )
        report = verify_minimizer(solution.profile, cfg.potential, cfg.weight, cfg.solver, cfg.verification)
        return self._emit_solution(solution, report)

    def _solve_odd(self) -> tuple[ExitCode, dict]:
        cfg = self._config
        half = odd_minimize(cfg.solver, cfg.potential, cfg.weight, warn_fraction=cfg.budget_warn_fraction)
        full = oddify(half.profile)
        self._emit_profile(full, "profile_full")
        t_pos = cfg.weight.positivity_threshold or 0.0
        monotone = is_monotone_after(half.profile, t_pos)
        base = verify_minimizer(full, cfg.potential, cfg.weight, cfg.solver, cfg.verification)
        monotone_check = CheckResult(
            "monotone_tail",
            CheckStatus.PASS if monotone else CheckStatus.FAIL,
            detail=f"nondecreasing on [{t_pos:g}, {cfg.solver.half_length:g}]",
        )
        return self._emit_solution(half, VerificationReport(base.checks + (monotone_check,)))

    def _quadrature(self) -> tuple[ExitCode, dict]:
        cfg = self._config
        if not cfg.weight.is_constant:
            raise ConfigError("weight", "quadrature needs a constant weight")
        W = scale_potential(cfg.potential, cfg.weight.constant_value)
        profile = quadrature_heteroclinic(W, cfg.solver.delta_bc, cfg.quadrature_step)
        self._emit_profile(profile, "profile")

        start = quadrature_phase_point(W)
        half_span = min(_SHOOT_HALF_SPAN, -profile.t[0], profile.t[-1])
        try:
            trajectory = shoot_both_ways(start.u, start.p, half_span, W, dt=_SHOOT_STEP)
        except IntegrationError as exc:
            logger.warning("Shooting cross-check abandoned: %s", exc)
            sup_gap = None
        else:
            self._files.append(write_trajectory_csv(self._out / "trajectory.csv", trajectory))
            sup_gap = float(np.max(np.abs(trajectory.u - np.interp(trajectory.t, profile.t, profile.u))))

        report = verify_minimizer(profile, cfg.potential, cfg.weight, cfg.solver, cfg.verification)
        breakdown = action(profile, cfg.potential, cfg.weight)
        self._emit_json("breakdown.json", breakdown.to_dict())
        diagnostics = {
            "nodes": int(profile.t.size),
            "step": cfg.quadrature_step,
            "action": breakdown.total,
            "max_slope": float(np.max(np.abs(profile.slopes))),
            "conservation_residual": report.get("conservation").value,
            "el_residual": report.get("euler_lagrange").value,
            "shooting_sup_gap": sup_gap,
        }
        self._emit_json("diagnostics.json", diagnostics)
        self._emit_json("verification.json", report.to_dict())
        summary = {**diagnostics, "verified": report.passed}
        return (ExitCode.OK if report.passed else ExitCode.VERIFICATION_FAILED), summary

    def _verify(self) -> tuple[ExitCode, dict]:
        cfg = self._config
        profile = read_profile(cfg.profile)
        report = verify_minimizer(profile, cfg.potential, cfg.weight, cfg.solver, cfg.verification)
        self._emit_json("verification.json", report.to_dict())
        summary = {"action": action(profile, cfg.potential, cfg.weight).total, "verified": report.passed}
        return (ExitCode.OK if report.passed else ExitCode.VERIFICATION_FAILED), summary

    def _rearrange(self) -> tuple[ExitCode, dict]:
        cfg = self._config
        profile = read_profile(cfg.profile)
        sorted_profile = rearrange(profile)
        self._emit_profile(sorted_profile, "profile")
        before = action(profile, cfg.potential, cfg.weight)
        after = action(sorted_profile, cfg.potential, cfg.weight)
        summary = {
            "action_before": before.total,
            "action_after": after.total,
            "kinetic_before": before.kinetic,
            "kinetic_after": after.kinetic,
            "ties": count_ties(profile),
        }
        self._emit_json("rearrange.json", summary)
        return ExitCode.OK, summary

    def _gibbons(self) -> tuple[ExitCode, dict]:
        cfg = self._config
        g = cfg.gibbons
        x = np.linspace(-g.half_length, g.half_length, g.nx)
        y = np.linspace(0.0, 1.0, g.ny)
        u = np.tanh((x[:, None] + g.amplitude * np.sin(2.0 * math.pi * y[None, :])) / math.sqrt(2.0))
        grid = StripGrid(x, y, u)
        report = slice_compare(grid, cfg.potential, cfg.weight)

        line_cfg = cfg.solver.replace(half_length=g.half_length, cells=g.nx - 1, center=0.0)
        line = direct_minimize(line_cfg, cfg.potential, cfg.weight, warn_fraction=cfg.budget_warn_fraction)
        minimum = line.breakdown.total
        margin_over_minimizer = report.total_2d - report.width * minimum
        passed = report.passed and margin_over_minimizer > 0.0
        summary = {
            "action_2d": report.total_2d,
            "x_only_total": report.x_only_total,
            "slice_totals": list(report.slice_totals),
            "width": report.width,
            "width_times_min_slice": report.width * report.min_slice_total,
            "margin": report.margin,
            "one_d_minimum": minimum,
            "margin_over_minimizer": margin_over_minimizer,
            "above_slice_mean": report.above_slice_mean,
            "passed": passed,
        }
        self._emit_json("gibbons.json", summary)
        return (ExitCode.OK if passed else ExitCode.VERIFICATION_FAILED), summary

    def _sweep(self) -> tuple[ExitCode, dict]:
        cfg = self._config

        def task(index: int, row: RunConfig) -> tuple[int, dict]:
            row_cfg = dataclasses.replace(row, output_dir=self._out / f"run-{index:03d}", format=cfg.format)
            result = TransitionRunner(row_cfg).run()
            return int(result.exit_code), result.summary

        result = run_sweep(list(cfg.runs), task, cfg.jobs)
        self._emit_json("sweep.json", result.to_dict())
        code = ExitCode.OK if result.status == "completed" else ExitCode.VERIFICATION_FAILED
        return code, {"rows_total": result.rows_total, "rows_succeeded": result.rows_succeeded}
