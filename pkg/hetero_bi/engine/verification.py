"""Necessary-condition checks bundled into one report per computed profile."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum

import numpy as np

from hetero_bi.engine.config import SolverConfig, VerificationConfig
from hetero_bi.engine.errors import ParameterError
from hetero_bi.engine.functional import (
    Profile,
    action,
    conservation_residual,
    crossing_band,
    derivative_bound,
    el_residual,
    nonautonomous_derivative_bound,
    unit_weight,
)
from hetero_bi.engine.potentials import Potential, scale_potential
from hetero_bi.engine.transforms import rearrange, stretch
from hetero_bi.engine.weights import Weight

logger = logging.getLogger(__name__)

# Slack on the slope bounds for discretization error.
SLOPE_SLACK = 1e-3

_BOUNDARY_SLACK = 1e-12
_REARRANGE_TOL = 1e-12


class CheckStatus(Enum):
    PASS = "pass"
    FAIL = "fail"
    NOT_APPLICABLE = "not_applicable"


@dataclass(frozen=True)
class CheckResult:
    """One check of a verification report.

    Attributes:
        name: Check identifier.
        status: Pass, fail or not applicable.
        value: Measured quantity, None when not applicable.
        threshold: Bound the value is compared against.
        detail: Human-readable explanation.
    """

    name: str
    status: CheckStatus
    value: float | None = None
    threshold: float | None = None
    detail: str = ""

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "status": self.status.value,
            "value": self.value,
            "threshold": self.threshold,
            "detail": self.detail,
        }


@dataclass(frozen=True)
class VerificationReport:
    """All checks run on one profile; passed when no check failed."""

    checks: tuple[CheckResult, ...]

    @property
    def passed(self) -> bool:
        return all(c.status is not CheckStatus.FAIL for c in self.checks)

    def get(self, name: str) -> CheckResult:
        for check in self.checks:
            if check.name == name:
                return check
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {"passed": self.passed, "checks": [c.to_dict() for c in self.checks]}


def _compare(name: str, value: float, threshold: float, detail: str, at_most: bool = True) -> CheckResult:
    ok = value <= threshold if at_most else value >= threshold
    return CheckResult(name, CheckStatus.PASS if ok else CheckStatus.FAIL, value, threshold, detail)


def _skip(name: str, detail: str) -> CheckResult:
    logger.warning("Check %s skipped: %s", name, detail)
    return CheckResult(name, CheckStatus.NOT_APPLICABLE, detail=detail)


def _boundary(p: Profile, cfg: SolverConfig) -> CheckResult:
    gap = max(abs(p.u[0] + 1.0), abs(p.u[-1] - 1.0))
    return _compare("boundary", float(gap), cfg.delta_bc + _BOUNDARY_SLACK, "endpoint distance to the wells")


def _slope(p: Profile, W: Potential, a: Weight, total: float) -> CheckResult:
    max_slope = float(np.max(np.abs(p.slopes)))
    if a.is_constant:
        bound = derivative_bound(scale_potential(W, a.constant_value))
        return _compare("slope_bound", max_slope, bound + SLOPE_SLACK, "autonomous bound sqrt(1 - 1/(1 + max W)²)")
    if a.lipschitz_ratio is not None and a.bounded and a.upper is not None:
        bound = nonautonomous_derivative_bound(W, a.upper, a.lipschitz_ratio, max(total, 0.0))
        return _compare("slope_bound", max_slope, bound + SLOPE_SLACK, "bound for weights with |a'| <= C a")
    return _skip("slope_bound", "no slope bound for this weight")


def _conservation(p: Profile, W: Potential, a: Weight, tol: float) -> CheckResult:
    if not a.is_constant:
        return _skip("conservation", "energy is not conserved for time-dependent weights")
    try:
        residual = conservation_residual(p, scale_potential(W, a.constant_value)).max_abs
    except ParameterError as exc:
        return CheckResult("conservation", CheckStatus.FAIL, detail=str(exc))
    return _compare("conservation", residual, tol, "max |1 - 1/sqrt(1 - s̄²) + W(u)|")


def _euler_lagrange(p: Profile, W: Potential, a: Weight, tol: float) -> CheckResult:
    try:
        residual = el_residual(p, W, a).max_abs
    except ParameterError as exc:
        return CheckResult("euler_lagrange", CheckStatus.FAIL, detail=str(exc))
    return _compare("euler_lagrange", residual, tol, "max discrete Euler-Lagrange residual")


def _stretch(p: Profile, W: Potential, a: Weight, vcfg: VerificationConfig, seed: int, base: float) -> CheckResult:
    if not a.is_constant:
        return _skip("stretch", "stretching shifts a time-dependent weight")
    rng = np.random.default_rng(seed)
    span = p.span
    worst = np.inf
    for _ in range(vcfg.stretch_bands):
        length = rng.uniform(0.05, 0.3) * span
        t0 = p.t[0] + rng.uniform(0.0, span - length)
        for theta in vcfg.stretch_thetas:
            quotient = (action(stretch(p, t0, t0 + length, theta), W, a).total - base) / length
            worst = min(worst, quotient)
    return _compare(
        "stretch", float(worst), -vcfg.stretch_tol,
        f"min first-variation quotient over {vcfg.stretch_bands} bands", at_most=False,
    )


def _rearrange(p: Profile, W: Potential, a: Weight, base: float) -> CheckResult:
    if not p.is_uniform() or np.any(np.abs(p.u) > 1.0):
        return _skip("rearrange", "rearrangement needs a uniform grid and values in [-1, 1]")
    sorted_total = action(rearrange(p), W, a).total
    return _compare(
        "rearrange", sorted_total, base - _REARRANGE_TOL * max(1.0, abs(base)),
        "action of the monotone rearrangement", at_most=False,
    )


def _crossing(p: Profile, W: Potential, a: Weight, eps: float, total: float) -> CheckResult:
    band = crossing_band(p, W, a, eps)
    if band is None or band.bound is None:
        return _skip("crossing", f"no usable crossing of the band [1 - {eps}, 1 - {eps / 2}]")
    return _compare(
        "crossing", total, band.bound,
        f"action vs crossing bound on [{band.t1:.4g}, {band.t2:.4g}], a1={band.a1:.4g}", at_most=False,
    )


def verify_minimizer(
    p: Profile,
    W: Potential,
    a: Weight | None,
    cfg: SolverConfig,
    vcfg: VerificationConfig | None = None,
) -> VerificationReport:
    """Run every applicable necessary condition on a computed profile.

    Checks: boundary, slope_bound, conservation, euler_lagrange, stretch,
    rearrange, crossing. Checks that do not apply to the problem are marked
    not applicable; failures never raise.

    Args:
        p: Candidate minimizer.
        W: Potential.
        a: Weight; constant 1 when None.
        cfg: Solver settings; supplies delta_bc and the seed for the stretch bands.
        vcfg: Check thresholds; VerificationConfig() when omitted. Run configs
            carry the engine defaults here.

    Returns:
        VerificationReport with one CheckResult per check, in the order above.
    """
    weight = a or unit_weight()
    vcfg = vcfg or VerificationConfig()
    total = action(p, W, weight).total
    checks = (
        _boundary(p, cfg),
        _slope(p, W, weight, total),
        _conservation(p, W, weight, vcfg.el_tol),
        _euler_lagrange(p, W, weight, vcfg.el_tol),
        _stretch(p, W, weight, vcfg, cfg.seed, total),
        _rearrange(p, W, weight, total),
        _crossing(p, W, weight, vcfg.crossing_eps, total),
    )
    report = VerificationReport(checks)
    failed = [c.name for c in checks if c.status is CheckStatus.FAIL]
    if failed:
        logger.info("Verification failed: %s", ", ".join(failed))
    else:
        logger.info("Verification passed (%d checks)", len(checks))
    return report
