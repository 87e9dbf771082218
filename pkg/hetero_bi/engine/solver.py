"""Heteroclinic solvers: conservation-law quadrature, direct minimization, odd half-line.

The quadrature path integrates the first integral 1 - 1/sqrt(1 - u'²) + W(u) = 0
in the variable u and serves as the autonomous oracle. The direct path minimizes
the discrete action over the interior node values by projected Newton steps on
the tridiagonal Hessian, with endpoints pinned near the wells.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.linalg import LinAlgError, solveh_banded

from hetero_bi.engine.budget import BudgetStatus, BudgetSummary, IterationBudget
from hetero_bi.engine.config import SolverConfig
from hetero_bi.engine.errors import (
    DegenerateWellError,
    HypothesisError,
    IntegrationError,
    NonConvergenceError,
    ParameterError,
    SurgeryError,
    WeightError,
)
from hetero_bi.engine.functional import (
    ActionBreakdown,
    DiscreteAction,
    Profile,
    ResidualReport,
    centered_slopes,
    conservation_residual,
    el_residual,
    unit_weight,
)
from hetero_bi.engine.gate import RouteDecision, route_problem
from hetero_bi.engine.kernel import RegularizedKernel, make_regularized, upsilon_psi
from hetero_bi.engine.phase import PhaseState
from hetero_bi.engine.potentials import Potential, scale_potential
from hetero_bi.engine.transforms import clamp, excise
from hetero_bi.engine.weights import Weight

logger = logging.getLogger(__name__)

# Cyclic clipping passes allowed when projecting onto the slope polytope.
_MAX_SWEEPS = 50

_MAX_HALVINGS = 40
_ARMIJO = 1e-4

# Relative slack in the sufficient-decrease test, above action rounding noise.
_ACTION_SLACK = 1e-14

# Diagonal shifts tried when the Newton matrix is not positive definite.
_MAX_SHIFTS = 8

_QUADRATURE_TOL = 1e-11
_MIN_PANELS = 64
_MAX_PANELS = 1 << 20

# Monotonicity tolerance for odd minimizers on [T_pos, L].
MONOTONE_TOL = 1e-6

# Shifted kink starts tried for a periodic weight.
MAX_PERIOD_STARTS = 8


@dataclass(frozen=True)
class Diagnostics:
    """Summary of a direct solve.

    Attributes:
        iterations: Newton iterations of the winning start.
        converged: Whether the winning start met the gradient tolerance.
        action: Final total action.
        max_slope: Largest |s_i|.
        gradient_norm: Largest projected gradient entry divided by the dual cell length.
        conservation_residual: Max conservation residual, None for non-autonomous problems.
        el_residual: Max Euler-Lagrange residual.
        contact_set: Interior node indices with |u| = 1.
        starts_tried: Number of starts run.
        best_start: Index of the winning start (0 is the linear ramp).
        regime: Routing regime of the problem.
        budget: Iteration counters of the winning start.
    """

    iterations: int
    converged: bool
    action: float
    max_slope: float
    gradient_norm: float
    conservation_residual: float | None
    el_residual: float
    contact_set: tuple[int, ...]
    starts_tried: int
    best_start: int
    regime: str
    budget: BudgetSummary

    def to_dict(self) -> dict:
        return {
            "iterations": self.iterations,
            "converged": self.converged,
            "action": self.action,
            "max_slope": self.max_slope,
            "gradient_norm": self.gradient_norm,
            "conservation_residual": self.conservation_residual,
            "el_residual": self.el_residual,
            "contact_set": list(self.contact_set),
            "starts_tried": self.starts_tried,
            "best_start": self.best_start,
            "regime": self.regime,
            "budget": self.budget.to_dict(),
        }


class Solution(NamedTuple):
    """Result of a direct solve."""

    profile: Profile
    breakdown: ActionBreakdown
    diagnostics: Diagnostics


# ---------------------------------------------------------------------------
# Quadrature oracle
# ---------------------------------------------------------------------------


def _integrand(W: Potential, zeta: np.ndarray) -> np.ndarray:
    # dt/dζ for u = tanh ζ: (1 - u²) / u'(u)
    u = np.tanh(zeta)
    w = np.asarray(W.eval(u), dtype=float)
    if np.any(w <= 0.0):
        bad = float(u[int(np.argmax(w <= 0.0))])
        raise DegenerateWellError(f"W vanishes at u={bad!r} inside the transition; the orbit stalls")
    speed = np.sqrt(w * (2.0 + w)) / (1.0 + w)
    return 1.0 / (np.cosh(zeta) ** 2 * speed)


def _cumulative_simpson(W: Potential, xi_end: float, panels: int) -> tuple[np.ndarray, np.ndarray]:
    nodes = np.linspace(0.0, xi_end, panels + 1)
    width = xi_end / panels
    f = _integrand(W, nodes)
    fm = _integrand(W, 0.5 * (nodes[:-1] + nodes[1:]))
    t = np.concatenate([[0.0], np.cumsum(width / 6.0 * (f[:-1] + 4.0 * fm + f[1:]))])
    return nodes, t


def _integrate_side(W: Potential, xi_end: float) -> tuple[np.ndarray, np.ndarray]:
    panels = _MIN_PANELS
    nodes, t = _cumulative_simpson(W, xi_end, panels)
    while panels < _MAX_PANELS:
        panels *= 2
        finer_nodes, finer_t = _cumulative_simpson(W, xi_end, panels)
        gap = float(np.max(np.abs(finer_t[::2] - t)))
        nodes, t = finer_nodes, finer_t
        if gap <= _QUADRATURE_TOL * max(1.0, abs(float(t[-1]))):
            logger.debug("Quadrature converged with %d panels (gap %.3g)", panels, gap)
            return nodes, t
    raise IntegrationError(f"quadrature did not converge with {panels} panels")


def quadrature_heteroclinic(W: Potential, delta_bc: float = 1e-3, step: float = 1e-3) -> Profile:
    """Heteroclinic from the conservation law, on a uniform grid with u(0) = 0.

    t(u) is integrated outward from u = 0 on each side in the variable
    ζ = atanh(u) by panel-doubling composite Simpson, slightly past
    ±(1 - delta_bc). The profile is resampled on the grid k*step and cut at
    the first nodes beyond ∓(1 - delta_bc).

    Raises:
        ParameterError: If delta_bc or step is not in (0, 1).
        DegenerateWellError: If W vanishes inside the transition.
        IntegrationError: If the quadrature or the grid cut fails.
    """
    if not 0.0 < delta_bc < 1.0:
        raise ParameterError(f"delta_bc must lie in (0, 1), got {delta_bc}")
    if not 0.0 < step < 1.0:
        raise ParameterError(f"step must lie in (0, 1), got {step}")

    xi_max = math.atanh(1.0 - delta_bc / 4.0)
    right_xi, right_t = _integrate_side(W, xi_max)
    left_xi, left_t = _integrate_side(W, -xi_max)
    xi = np.concatenate([left_xi[:0:-1], right_xi])
    t = np.concatenate([left_t[:0:-1], right_t])
    spline = CubicSpline(t, xi)

    k = np.arange(math.ceil(t[0] / step), math.floor(t[-1] / step) + 1)
    grid = k * step
    u = np.tanh(spline(grid))
    target = 1.0 - delta_bc
    above = np.nonzero(u >= target)[0]
    below = np.nonzero(u <= -target)[0]
    if above.size == 0 or below.size == 0:
        raise IntegrationError(f"step {step} is too coarse to resolve the boundary layer")
    lo, hi = int(below[-1]), int(above[0])
    logger.info("Quadrature profile for %s: %d nodes on [%g, %g]", W.name, hi - lo + 1, grid[lo], grid[hi])
    return Profile(grid[lo : hi + 1], u[lo : hi + 1], clamped=True)


def quadrature_phase_point(W: Potential) -> PhaseState:
    """Phase point of the heteroclinic at u = 0: p = sqrt(W(0)(2 + W(0))).

    Raises:
        DegenerateWellError: If W(0) <= 0, so no transition passes through 0.
    """
    w0 = float(W.eval(0.0))
    if w0 <= 0.0:
        raise DegenerateWellError(f"W(0) = {w0} leaves no transition through u = 0")
    return PhaseState(0.0, math.sqrt(w0 * (2.0 + w0)))


def regularized_conservation_residual(p: Profile, W: Potential, k: RegularizedKernel) -> ResidualReport:
    """Υₙ(ψₙ(s̄_i)) - W(u_i) at the interior nodes.

    The regularized counterpart of conservation_residual: a minimizer of the
    Ψₙ action with a constant weight keeps it near zero.

    Args:
        p: Profile.
        W: Potential, already scaled by the constant weight.
        k: Regularized kernel.

    Returns:
        ResidualReport over the interior nodes, using centered slopes s̄_i.
    """
    values = np.asarray(upsilon_psi(k, centered_slopes(p)), dtype=float) - np.asarray(W.eval(p.u[1:-1]), dtype=float)
    t = p.t[1:-1]
    return ResidualReport(t=t, values=values, max_abs=float(np.max(np.abs(values))) if values.size else 0.0)


def periodic_recentre(p: Profile, period: float) -> Profile:
    """Translate by a multiple of the period so the first zero crossing lies in [0, period).

    Args:
        p: Profile with an upward zero crossing.
        period: Weight period, positive.

    Returns:
        The shifted profile; values are untouched.

    Raises:
        ParameterError: If period <= 0 or p never crosses zero upward.
    """
    if not period > 0.0:
        raise ParameterError(f"period must be positive, got {period}")
    hits = np.nonzero(p.u >= 0.0)[0]
    if hits.size == 0 or hits[0] == 0:
        raise ParameterError("profile has no upward zero crossing")
    j = int(hits[0])
    u0, u1 = p.u[j - 1], p.u[j]
    zero = p.t[j - 1] + (0.0 - u0) / (u1 - u0) * (p.t[j] - p.t[j - 1])
    return p.shifted(-math.floor(zero / period) * period)


# ---------------------------------------------------------------------------
# Projected Newton
# ---------------------------------------------------------------------------


def project(u: np.ndarray, h: np.ndarray, cap: float) -> np.ndarray:
    """Clip values to [-1, 1], then cyclically clip slopes to |s| <= cap.

    Endpoints are never moved. Forward and backward passes alternate until
    every cell is feasible or the sweep budget runs out.
    """
    out = np.clip(u, -1.0, 1.0)
    out[0], out[-1] = u[0], u[-1]
    limit = cap * h
    slack = limit * (1.0 + 1e-12)
    if np.all(np.abs(np.diff(out)) <= slack):
        return out
    n = out.size
    for sweep in range(_MAX_SWEEPS):
        for i in range(1, n - 1):
            out[i] = min(max(out[i], out[i - 1] - limit[i - 1]), out[i - 1] + limit[i - 1])
        for i in range(n - 2, 0, -1):
            out[i] = min(max(out[i], out[i + 1] - limit[i]), out[i + 1] + limit[i])
        if np.all(np.abs(np.diff(out)) <= slack):
            logger.debug("Slope projection feasible after %d sweep(s)", sweep + 1)
            return out
    logger.warning("Slope projection still infeasible after %d sweeps", _MAX_SWEEPS)
    return out


def _newton_direction(diag: np.ndarray, off: np.ndarray, rhs: np.ndarray, free: np.ndarray) -> np.ndarray | None:
    d = np.where(free, diag, 1.0)
    o = np.where(free[:-1] & free[1:], off, 0.0)
    r = np.where(free, rhs, 0.0)
    scale = max(float(np.max(np.abs(d))), 1.0)
    shift = 0.0
    for attempt in range(_MAX_SHIFTS):
        ab = np.vstack([np.concatenate([[0.0], o]), d + shift])
        try:
            return np.where(free, solveh_banded(ab, r, check_finite=False), 0.0)
        except LinAlgError:
            shift = scale * 10.0 ** (attempt - 8)
    return None


class _Run(NamedTuple):
    u: np.ndarray
    value: float
    converged: bool
    gradient_norm: float
    budget: BudgetSummary


def _free_mask(u: np.ndarray, grad: np.ndarray) -> np.ndarray:
    inner = u[1:-1]
    pinned_top = (inner >= 1.0) & (grad < 0.0)
    pinned_bottom = (inner <= -1.0) & (grad > 0.0)
    return ~(pinned_top | pinned_bottom)


def _minimize(functional: DiscreteAction, u0: np.ndarray, cfg: SolverConfig, warn_fraction: float = 0.8) -> _Run:
    h = functional.h
    dual = 0.5 * (h[:-1] + h[1:])
    budget = IterationBudget(cfg.max_iterations, warn_fraction)
    u = project(u0, h, cfg.slope_cap)
    value = functional.value(u)
    budget.record_evaluation()
    converged = False
    norm = math.inf
    warned = False

    while budget.check() is not BudgetStatus.EXCEEDED:
        grad = functional.gradient(u)[1:-1]
        free = _free_mask(u, grad)
        pg = np.where(free, grad, 0.0)
        norm = float(np.max(np.abs(pg) / dual)) if pg.size else 0.0
        if norm <= cfg.tol:
            converged = True
            break
        budget.record_iteration()
        if budget.check() is BudgetStatus.WARNING and not warned:
            warned = True
            logger.warning("Solver used %d of %d iterations (gradient %.3g)", budget.iterations, cfg.max_iterations, norm)

        diag, off = functional.hessian_bands(u)
        direction = _newton_direction(diag[1:-1], off[1:-1], -pg, free)
        if direction is None or float(np.dot(pg, direction)) >= 0.0:
            direction = -pg / max(float(np.max(np.abs(diag))), 1.0)

        accepted = False
        for candidate in (direction, -pg / max(float(np.max(np.abs(diag))), 1.0)):
            alpha = 1.0
            for _ in range(_MAX_HALVINGS):
                trial = u.copy()
                trial[1:-1] += alpha * candidate
                trial = project(trial, h, cfg.slope_cap)
                trial_value = functional.value(trial)
                budget.record_evaluation()
                decrease = _ARMIJO * float(np.dot(grad, trial[1:-1] - u[1:-1]))
                if trial_value <= value + decrease + _ACTION_SLACK * max(1.0, abs(value)):
                    accepted = True
                    break
                alpha *= 0.5
            if accepted:
                break
        if not accepted:
            logger.debug("Line search stalled at gradient %.3g", norm)
            break
        u, value = trial, trial_value
        logger.debug("iter %d: action %.15g gradient %.3g step %.3g", budget.iterations, value, norm, alpha)

    return _Run(u=u, value=value, converged=converged, gradient_norm=norm, budget=budget.summary())


def _starts(t: np.ndarray, left: float, right: float, cfg: SolverConfig) -> list[np.ndarray]:
    ramp = left + (right - left) * (t - t[0]) / (t[-1] - t[0])
    starts = [ramp]
    rng = np.random.default_rng(cfg.seed)
    phase = (t - t[0]) / (t[-1] - t[0])
    for _ in range(cfg.multistart):
        amp = rng.uniform(0.05, 0.3)
        mode = int(rng.integers(1, 6))
        starts.append(ramp + amp * np.sin(mode * math.pi * phase))
    return starts


def period_centers(t: np.ndarray, period: float, limit: int = MAX_PERIOD_STARTS) -> list[float]:
    """Multiples of period strictly inside (t[0], t[-1]), nearest the window middle first.

    Args:
        t: Grid nodes.
        period: Weight period, positive.
        limit: Maximum number of centers returned.

    Returns:
        Up to limit centers, ordered by distance to the window middle.
    """
    first = math.floor(t[0] / period) + 1
    last = math.ceil(t[-1] / period) - 1
    centers = [k * period for k in range(first, last + 1)]
    middle = 0.5 * (t[0] + t[-1])
    centers.sort(key=lambda c: (abs(c - middle), c))
    return centers[:limit]


def _kink(t: np.ndarray, left: float, right: float, center: float) -> np.ndarray:
    # peak slope (right - left) / 4 stays under the cap
    return 0.5 * (left + right) + 0.5 * (right - left) * np.tanh(0.5 * (t - center))


def _regime_starts(
    t: np.ndarray, left: float, right: float, cfg: SolverConfig, a: Weight, decision: RouteDecision
) -> list[np.ndarray]:
    """Starts for the routed regime.

    Periodic problems are invariant under shifts by the period, so one kink
    per period inside the window joins the ramp and the multistart draws.
    An unsupported problem is solved on the window all the same, with a warning.
    """
    starts = _starts(t, left, right, cfg)
    if decision.regime == "periodic" and a.period is not None:
        centers = period_centers(t, a.period)
        starts.extend(_kink(t, left, right, c) for c in centers)
        logger.debug("Periodic regime: %d shifted start(s) at %s", len(centers), centers)
    elif decision.regime == "unsupported":
        logger.warning("No existence result covers this problem (%s); the window minimizer may drift", decision.reason)
    return starts


def _check_window(a: Weight, t: np.ndarray) -> None:
    with np.errstate(all="ignore"):
        values = np.asarray(a.eval(t), dtype=float)
    if not np.all(np.isfinite(values)):
        bad = float(t[int(np.argmax(~np.isfinite(values)))])
        raise WeightError(f"{a.name} is not evaluable at t={bad!r} inside the window")


def _solve(
    t: np.ndarray,
    left: float,
    right: float,
    cfg: SolverConfig,
    W: Potential,
    a: Weight,
    initial: np.ndarray | None = None,
    warn_fraction: float = 0.8,
) -> Solution:
    kernel = make_regularized(cfg.regularization) if cfg.regularization is not None else None
    _check_window(a, t)
    functional = DiscreteAction(t, W, a, kernel=kernel)
    decision = route_problem(W, a)

    if initial is not None:
        starts = [np.asarray(initial, dtype=float)]
    else:
        starts = _regime_starts(t, left, right, cfg, a, decision)
    runs: list[_Run] = []
    for index, start in enumerate(starts):
        start = start.copy()
        start[0], start[-1] = left, right
        run = _minimize(functional, start, cfg, warn_fraction)
        logger.debug("start %d: action %.15g converged=%s", index, run.value, run.converged)
        runs.append(run)

    pool = [i for i, r in enumerate(runs) if r.converged] or list(range(len(runs)))
    best = min(pool, key=lambda i: (runs[i].value, i))
    run = runs[best]
    profile = Profile(t, run.u, clamped=True)
    diagnostics = _diagnostics(profile, W, a, kernel, run, len(runs), best, decision.regime)
    if not run.converged:
        raise NonConvergenceError(
            f"no start converged within {cfg.max_iterations} iterations "
            f"(best gradient {run.gradient_norm:.3g}, tol {cfg.tol:g})",
            best=profile,
            diagnostics=diagnostics,
        )
    logger.info(
        "Converged in %d iterations: action %.12g, max slope %.6f",
        run.budget.iterations, run.value, diagnostics.max_slope,
    )
    return Solution(profile, functional.breakdown(run.u), diagnostics)


def _diagnostics(
    p: Profile,
    W: Potential,
    a: Weight,
    kernel: RegularizedKernel | None,
    run: _Run,
    starts: int,
    best: int,
    regime: str,
) -> Diagnostics:
    conservation = None
    if a.is_constant:
        scaled = scale_potential(W, a.constant_value)
        if kernel is None:
            conservation = conservation_residual(p, scaled).max_abs
        else:
            conservation = regularized_conservation_residual(p, scaled, kernel).max_abs
    interior = np.abs(p.u[1:-1]) >= 1.0
    contact = tuple(int(i) + 1 for i in np.nonzero(interior)[0])
    return Diagnostics(
        iterations=run.budget.iterations,
        converged=run.converged,
        action=run.value,
        max_slope=float(np.max(np.abs(p.slopes))),
        gradient_norm=run.gradient_norm,
        conservation_residual=conservation,
        el_residual=el_residual(p, W, a, kernel).max_abs,
        contact_set=contact,
        starts_tried=starts,
        best_start=best,
        regime=regime,
        budget=run.budget,
    )


def direct_minimize(
    cfg: SolverConfig, W: Potential, a: Weight | None = None, *, warn_fraction: float = 0.8
) -> Solution:
    """Minimize the discrete action on [center - L, center + L].

    Endpoints are pinned at -(1 - delta_pin) and 1 - delta_pin; slopes are
    capped at 1 - delta_slope. With cfg.regularization = n the kinetic
    density is Ψₙ. Each start (the linear ramp, cfg.multistart seeded
    perturbations, and for a periodic weight one kink per period inside the
    window) runs projected Newton; the lowest action among the converged
    starts wins, ties going to the lowest index.

    Args:
        cfg: Window, grid and iteration settings.
        W: Double-well potential.
        a: Weight; constant 1 when omitted.
        warn_fraction: Share of max_iterations after which a budget warning is logged.

    Returns:
        The winning profile with its action breakdown and diagnostics.

    Raises:
        SolverConfigError: If cfg is invalid or the pinning is infeasible.
        WeightError: If a is not evaluable on the window.
        NonConvergenceError: If no start converges; carries the best iterate.
    """
    cfg.validate()
    weight = a or unit_weight()
    t = cfg.center + np.linspace(-cfg.half_length, cfg.half_length, cfg.cells + 1)
    logger.info(
        "Direct solve: %s with %s on [%g, %g], %d cells",
        W.name, weight.name, t[0], t[-1], cfg.cells,
    )
    return _solve(t, -cfg.pin, cfg.pin, cfg, W, weight, warn_fraction=warn_fraction)


# ---------------------------------------------------------------------------
# Odd heteroclinics
# ---------------------------------------------------------------------------


def _missing_odd_hypotheses(W: Potential, a: Weight) -> list[str]:
    missing = []
    if not W.has_W2prime:
        missing.append("(W2')")
    if not W.has_W3:
        missing.append("(W3)")
    flags = a.flags()
    missing.extend(f"({label})" for label in ("a2", "a3", "a4") if not flags[label])
    return missing


def _first_descent(p: Profile, t_pos: float) -> tuple[int, int] | None:
    """Nodes (i1, i2) bracketing the first descent on [t_pos, L], with u(i2) >= u(i1)."""
    start = int(np.searchsorted(p.t, t_pos))
    drops = np.nonzero(np.diff(p.u[start:]) < -MONOTONE_TOL)[0]
    if drops.size == 0:
        return None
    i1 = start + int(drops[0])
    recovered = np.nonzero(p.u[i1 + 1 :] >= p.u[i1])[0]
    if recovered.size == 0:
        return None
    return i1, i1 + 1 + int(recovered[0])


def _excise_descents(p: Profile, functional: DiscreteAction, t_pos: float, cap: float) -> Profile:
    current = p
    value = functional.value(current.u)
    for _ in range(current.n_cells):
        bracket = _first_descent(current, t_pos)
        if bracket is None:
            break
        i1, i2 = bracket
        levelled = current.u.copy()
        levelled[i2] = levelled[i1]
        try:
            cut = excise(Profile(current.t, levelled), float(current.t[i1]), float(current.t[i2]))
        except SurgeryError as exc:
            logger.warning("Excision on [%g, %g] rejected: %s", current.t[i1], current.t[i2], exc)
            break
        tail = np.full(current.t.size - cut.t.size, current.u[-1])
        candidate = project(np.concatenate([cut.u, tail]), functional.h, cap)
        candidate_value = functional.value(candidate)
        if candidate_value >= value:
            logger.warning(
                "Excision on [%g, %g] rejected: action %.12g >= %.12g",
                current.t[i1], current.t[i2], candidate_value, value,
            )
            break
        logger.info("Excised descent on [%g, %g]: action %.12g -> %.12g", current.t[i1], current.t[i2], value, candidate_value)
        current = Profile(current.t, candidate, clamped=True)
        value = candidate_value
    return current


def odd_minimize(cfg: SolverConfig, W: Potential, a: Weight, *, warn_fraction: float = 0.8) -> Solution:
    """Minimize the half-line action on [0, L] with u(0) = 0 and u(L) = 1 - delta_pin.

    The half-line grid has cfg.cells // 2 cells, so oddify of the result
    lives on the full-line grid. After Newton converges the profile is
    clamped, descents on [T_pos, L] are excised when that lowers the action,
    and a final Newton pass polishes the result. Excision compares actions
    under the same kernel the solve used.

    Args:
        cfg: Window, grid and iteration settings.
        W: Potential with (W2') and (W3).
        a: Weight with (a2), (a3) and (a4).
        warn_fraction: Share of max_iterations after which a budget warning is logged.

    Raises:
        HypothesisError: If W lacks (W2') or (W3), or a lacks (a2), (a3) or (a4).
        SolverConfigError: If cfg is invalid.
        NonConvergenceError: If Newton does not converge.
    """
    cfg.validate()
    missing = _missing_odd_hypotheses(W, a)
    if missing:
        raise HypothesisError(f"odd heteroclinics need {', '.join(missing)} for {W.name} with {a.name}")
    t = np.linspace(0.0, cfg.half_length, cfg.cells // 2 + 1)
    logger.info("Odd solve: %s with %s on [0, %g], %d cells", W.name, a.name, cfg.half_length, t.size - 1)
    first = _solve(t, 0.0, cfg.pin, cfg, W, a, warn_fraction=warn_fraction)

    t_pos = a.positivity_threshold or 0.0
    kernel = make_regularized(cfg.regularization) if cfg.regularization is not None else None
    functional = DiscreteAction(t, W, a, kernel=kernel)
    surgered = _excise_descents(clamp(first.profile), functional, t_pos, cfg.slope_cap)
    if np.array_equal(surgered.u, first.profile.u):
        result = first
    else:
        result = _solve(t, 0.0, cfg.pin, cfg, W, a, initial=surgered.u, warn_fraction=warn_fraction)

    if not is_monotone_after(result.profile, t_pos):
        logger.warning("Odd minimizer is not nondecreasing on [%g, %g]", t_pos, cfg.half_length)
    return result


def is_monotone_after(p: Profile, t_pos: float, tol: float = MONOTONE_TOL) -> bool:
    """Whether u is nondecreasing within tol on [t_pos, t_N].

    Args:
        p: Profile, typically a half-line odd minimizer.
        t_pos: Start of the checked tail, the weight's positivity threshold.
        tol: Largest drop between neighbouring nodes still counted as nondecreasing.
    """
    start = int(np.searchsorted(p.t, t_pos))
    return bool(np.all(np.diff(p.u[start:]) >= -tol))
