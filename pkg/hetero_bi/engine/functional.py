"""Discrete actions, residuals and bounds on piecewise-linear profiles.

A Profile is a piecewise-linear candidate u on nodes t_0 < ... < t_N. The
kinetic term is exact per cell, g(s_i) Δt_i, and the potential term uses
the midpoint rule a(t_mid) W(u_mid) Δt_i. Every sum is a numpy reduction
over a contiguous array (pairwise summation), so totals are reproducible
bit for bit on a given platform.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass
from typing import Literal

import numpy as np
from numpy.typing import ArrayLike

from hetero_bi.engine.errors import (
    KernelSingularityError,
    ParameterError,
    ProfileError,
    UnsupportedGridError,
)
from hetero_bi.engine.kernel import (
    RegularizedKernel,
    g,
    g_prime,
    g_second,
    psi_n_deriv,
    psi_n_eval,
    psi_n_second,
)
from hetero_bi.engine.potentials import Potential, beta_eps, max_W, second_derivative
from hetero_bi.engine.weights import Weight, constant, infimum_on

logger = logging.getLogger(__name__)

# Secant slopes may exceed 1 by rounding when u tracks t exactly.
_SLOPE_TOL = 1e-12

# Relative spacing spread accepted as a uniform grid.
_UNIFORM_RTOL = 1e-9

Quadrature = Literal["midpoint", "nodal"]


@dataclass(frozen=True)
class Profile:
    """Piecewise-linear profile u on a 1D grid.

    Attributes:
        t: Strictly increasing nodes t_0..t_N.
        u: Values u_0..u_N.
        clamped: Set when the values are known to lie in [-1, 1].
    """

    t: np.ndarray
    u: np.ndarray
    clamped: bool = False

    def __post_init__(self) -> None:
        t = np.array(self.t, dtype=float)
        u = np.array(self.u, dtype=float)
        if t.ndim != 1 or t.shape != u.shape:
            raise ProfileError(f"t and u must be 1D of equal length, got {t.shape} and {u.shape}")
        if t.size < 2:
            raise ProfileError("a profile needs at least two nodes")
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(u))):
            raise ProfileError("profile contains non-finite values")
        steps = np.diff(t)
        if not np.all(steps > 0.0):
            cell = int(np.argmax(steps <= 0.0))
            raise ProfileError(f"nodes must be strictly increasing (cell {cell})")
        if self.clamped and np.any(np.abs(u) > 1.0):
            raise ProfileError("clamped profile has values outside [-1, 1]")
        t.flags.writeable = False
        u.flags.writeable = False
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "u", u)

    @classmethod
    def sample(cls, fn: Callable[[np.ndarray], ArrayLike], t: ArrayLike) -> Profile:
        """Profile with values fn(t) on the given nodes."""
        nodes = np.asarray(t, dtype=float)
        return cls(nodes, np.asarray(fn(nodes), dtype=float))

    @property
    def n_cells(self) -> int:
        return self.t.size - 1

    @property
    def dt(self) -> np.ndarray:
        return np.diff(self.t)

    @property
    def slopes(self) -> np.ndarray:
        return np.diff(self.u) / np.diff(self.t)

    @property
    def t_mid(self) -> np.ndarray:
        return 0.5 * (self.t[:-1] + self.t[1:])

    @property
    def u_mid(self) -> np.ndarray:
        return 0.5 * (self.u[:-1] + self.u[1:])

    @property
    def span(self) -> float:
        return float(self.t[-1] - self.t[0])

    def is_uniform(self, rtol: float = _UNIFORM_RTOL) -> bool:
        h = self.dt
        return bool(np.max(h) - np.min(h) <= rtol * np.mean(h))

    def shifted(self, delta: float) -> Profile:
        return Profile(self.t + delta, self.u, self.clamped)

    def check_slopes(self, cap: float = 1.0) -> np.ndarray:
        """Return the slopes, raising ProfileError on the first cell with |s| > cap."""
        s = self.slopes
        over = np.abs(s) > cap + _SLOPE_TOL
        if np.any(over):
            cell = int(np.argmax(over))
            raise ProfileError(
                f"slope {float(s[cell])!r} on cell {cell} "
                f"[{float(self.t[cell])!r}, {float(self.t[cell + 1])!r}] exceeds {cap}"
            )
        return s


def restrict(p: Profile, t_lo: float, t_hi: float) -> Profile:
    """Profile on the nodes lying in [t_lo, t_hi]."""
    tol = _UNIFORM_RTOL * max(1.0, abs(t_lo), abs(t_hi))
    keep = (p.t >= t_lo - tol) & (p.t <= t_hi + tol)
    return Profile(p.t[keep], p.u[keep], p.clamped)


def unit_weight() -> Weight:
    return constant(1.0)


# ---------------------------------------------------------------------------
# Action
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ActionBreakdown:
    """Kinetic and potential parts of a discrete action.

    Attributes:
        kinetic: K = sum of kinetic cells.
        potential: P = sum of potential cells (negative where a < 0).
        total: K + P.
        per_cell: Array of shape (N, 2) with columns (kinetic, potential).
    """

    kinetic: float
    potential: float
    total: float
    per_cell: np.ndarray

    def to_dict(self) -> dict:
        return {
            "kinetic": self.kinetic,
            "potential": self.potential,
            "total": self.total,
            "cells": self.per_cell.tolist(),
        }


def _kernel_functions(
    kernel: RegularizedKernel | None,
) -> tuple[Callable, Callable, Callable]:
    if kernel is None:
        return g, g_prime, g_second
    return (
        lambda s: psi_n_eval(kernel, s),
        lambda s: psi_n_deriv(kernel, s),
        lambda s: psi_n_second(kernel, s),
    )


class DiscreteAction:
    """Discrete action on a fixed grid, as a function of the node values.

    Solvers evaluate the value, gradient and tridiagonal Hessian of this
    map many times on one grid, so the weight is sampled once at the cell
    midpoints.
    """

    def __init__(
        self,
        t: ArrayLike,
        potential: Potential,
        weight: Weight | None = None,
        kernel: RegularizedKernel | None = None,
    ) -> None:
        self.t = np.asarray(t, dtype=float)
        self.h = np.diff(self.t)
        self.potential = potential
        self.weight = weight or unit_weight()
        self.kernel = kernel
        self.a_mid = np.asarray(self.weight.eval(0.5 * (self.t[:-1] + self.t[1:])), dtype=float)
        self._density, self._flux, self._curvature = _kernel_functions(kernel)

    def _slopes(self, u: np.ndarray) -> np.ndarray:
        s = np.diff(u) / self.h
        over = np.abs(s) > 1.0 + _SLOPE_TOL
        if np.any(over):
            cell = int(np.argmax(over))
            raise ProfileError(f"slope {float(s[cell])!r} on cell {cell} exceeds 1")
        return s

    def cells(self, u: np.ndarray) -> np.ndarray:
        """Per-cell (kinetic, potential) contributions, shape (N, 2)."""
        s = self._slopes(u)
        mid = 0.5 * (u[:-1] + u[1:])
        kinetic = np.asarray(self._density(s), dtype=float) * self.h
        potential = self.a_mid * np.asarray(self.potential.eval(mid), dtype=float) * self.h
        return np.column_stack([kinetic, potential])

    def value(self, u: np.ndarray) -> float:
        per_cell = self.cells(u)
        return float(np.sum(per_cell[:, 0]) + np.sum(per_cell[:, 1]))

    def breakdown(self, u: np.ndarray) -> ActionBreakdown:
        per_cell = self.cells(u)
        kinetic = float(np.sum(per_cell[:, 0]))
        potential = float(np.sum(per_cell[:, 1]))
        return ActionBreakdown(kinetic, potential, kinetic + potential, per_cell)

    def gradient(self, u: np.ndarray) -> np.ndarray:
        """Derivative with respect to every node value (endpoints included)."""
        s = self._slopes(u)
        mid = 0.5 * (u[:-1] + u[1:])
        flux = np.asarray(self._flux(s), dtype=float)
        force = 0.5 * self.a_mid * np.asarray(self.potential.deriv(mid), dtype=float) * self.h
        grad = np.zeros_like(u)
        grad[:-1] += force - flux
        grad[1:] += force + flux
        return grad

    def hessian_bands(self, u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Diagonal and first off-diagonal of the (tridiagonal) Hessian."""
        s = self._slopes(u)
        mid = 0.5 * (u[:-1] + u[1:])
        curv = np.asarray(self._curvature(s), dtype=float) / self.h
        pot = 0.25 * self.a_mid * np.asarray(second_derivative(self.potential, mid), dtype=float) * self.h
        diag = np.zeros_like(u)
        diag[:-1] += curv + pot
        diag[1:] += curv + pot
        return diag, pot - curv


def _nodal_cells(p: Profile, W: Potential, a: Weight, kinetic: np.ndarray) -> np.ndarray:
    if not p.is_uniform():
        raise UnsupportedGridError("nodal quadrature needs a uniform grid")
    bin_width = p.span / p.t.size
    nodal = np.asarray(a.eval(p.t), dtype=float) * np.asarray(W.eval(p.u), dtype=float) * bin_width
    potential = nodal[:-1].copy()
    # the last node's bin is folded into the last cell
    potential[-1] += nodal[-1]
    return np.column_stack([kinetic, potential])


def action(
    p: Profile,
    W: Potential,
    a: Weight | None = None,
    *,
    quadrature: Quadrature = "midpoint",
) -> ActionBreakdown:
    """Discrete action sum of g(s_i) Δt_i + a(t_mid) W(u_mid) Δt_i.

    Args:
        p: Profile with |s_i| <= 1.
        W: Potential.
        a: Weight, constant 1 when omitted.
        quadrature: "midpoint" (default) or "nodal". Nodal gives every node
            of a uniform grid the same measure, so the potential sum depends
            only on the multiset of values when a is constant.

    Raises:
        ProfileError: If a slope exceeds 1 (the message names the cell).
        UnsupportedGridError: For nodal quadrature on a non-uniform grid.
    """
    p.check_slopes()
    functional = DiscreteAction(p.t, W, a)
    if quadrature == "midpoint":
        return functional.breakdown(p.u)
    per_cell = _nodal_cells(p, W, functional.weight, functional.cells(p.u)[:, 0])
    kinetic = float(np.sum(per_cell[:, 0]))
    potential = float(np.sum(per_cell[:, 1]))
    return ActionBreakdown(kinetic, potential, kinetic + potential, per_cell)


def regularized_action(
    p: Profile,
    W: Potential,
    k: RegularizedKernel,
    a: Weight | None = None,
) -> ActionBreakdown:
    """Action with the kinetic density Ψₙ in place of g."""
    p.check_slopes()
    return DiscreteAction(p.t, W, a, kernel=k).breakdown(p.u)


def action_gradient(
    p: Profile,
    W: Potential,
    a: Weight | None = None,
    kernel: RegularizedKernel | None = None,
) -> np.ndarray:
    """Gradient of the discrete action with respect to the interior node values."""
    return DiscreteAction(p.t, W, a, kernel=kernel).gradient(p.u)[1:-1]


# ---------------------------------------------------------------------------
# Residuals
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ResidualReport:
    """Per-node residuals at the interior nodes.

    Attributes:
        t: Interior node times t_1..t_{N-1}.
        values: Residual per interior node.
        max_abs: Largest |residual| (0 for profiles without interior nodes).
    """

    t: np.ndarray
    values: np.ndarray
    max_abs: float


def _report(t: np.ndarray, values: np.ndarray) -> ResidualReport:
    return ResidualReport(t=t, values=values, max_abs=float(np.max(np.abs(values))) if values.size else 0.0)


def _strict_slopes(p: Profile) -> np.ndarray:
    s = p.slopes
    if np.any(np.abs(s) >= 1.0):
        cell = int(np.argmax(np.abs(s) >= 1.0))
        raise KernelSingularityError(f"slope {float(s[cell])!r} on cell {cell} reaches the light cone")
    return s


def centered_slopes(p: Profile) -> np.ndarray:
    """Average of the two adjacent cell slopes at each interior node."""
    s = p.slopes
    return 0.5 * (s[:-1] + s[1:])


def conservation_residual(p: Profile, W: Potential) -> ResidualReport:
    """1 - 1/sqrt(1 - s̄²) + W(u) at the interior nodes.

    Raises:
        KernelSingularityError: If some cell has |s| >= 1.
    """
    _strict_slopes(p)
    sbar = centered_slopes(p)
    u = p.u[1:-1]
    values = 1.0 - 1.0 / np.sqrt(1.0 - sbar**2) + np.asarray(W.eval(u), dtype=float)
    return _report(p.t[1:-1], values)


def el_residual(
    p: Profile,
    W: Potential,
    a: Weight | None = None,
    kernel: RegularizedKernel | None = None,
) -> ResidualReport:
    """Discrete Euler-Lagrange residual (p_{i+1/2} - p_{i-1/2})/Δt_i - a(t_i) W'(u_i).

    The flux is g'(s), or ψₙ(s) when a regularized kernel is given.

    Raises:
        KernelSingularityError: If some cell has |s| >= 1 and no kernel is given.
    """
    if kernel is None:
        flux = np.asarray(g_prime(_strict_slopes(p)), dtype=float)
    else:
        flux = np.asarray(psi_n_deriv(kernel, p.slopes), dtype=float)
    weight = a or unit_weight()
    h = p.dt
    dual = 0.5 * (h[:-1] + h[1:])
    t = p.t[1:-1]
    forcing = np.asarray(weight.eval(t), dtype=float) * np.asarray(W.deriv(p.u[1:-1]), dtype=float)
    return _report(t, (flux[1:] - flux[:-1]) / dual - forcing)


# ---------------------------------------------------------------------------
# Bounds
# ---------------------------------------------------------------------------


def _slope_from_energy(level: float) -> float:
    # sqrt(1 - 1/(1+m)²) written without cancellation
    return math.sqrt(level * (2.0 + level)) / (1.0 + level)


def derivative_bound(W: Potential) -> float:
    """Slope bound sqrt(1 - 1/(1 + max W)²) for autonomous minimizers."""
    return _slope_from_energy(max_W(W))


def nonautonomous_derivative_bound(
    W: Potential,
    a_sup: float,
    lipschitz_ratio: float,
    action_value: float,
) -> float:
    """Slope bound for Lipschitz weights with |a'| <= C a.

    Returns sqrt(1 - 1/(1 + a_sup max W + C L)²), L being the minimizer's action.

    Raises:
        ParameterError: If any argument is negative.
    """
    if a_sup < 0.0 or lipschitz_ratio < 0.0 or action_value < 0.0:
        raise ParameterError(
            f"bound needs nonnegative inputs, got a_sup={a_sup}, C={lipschitz_ratio}, "
            f"action={action_value}"
        )
    return _slope_from_energy(a_sup * max_W(W) + lipschitz_ratio * action_value)


def crossing_lower_bound(eps: float, a1: float, beta: float) -> float:
    """Action needed to cross the band from 1-ε to 1-ε/2: ε sqrt(a1 β) / √2.

    Raises:
        ParameterError: If any argument is not positive.
    """
    if not (eps > 0.0 and a1 > 0.0 and beta > 0.0):
        raise ParameterError(f"crossing bound needs positive inputs, got eps={eps}, a1={a1}, beta={beta}")
    return eps * math.sqrt(a1 * beta) / math.sqrt(2.0)


@dataclass(frozen=True)
class CrossingBand:
    """First passage of a profile through the band [1-ε, 1-ε/2].

    Attributes:
        eps: Band parameter.
        t1: First time with u = 1 - ε.
        t2: First later time with u = 1 - ε/2.
        a1: Sampled infimum of a on [t1, t2].
        beta: beta_eps(W, ε).
        local_action: Action of the profile restricted to [t1, t2].
        bound: crossing_lower_bound(ε, a1, β), None when a1 <= 0.
    """

    eps: float
    t1: float
    t2: float
    a1: float
    beta: float
    local_action: float
    bound: float | None


def _first_crossing(p: Profile, level: float, start: int = 0) -> tuple[float, int] | None:
    hits = np.nonzero(p.u[start:] >= level)[0]
    if hits.size == 0:
        return None
    j = start + int(hits[0])
    if j == 0 or p.u[j] == level:
        return float(p.t[j]), j
    u0, u1 = p.u[j - 1], p.u[j]
    frac = (level - u0) / (u1 - u0)
    return float(p.t[j - 1] + frac * (p.t[j] - p.t[j - 1])), j


def crossing_band(p: Profile, W: Potential, a: Weight | None, eps: float) -> CrossingBand | None:
    """Locate the ε-band crossing and evaluate the local action there.

    Returns None when the profile never reaches 1 - ε/2.
    """
    if not 0.0 < eps < 1.0:
        raise ParameterError(f"eps must lie in (0, 1), got {eps}")
    weight = a or unit_weight()
    first = _first_crossing(p, 1.0 - eps)
    if first is None:
        return None
    t1, j1 = first
    second = _first_crossing(p, 1.0 - eps / 2.0, max(j1 - 1, 0))
    if second is None:
        return None
    t2, _ = second

    per_cell = action(p, W, weight).per_cell.sum(axis=1)
    lo, hi = p.t[:-1], p.t[1:]
    overlap = np.clip(np.minimum(hi, t2) - np.maximum(lo, t1), 0.0, None) / (hi - lo)
    local = float(np.sum(per_cell * overlap))

    a1 = infimum_on(weight, t1, t2)
    beta = beta_eps(W, eps)
    bound = crossing_lower_bound(eps, a1, beta) if a1 > 0.0 and beta > 0.0 else None
    return CrossingBand(eps=eps, t1=t1, t2=t2, a1=a1, beta=beta, local_action=local, bound=bound)


# ---------------------------------------------------------------------------
# Strip functional
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StripGrid:
    """Values u(x_i, y_j) on a truncated strip [-L, L] x [0, 1].

    Attributes:
        x: Strictly increasing axial nodes.
        y: Strictly increasing transversal nodes (a single node is a zero-width strip).
        u: Array of shape (len(x), len(y)).
    """

    x: np.ndarray
    y: np.ndarray
    u: np.ndarray

    def __post_init__(self) -> None:
        x = np.asarray(self.x, dtype=float)
        y = np.asarray(self.y, dtype=float)
        u = np.asarray(self.u, dtype=float)
        if u.shape != (x.size, y.size):
            raise ProfileError(f"u must have shape {(x.size, y.size)}, got {u.shape}")
        if x.size < 2 or not np.all(np.diff(x) > 0.0) or not np.all(np.diff(y) > 0.0):
            raise ProfileError("strip nodes must be strictly increasing")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "u", u)

    @property
    def width(self) -> float:
        # a single transversal node stands for a strip of unit measure
        return float(self.y[-1] - self.y[0]) if self.y.size > 1 else 1.0

    def slice(self, j: int) -> Profile:
        return Profile(self.x, self.u[:, j])


def _strip_cells(gr: StripGrid, W: Potential, a: Weight) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    u00, u10 = gr.u[:-1, :-1], gr.u[1:, :-1]
    u01, u11 = gr.u[:-1, 1:], gr.u[1:, 1:]
    hx = np.diff(gr.x)[:, None]
    hy = np.diff(gr.y)[None, :]
    dx = ((u10 - u00) + (u11 - u01)) / (2.0 * hx)
    dy = ((u01 - u00) + (u11 - u10)) / (2.0 * hy)
    grad = np.sqrt(dx**2 + dy**2)
    over = grad > 1.0 + _SLOPE_TOL
    if np.any(over):
        i, j = np.unravel_index(int(np.argmax(over)), over.shape)
        raise ProfileError(f"gradient norm {float(grad[i, j])!r} exceeds 1 on cell ({i}, {j})")
    center = 0.5 * (0.5 * (u00 + u01) + 0.5 * (u10 + u11))
    area = hx * hy
    a_mid = np.asarray(a.eval(0.5 * (gr.x[:-1] + gr.x[1:])), dtype=float)[:, None]
    potential = a_mid * np.asarray(W.eval(center), dtype=float) * area
    full = np.asarray(g(grad), dtype=float) * area + potential
    x_only = np.asarray(g(np.abs(dx)), dtype=float) * area + potential
    return full, x_only, dy


def action_2d(gr: StripGrid, W: Potential, a: Weight | None = None) -> float:
    """Strip action: cellwise g(|∇u|) + a(x) W(u) over [-L, L] x [0, 1].

    Raises:
        ProfileError: If the discrete gradient norm exceeds 1 on a cell.
    """
    weight = a or unit_weight()
    if gr.y.size == 1:
        return action(gr.slice(0), W, weight).total
    full, _, _ = _strip_cells(gr, W, weight)
    return float(np.sum(full))


@dataclass(frozen=True)
class SliceReport:
    """Comparison of the strip action with its one-dimensional slices.

    Attributes:
        total_2d: action_2d of the grid.
        x_only_total: Same discretization with the ∂_y part dropped.
        slice_totals: 1D action of each y-slice.
        width: Strip width.
        min_slice_total: Smallest slice action.
        margin: total_2d - width * min_slice_total.
        above_slice_mean: total_2d >= width * mean(slice_totals) within tolerance.
        strict: total_2d > x_only_total, expected whenever ∂_y u is nonzero somewhere.
        passed: Fubini inequality holds, strictly when ∂_y u does not vanish, and
            the strip action is at least width times the mean slice action.
    """

    total_2d: float
    x_only_total: float
    slice_totals: tuple[float, ...]
    width: float
    min_slice_total: float
    margin: float
    above_slice_mean: bool
    strict: bool
    passed: bool


def slice_compare(gr: StripGrid, W: Potential, a: Weight | None = None, tol: float = 1e-10) -> SliceReport:
    """Compare the strip action with width times the slice actions.

    Args:
        gr: Strip values.
        W: Potential.
        a: Weight along x; constant 1 when omitted.
        tol: Absolute slack in every inequality.

    Returns:
        SliceReport. passed needs the Fubini inequality against the
        x-only action, strictness when ∂_y u is nonzero somewhere, and the
        strip action at or above width times the mean slice action.

    Raises:
        ProfileError: If the discrete gradient norm exceeds 1 on a cell.
    """
    weight = a or unit_weight()
    slices = tuple(action(gr.slice(j), W, weight).total for j in range(gr.y.size))
    width = gr.width
    if gr.y.size == 1:
        total = x_only = slices[0]
        varies = False
    else:
        full, x_part, dy = _strip_cells(gr, W, weight)
        total, x_only = float(np.sum(full)), float(np.sum(x_part))
        varies = bool(np.any(dy != 0.0))
    min_slice = min(slices)
    mean_slice = float(np.mean(slices))
    strict = total > x_only + tol
    fubini = total >= x_only - tol
    above_mean = total >= width * mean_slice - tol
    report = SliceReport(
        total_2d=total,
        x_only_total=x_only,
        slice_totals=slices,
        width=width,
        min_slice_total=min_slice,
        margin=total - width * min_slice,
        above_slice_mean=above_mean,
        strict=strict,
        passed=fubini and above_mean and (strict or not varies),
    )
    logger.info("Strip action %.10g vs width*min slice %.10g (margin %.3g)", total, width * min_slice, report.margin)
    return report
