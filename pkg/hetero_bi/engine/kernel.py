"""Relativistic Lagrangian density and its C² regularizations.

The kinetic density is g(s) = 1 - sqrt(1 - s²) on |s| <= 1. Its flux
g'(s) = s / sqrt(1 - s²) blows up at the light cone, so the regularized
family Ψₙ replaces g beyond s² = 1 - 1/n² by a quadratic in s² that
matches g to second order at the junction.

All functions accept scalars or numpy arrays and return the same shape.
"""

from __future__ import annotations

import operator
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from numpy.typing import ArrayLike

from hetero_bi.engine.errors import KernelDomainError, KernelSingularityError, ParameterError

FloatOrArray = float | np.ndarray

# Slopes this close above 1 are rounding noise from secant slopes.
_SLOPE_TOL = 1e-12


def _shaped(values: np.ndarray, like: ArrayLike) -> FloatOrArray:
    if np.ndim(like) == 0:
        return float(values)
    return values


def g(s: ArrayLike) -> FloatOrArray:
    """Kinetic density 1 - sqrt(1 - s²).

    Computed as s² / (1 + sqrt(1 - s²)) to avoid cancellation at small slopes.

    Raises:
        KernelDomainError: If any |s| > 1.
    """
    arr = np.asarray(s, dtype=float)
    mag = np.abs(arr)
    if np.any(mag > 1.0 + _SLOPE_TOL) or not np.all(np.isfinite(arr)):
        bad = arr.flat[int(np.argmax(~(mag <= 1.0 + _SLOPE_TOL)))]
        raise KernelDomainError(f"slope {bad!r} outside [-1, 1]")
    sq = np.minimum(mag, 1.0) ** 2
    return _shaped(sq / (1.0 + np.sqrt(1.0 - sq)), s)


def g_prime(s: ArrayLike) -> FloatOrArray:
    """Flux p = s / sqrt(1 - s²).

    Raises:
        KernelSingularityError: If any |s| >= 1.
    """
    arr = np.asarray(s, dtype=float)
    if np.any(np.abs(arr) >= 1.0) or not np.all(np.isfinite(arr)):
        bad = arr.flat[int(np.argmax(~(np.abs(arr) < 1.0)))]
        raise KernelSingularityError(f"flux is singular at slope {bad!r}")
    return _shaped(arr / np.sqrt(1.0 - arr**2), s)


def g_second(s: ArrayLike) -> FloatOrArray:
    """Curvature (1 - s²)^(-3/2) of the kinetic density."""
    arr = np.asarray(s, dtype=float)
    if np.any(np.abs(arr) >= 1.0):
        bad = arr.flat[int(np.argmax(np.abs(arr) >= 1.0))]
        raise KernelSingularityError(f"curvature is singular at slope {bad!r}")
    return _shaped((1.0 - arr**2) ** -1.5, s)


@dataclass(frozen=True)
class RegularizedKernel:
    """Coefficients of Ψₙ and of its Legendre-side composition Υₙ∘ψₙ.

    Attributes:
        n: Regularization index (n >= 2).
        a_n: Value of g at the junction, 1 - 1/n.
        b_n: First coefficient n/2 of the outer quadratic in x = t² - junction.
        c_n: Second coefficient n³/8 of the outer quadratic.
        atil_n: Constant term n - 1 of Υₙ∘ψₙ on the outer branch.
        btil_n: Linear coefficient b_n - 2 c_n (1 - 1/n²).
        ctil_n: Quartic coefficient 3 c_n.
        junction: Branch point t² = 1 - 1/n².
    """

    n: int
    a_n: float
    b_n: float
    c_n: float
    atil_n: float
    btil_n: float
    ctil_n: float
    junction: float


class BranchJet(NamedTuple):
    """Value and first two derivatives of one branch at the junction."""

    value: float
    first: float
    second: float


def make_regularized(n: int) -> RegularizedKernel:
    """Build the regularized kernel of index n.

    Raises:
        ParameterError: If n is not an integer >= 2.
    """
    try:
        n = operator.index(n)
    except TypeError as exc:
        raise ParameterError(f"regularization index must be an integer, got {n!r}") from exc
    if n < 2:
        raise ParameterError(f"regularization index must be >= 2, got {n}")

    a_n = 1.0 - 1.0 / n
    b_n = n / 2.0
    c_n = n**3 / 8.0
    junction = 1.0 - 1.0 / n**2
    return RegularizedKernel(
        n=n,
        a_n=a_n,
        b_n=b_n,
        c_n=c_n,
        atil_n=float(n - 1),
        btil_n=b_n - 2.0 * c_n * junction,
        ctil_n=3.0 * c_n,
        junction=junction,
    )


def _split(k: RegularizedKernel, t: ArrayLike) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    arr = np.asarray(t, dtype=float)
    tau = arr**2
    inner = tau <= k.junction
    # inner-branch arithmetic only ever sees tau <= junction < 1
    safe_tau = np.where(inner, tau, 0.0)
    return arr, tau, inner, safe_tau


def psi_n_eval(k: RegularizedKernel, t: ArrayLike) -> FloatOrArray:
    """Ψₙ(t): g on the inner branch, a_n + b_n x + c_n x² beyond it."""
    _, tau, inner, safe_tau = _split(k, t)
    x = tau - k.junction
    inner_val = safe_tau / (1.0 + np.sqrt(1.0 - safe_tau))
    outer_val = k.a_n + k.b_n * x + k.c_n * x**2
    return _shaped(np.where(inner, inner_val, outer_val), t)


def psi_n_deriv(k: RegularizedKernel, t: ArrayLike) -> FloatOrArray:
    """ψₙ = Ψₙ'(t)."""
    arr, tau, inner, safe_tau = _split(k, t)
    x = tau - k.junction
    inner_val = np.where(inner, arr, 0.0) / np.sqrt(1.0 - safe_tau)
    outer_val = 2.0 * arr * (k.b_n + 2.0 * k.c_n * x)
    return _shaped(np.where(inner, inner_val, outer_val), t)


def psi_n_second(k: RegularizedKernel, t: ArrayLike) -> FloatOrArray:
    """Ψₙ''(t)."""
    _, tau, inner, safe_tau = _split(k, t)
    x = tau - k.junction
    inner_val = (1.0 - safe_tau) ** -1.5
    outer_val = 2.0 * (k.b_n + 2.0 * k.c_n * x) + 8.0 * k.c_n * tau
    return _shaped(np.where(inner, inner_val, outer_val), t)


def upsilon_psi(k: RegularizedKernel, t: ArrayLike) -> FloatOrArray:
    """Υₙ(ψₙ(t)) = t ψₙ(t) - Ψₙ(t), in closed form on each branch."""
    _, tau, inner, safe_tau = _split(k, t)
    x = tau - k.junction
    inner_val = 1.0 / np.sqrt(1.0 - safe_tau) - 1.0
    outer_val = k.atil_n + k.btil_n * x + k.ctil_n * (tau**2 - k.junction**2)
    return _shaped(np.where(inner, inner_val, outer_val), t)


def branch_jets(k: RegularizedKernel) -> tuple[BranchJet, BranchJet]:
    """Closed-form jets of the inner and outer branch at t = sqrt(junction)."""
    t_j = float(np.sqrt(k.junction))
    gap = 1.0 - k.junction
    inner = BranchJet(
        value=1.0 - float(np.sqrt(gap)),
        first=t_j / float(np.sqrt(gap)),
        second=gap**-1.5,
    )
    outer = BranchJet(
        value=k.a_n,
        first=2.0 * t_j * k.b_n,
        second=2.0 * k.b_n + 8.0 * k.c_n * k.junction,
    )
    return inner, outer
