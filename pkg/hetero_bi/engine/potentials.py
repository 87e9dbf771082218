"""Double-well potentials W with wells at ±1.

A Potential bundles W, W' and the hypothesis flags the solvers rely on:

    has_W2       W(±1) = 0 and W > 0 elsewhere on its evaluable domain
    has_W2prime  W vanishes identically outside (-1, 1)
    has_W3       W is even

Flags are declared by the constructors and checked by validate_potential
on dense sample grids.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike
from scipy.optimize import minimize_scalar

from hetero_bi.engine.errors import ParameterError, PotentialError
from hetero_bi.engine.expressions import compile_expression

logger = logging.getLogger(__name__)

Fn = Callable[[ArrayLike], "float | np.ndarray"]

# Scan resolution for max/min searches before bounded refinement.
_SCAN_STEP = 1e-4

# Step for the finite-difference curvature used by Newton iterations.
_CURVATURE_STEP = 1e-6

_ZERO_TOL = 1e-12


@dataclass(frozen=True)
class Potential:
    """A double-well potential.

    Attributes:
        name: Identifier used in configs and reports.
        eval: W, vectorized.
        deriv: W', vectorized.
        has_W2: Zeros exactly at ±1, positive elsewhere on the domain.
        has_W2prime: Identically zero outside (-1, 1).
        has_W3: Even.
        domain: Half-width of the interval where the formula is defined, None for all of R.
        curv: Optional exact W''; finite differences of W' are used otherwise.
    """

    name: str
    eval: Fn
    deriv: Fn
    has_W2: bool
    has_W2prime: bool = False
    has_W3: bool = False
    domain: float | None = None
    curv: Fn | None = None


def _shaped(values: np.ndarray, like: ArrayLike) -> float | np.ndarray:
    return float(values) if np.ndim(like) == 0 else values


# ---------------------------------------------------------------------------
# Built-ins
# ---------------------------------------------------------------------------


def allen_cahn() -> Potential:
    """W(s) = (s² - 1)² / 4."""

    def w(s: ArrayLike) -> float | np.ndarray:
        arr = np.asarray(s, dtype=float)
        return _shaped(0.25 * (arr**2 - 1.0) ** 2, s)

    def dw(s: ArrayLike) -> float | np.ndarray:
        arr = np.asarray(s, dtype=float)
        return _shaped(arr * (arr**2 - 1.0), s)

    def d2w(s: ArrayLike) -> float | np.ndarray:
        arr = np.asarray(s, dtype=float)
        return _shaped(3.0 * arr**2 - 1.0, s)

    return Potential(
        name="allen_cahn", eval=w, deriv=dw, has_W2=True, has_W3=True, curv=d2w
    )


_EXACT_DOMAIN = math.sqrt(1.0 + math.sqrt(2.0))


def exact_example() -> Potential:
    """W(u) = -1 + sqrt(2 / (2 - (1 - u²)²)), whose heteroclinic is tanh(t/√2).

    The radicand vanishes at |u| = sqrt(1 + √2); evaluation at or beyond
    that point raises PotentialError.
    """

    def _radicand(s: ArrayLike) -> tuple[np.ndarray, np.ndarray]:
        arr = np.asarray(s, dtype=float)
        q = (1.0 - arr**2) ** 2
        denom = 2.0 - q
        if np.any(denom <= 0.0):
            bad = arr.flat[int(np.argmax(denom <= 0.0))]
            raise PotentialError(f"exact_example is undefined at u={bad!r}")
        return q, denom

    def w(s: ArrayLike) -> float | np.ndarray:
        q, denom = _radicand(s)
        # sqrt(2/D) - 1 rewritten without cancellation near the wells
        return _shaped(q / (denom * (1.0 + np.sqrt(2.0 / denom))), s)

    def dw(s: ArrayLike) -> float | np.ndarray:
        _, denom = _radicand(s)
        arr = np.asarray(s, dtype=float)
        return _shaped(-2.0 * math.sqrt(2.0) * arr * (1.0 - arr**2) * denom**-1.5, s)

    return Potential(
        name="exact_example",
        eval=w,
        deriv=dw,
        has_W2=True,
        has_W3=True,
        domain=_EXACT_DOMAIN,
    )


def _truncate(p: Potential, name: str) -> Potential:
    def w(s: ArrayLike) -> float | np.ndarray:
        arr = np.asarray(s, dtype=float)
        inside = np.abs(arr) < 1.0
        vals = np.asarray(p.eval(np.clip(arr, -1.0, 1.0)), dtype=float)
        return _shaped(np.where(inside, vals, 0.0), s)

    def dw(s: ArrayLike) -> float | np.ndarray:
        arr = np.asarray(s, dtype=float)
        inside = np.abs(arr) < 1.0
        vals = np.asarray(p.deriv(np.clip(arr, -1.0, 1.0)), dtype=float)
        return _shaped(np.where(inside, vals, 0.0), s)

    curv = None
    if p.curv is not None:
        inner_curv = p.curv

        def curv(s: ArrayLike) -> float | np.ndarray:
            arr = np.asarray(s, dtype=float)
            inside = np.abs(arr) < 1.0
            vals = np.asarray(inner_curv(np.clip(arr, -1.0, 1.0)), dtype=float)
            return _shaped(np.where(inside, vals, 0.0), s)

    return Potential(
        name=name,
        eval=w,
        deriv=dw,
        has_W2=False,
        has_W2prime=True,
        has_W3=p.has_W3,
        domain=None,
        curv=curv,
    )


def compact_truncate(p: Potential) -> Potential:
    """Set W and W' to zero outside (-1, 1).

    Raises:
        PotentialError: If p does not carry (W2).
    """
    if not p.has_W2:
        raise PotentialError(f"compact_truncate needs a (W2) potential, {p.name} is not")
    return _truncate(p, f"{p.name}_truncated")


def expression_potential(text: str, *, truncate: bool = False, name: str | None = None) -> Potential:
    """Build a potential from a config expression in the variable s.

    Flags are inferred by sampling. With truncate=True the result is the
    compact truncation, which only needs positivity inside (-1, 1).

    Raises:
        ExpressionError: If the text is outside the grammar.
        PotentialError: If W(±1) != 0 or W is not positive on (-1, 1).
    """
    compiled = compile_expression(text, "s")
    label = name or f"expr[{text}]"
    ends = np.asarray(compiled.value(np.array([-1.0, 1.0])), dtype=float)
    if not np.all(np.abs(ends) <= _ZERO_TOL):
        raise PotentialError(f"{label}: W(-1), W(1) = {ends.tolist()}, both must vanish")

    inside = np.linspace(-1.0, 1.0, 10_002)[1:-1]
    if not np.all(np.asarray(compiled.value(inside)) > 0.0):
        raise PotentialError(f"{label}: W must be positive on (-1, 1)")

    outside = np.concatenate([np.linspace(-2.0, -1.0, 2_001)[:-1], np.linspace(1.0, 2.0, 2_001)[1:]])
    with np.errstate(all="ignore"):
        out_vals = np.asarray(compiled.value(outside), dtype=float)
        mirror = np.asarray(compiled.value(-inside), dtype=float)
    has_w2 = bool(np.all(np.isfinite(out_vals)) and np.all(out_vals > 0.0))
    has_w3 = bool(np.allclose(mirror, compiled.value(inside), rtol=1e-12, atol=_ZERO_TOL))

    base = Potential(
        name=label,
        eval=compiled.value,
        deriv=compiled.derivative,
        has_W2=has_w2,
        has_W3=has_w3,
        curv=compiled.second,
    )
    logger.debug("Expression potential %s: W2=%s W3=%s", label, has_w2, has_w3)
    if truncate:
        return _truncate(base, f"{label}_truncated")
    return base


# ---------------------------------------------------------------------------
# Derived quantities
# ---------------------------------------------------------------------------


def second_derivative(p: Potential, s: ArrayLike) -> float | np.ndarray:
    """W''(s): exact when the potential carries it, central differences of W' otherwise."""
    if p.curv is not None:
        return p.curv(s)
    arr = np.asarray(s, dtype=float)
    h = _CURVATURE_STEP
    fd = (np.asarray(p.deriv(arr + h)) - np.asarray(p.deriv(arr - h))) / (2.0 * h)
    return _shaped(fd, s)


def _refine(fn: Callable[[float], float], grid: np.ndarray, idx: int) -> float:
    lo = grid[max(idx - 1, 0)]
    hi = grid[min(idx + 1, grid.size - 1)]
    if hi <= lo:
        return fn(float(grid[idx]))
    res = minimize_scalar(fn, bounds=(float(lo), float(hi)), method="bounded", options={"xatol": 1e-12})
    return float(res.fun)


def _band_min(p: Potential, lo: float, hi: float) -> float:
    count = max(3, int(math.ceil((hi - lo) / _SCAN_STEP)) + 1)
    grid = np.linspace(lo, hi, count)
    values = np.asarray(p.eval(grid), dtype=float)
    idx = int(np.argmin(values))
    refined = _refine(lambda x: float(p.eval(x)), grid, idx)
    return min(float(values[idx]), refined)


def max_W(p: Potential) -> float:
    """Maximum of W over [-1, 1]: grid scan at 1e-4 then bounded refinement."""
    grid = np.linspace(-1.0, 1.0, int(round(2.0 / _SCAN_STEP)) + 1)
    values = np.asarray(p.eval(grid), dtype=float)
    idx = int(np.argmax(values))
    refined = -_refine(lambda x: -float(p.eval(x)), grid, idx)
    return max(float(values[idx]), refined)


def beta_eps(p: Potential, eps: float) -> float:
    """Minimum of W over the bands 1-ε <= |s| <= 1-ε/2 on both wells.

    Raises:
        ParameterError: If ε is not in (0, 1).
    """
    if not 0.0 < eps < 1.0:
        raise ParameterError(f"eps must lie in (0, 1), got {eps}")
    right = _band_min(p, 1.0 - eps, 1.0 - eps / 2.0)
    left = _band_min(p, -1.0 + eps / 2.0, -1.0 + eps)
    return min(right, left)


def validate_potential(p: Potential, samples: int = 10_000, span: float = 2.0) -> list[str]:
    """Check the declared flags of p on dense sample grids.

    Args:
        p: Potential to check.
        samples: Points per sampled interval.
        span: Half-width of the window used for checks outside [-1, 1].

    Returns:
        Human-readable violations; empty when every declared property holds.
    """
    violations: list[str] = []
    ends = np.asarray(p.eval(np.array([-1.0, 1.0])), dtype=float)
    if not np.all(np.abs(ends) <= _ZERO_TOL):
        violations.append(f"W(-1), W(1) = {ends.tolist()}, expected zeros")

    inside = np.linspace(-1.0, 1.0, samples + 2)[1:-1]
    w_in = np.asarray(p.eval(inside), dtype=float)
    if not np.all(w_in > 0.0):
        violations.append(f"W not positive at s={float(inside[np.argmin(w_in)])!r}")

    reach = span if p.domain is None else min(span, p.domain - 1e-3)
    if reach > 1.0:
        right = np.linspace(1.0, reach, samples // 2 + 1)[1:]
        outside = np.concatenate([-right[::-1], right])
        w_out = np.asarray(p.eval(outside), dtype=float)
        if p.has_W2 and not np.all(w_out > 0.0):
            violations.append(f"(W2): W not positive at s={float(outside[np.argmin(w_out)])!r}")
        if p.has_W2prime and not np.all(w_out == 0.0):
            violations.append("(W2'): W nonzero outside (-1, 1)")

    if p.has_W3:
        mirrored = np.asarray(p.eval(-inside), dtype=float)
        if not np.allclose(w_in, mirrored, rtol=1e-12, atol=_ZERO_TOL):
            violations.append("(W3): W(s) != W(-s)")

    h = 1e-6
    grid = np.linspace(-min(reach, 1.5), min(reach, 1.5), samples)
    if p.has_W2prime:
        grid = grid[np.abs(np.abs(grid) - 1.0) > 1e-3]
    deriv = np.asarray(p.deriv(grid), dtype=float)
    fd = (np.asarray(p.eval(grid + h)) - np.asarray(p.eval(grid - h))) / (2.0 * h)
    err = np.abs(fd - deriv)
    if not np.all(err <= 1e-6 * np.maximum(np.abs(deriv), 1e-2)):
        worst = int(np.argmax(err / np.maximum(np.abs(deriv), 1e-2)))
        violations.append(f"W' disagrees with finite differences at s={float(grid[worst])!r}")

    for v in violations:
        logger.warning("Potential %s: %s", p.name, v)
    return violations


def scale_potential(p: Potential, factor: float) -> Potential:
    """c W, the potential seen by an autonomous problem with constant weight c.

    Raises:
        PotentialError: If factor <= 0.
    """
    if not factor > 0.0:
        raise PotentialError(f"scale factor must be positive, got {factor}")
    if factor == 1.0:
        return p
    curv = None
    if p.curv is not None:
        inner_curv = p.curv

        def curv(s: ArrayLike) -> float | np.ndarray:
            return factor * inner_curv(s)

    return Potential(
        name=f"{factor:g}*{p.name}",
        eval=lambda s: factor * p.eval(s),
        deriv=lambda s: factor * p.deriv(s),
        has_W2=p.has_W2,
        has_W2prime=p.has_W2prime,
        has_W3=p.has_W3,
        domain=p.domain,
        curv=curv,
    )
