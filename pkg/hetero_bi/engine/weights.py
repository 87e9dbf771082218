"""Time-dependent weights a(t) and their hypothesis checks.

Hypotheses on a weight, as flags on Weight:

    bounded               (a1)  0 < lower <= a(t) <= upper
    locally_bounded       (a1') a is bounded on compact windows
    monotone              (a2)  a(s) <= a(t) for 0 <= s <= t
    even                  (a3)  a(t) = a(-t)
    eventually_positive   (a4)  a(t) > 0 for t > positivity_threshold

A weight may also carry a period and a dominating weight b with a <= b
and b - a -> 0 at infinity (the structural condition checked by check_b1).
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike

from hetero_bi.engine.errors import WeightError
from hetero_bi.engine.expressions import compile_expression

logger = logging.getLogger(__name__)

Fn = Callable[[ArrayLike], "float | np.ndarray"]

_DEFAULT_SAMPLES = 10_000
_DEFAULT_HORIZON = 100.0
_SAMPLE_TOL = 1e-12


@dataclass(frozen=True)
class Weight:
    """A weight function with declared hypotheses.

    Attributes:
        name: Identifier used in reports.
        eval: a(t), vectorized.
        lower: Lower bound a1 when (a1) holds (or the infimum where known).
        upper: Upper bound a2, None when unbounded.
        period: Period T when a is periodic.
        positivity_threshold: T with a(t) > 0 for t > T.
        bounded: Flag (a1).
        locally_bounded: Flag (a1').
        monotone: Flag (a2).
        even: Flag (a3).
        eventually_positive: Flag (a4).
        constant_value: Set when a is constant (the autonomous case).
        dominating: Weight b for the structural condition a <= b.
        lipschitz_ratio: C with |a'| <= C a, when known.
    """

    name: str
    eval: Fn
    lower: float | None = None
    upper: float | None = None
    period: float | None = None
    positivity_threshold: float | None = None
    bounded: bool = False
    locally_bounded: bool = True
    monotone: bool = False
    even: bool = False
    eventually_positive: bool = False
    constant_value: float | None = None
    dominating: Weight | None = None
    lipschitz_ratio: float | None = None

    @property
    def is_constant(self) -> bool:
        return self.constant_value is not None

    def flags(self) -> dict[str, bool]:
        """Declared hypothesis flags keyed by their short labels."""
        return {
            "a1": self.bounded,
            "a1'": self.locally_bounded,
            "a2": self.monotone,
            "a3": self.even,
            "a4": self.eventually_positive,
        }


def _shaped(values: np.ndarray, like: ArrayLike) -> float | np.ndarray:
    return float(values) if np.ndim(like) == 0 else values


# ---------------------------------------------------------------------------
# Families
# ---------------------------------------------------------------------------


def constant(c: float) -> Weight:
    """a(t) = c.

    Raises:
        WeightError: If c <= 0.
    """
    if not c > 0.0:
        raise WeightError(f"constant weight must be positive for (a1), got {c}")
    value = float(c)

    def a(t: ArrayLike) -> float | np.ndarray:
        return _shaped(np.full(np.shape(t), value), t)

    return Weight(
        name=f"constant({value:g})",
        eval=a,
        lower=value,
        upper=value,
        positivity_threshold=0.0,
        bounded=True,
        monotone=True,
        even=True,
        eventually_positive=True,
        constant_value=value,
        lipschitz_ratio=0.0,
    )


def periodic_sin(mean: float, amp: float, period: float) -> Weight:
    """a(t) = mean + amp sin(2πt/T).

    Raises:
        WeightError: If T <= 0, amp < 0 or amp >= mean.
    """
    if not period > 0.0:
        raise WeightError(f"period must be positive, got {period}")
    if amp < 0.0 or not amp < mean:
        raise WeightError(f"(a1) needs 0 <= amp < mean, got amp={amp}, mean={mean}")
    omega = 2.0 * math.pi / period

    def a(t: ArrayLike) -> float | np.ndarray:
        arr = np.asarray(t, dtype=float)
        return _shaped(mean + amp * np.sin(omega * arr), t)

    flat = amp == 0.0
    return Weight(
        name=f"periodic_sin({mean:g},{amp:g},{period:g})",
        eval=a,
        lower=mean - amp,
        upper=mean + amp,
        period=float(period),
        positivity_threshold=0.0,
        bounded=True,
        monotone=flat,
        even=flat,
        eventually_positive=True,
        constant_value=float(mean) if flat else None,
        lipschitz_ratio=amp * omega / (mean - amp),
    )


def asymptotically_constant(limit: float, bump: float) -> Weight:
    """a(t) = limit - bump e^{-|t|}, dominated by the constant limit.

    Raises:
        WeightError: Unless 0 <= bump < limit.
    """
    if not 0.0 <= bump < limit:
        raise WeightError(f"(a1) needs 0 <= bump < limit, got bump={bump}, limit={limit}")

    def a(t: ArrayLike) -> float | np.ndarray:
        arr = np.asarray(t, dtype=float)
        return _shaped(limit - bump * np.exp(-np.abs(arr)), t)

    return Weight(
        name=f"asymptotically_constant({limit:g},{bump:g})",
        eval=a,
        lower=limit - bump,
        upper=float(limit),
        positivity_threshold=0.0,
        bounded=True,
        monotone=True,
        even=True,
        eventually_positive=True,
        constant_value=float(limit) if bump == 0.0 else None,
        dominating=constant(limit),
        lipschitz_ratio=bump / (limit - bump),
    )


def asymptotically_periodic(mean: float, amp: float, period: float, bump: float) -> Weight:
    """a(t) = mean + amp sin(2πt/T) - bump e^{-|t|}, dominated by the periodic profile.

    Raises:
        WeightError: If bump < 0 or mean - amp - bump <= 0, or the periodic part is invalid.
    """
    b = periodic_sin(mean, amp, period)
    if bump < 0.0:
        raise WeightError(f"bump must be nonnegative, got {bump}")
    lower = mean - amp - bump
    if not lower > 0.0:
        raise WeightError(f"(a1) needs mean - amp - bump > 0, got {lower}")
    omega = 2.0 * math.pi / period

    def a(t: ArrayLike) -> float | np.ndarray:
        arr = np.asarray(t, dtype=float)
        return _shaped(mean + amp * np.sin(omega * arr) - bump * np.exp(-np.abs(arr)), t)

    return Weight(
        name=f"asymptotically_periodic({mean:g},{amp:g},{period:g},{bump:g})",
        eval=a,
        lower=lower,
        upper=mean + amp,
        positivity_threshold=0.0,
        bounded=True,
        monotone=amp == 0.0,
        even=amp == 0.0,
        eventually_positive=True,
        dominating=b,
        lipschitz_ratio=(amp * omega + bump) / lower,
    )


def monotone_even(
    rate: float,
    power: float = 2.0,
    cap: float | None = None,
    offset: float = 0.0,
) -> Weight:
    """a(t) = min(rate |t|^power, cap) - offset.

    Uncapped, the weight only has (a1'); a cap above the offset keeps it
    evaluable on any window and, with a negative offset, bounded below.

    Raises:
        WeightError: If rate or power is not positive, or the cap leaves a never positive.
    """
    if not rate > 0.0 or not power > 0.0:
        raise WeightError(f"rate and power must be positive, got rate={rate}, power={power}")
    if cap is not None and not cap > offset:
        raise WeightError(f"cap {cap} must exceed offset {offset} for (a4)")

    def a(t: ArrayLike) -> float | np.ndarray:
        arr = np.asarray(t, dtype=float)
        grown = rate * np.abs(arr) ** power
        if cap is not None:
            grown = np.minimum(grown, cap)
        return _shaped(grown - offset, t)

    threshold = (offset / rate) ** (1.0 / power) if offset > 0.0 else 0.0
    lower = -float(offset)
    capped = cap is not None
    return Weight(
        name=f"monotone_even({rate:g},{power:g},{cap},{offset:g})",
        eval=a,
        lower=lower,
        upper=(cap - offset) if capped else None,
        positivity_threshold=threshold,
        bounded=capped and lower > 0.0,
        monotone=True,
        even=True,
        eventually_positive=True,
    )


def expression_weight(
    text: str,
    *,
    period: float | None = None,
    positivity_threshold: float | None = None,
    dominating: Weight | None = None,
    name: str | None = None,
) -> Weight:
    """Build a weight from a config expression in the variable t.

    Flags come from sampling on [-100, 100]. A declared period or
    positivity threshold must hold at the samples.

    Raises:
        ExpressionError: If the text is outside the grammar.
        WeightError: If the declared period or threshold does not hold.
    """
    compiled = compile_expression(text, "t")
    label = name or f"expr[{text}]"
    t = np.linspace(-_DEFAULT_HORIZON, _DEFAULT_HORIZON, _DEFAULT_SAMPLES + 1)
    with np.errstate(all="ignore"):
        vals = np.asarray(compiled.value(t), dtype=float)
    if not np.all(np.isfinite(vals)):
        raise WeightError(f"{label}: not finite on [-{_DEFAULT_HORIZON}, {_DEFAULT_HORIZON}]")

    if positivity_threshold is None:
        nonpositive = t[(t >= 0.0) & (vals <= 0.0)]
        positivity_threshold = float(nonpositive.max()) if nonpositive.size else 0.0

    lower, upper = float(vals.min()), float(vals.max())
    draft = Weight(
        name=label,
        eval=compiled.value,
        lower=lower,
        upper=upper,
        period=period,
        positivity_threshold=positivity_threshold,
        dominating=dominating,
        constant_value=lower if lower == upper else None,
    )
    sampled = sample_hypotheses(draft)
    if period is not None and not sampled["periodic"]:
        raise WeightError(f"{label}: not {period}-periodic at the samples")
    if not sampled["a4"]:
        raise WeightError(f"{label}: not positive beyond t={positivity_threshold}")

    weight = Weight(
        name=label,
        eval=compiled.value,
        lower=lower,
        upper=upper,
        period=period,
        positivity_threshold=positivity_threshold,
        bounded=sampled["a1"],
        locally_bounded=True,
        monotone=sampled["a2"],
        even=sampled["a3"],
        eventually_positive=True,
        constant_value=draft.constant_value,
        dominating=dominating,
    )
    logger.debug("Expression weight %s: flags %s", label, weight.flags())
    return weight


# ---------------------------------------------------------------------------
# Validators
# ---------------------------------------------------------------------------


def _tol(values: np.ndarray) -> np.ndarray:
    return _SAMPLE_TOL * np.maximum(1.0, np.abs(values))


def sample_hypotheses(
    a: Weight,
    samples: int = _DEFAULT_SAMPLES,
    horizon: float = _DEFAULT_HORIZON,
) -> dict[str, bool]:
    """Evaluate every hypothesis on a dense symmetric grid.

    Returns:
        Mapping with keys "a1", "a1'", "a2", "a3", "a4" and "periodic"
        ("periodic" is False when the weight declares no period).
    """
    t = np.linspace(-horizon, horizon, samples + 1)
    with np.errstate(all="ignore"):
        vals = np.asarray(a.eval(t), dtype=float)
    finite = bool(np.all(np.isfinite(vals)))
    if not finite:
        return {"a1": False, "a1'": False, "a2": False, "a3": False, "a4": False, "periodic": False}

    tol = _tol(vals)
    in_bounds = True
    if a.lower is not None:
        in_bounds &= bool(np.all(vals >= a.lower - tol))
    if a.upper is not None:
        in_bounds &= bool(np.all(vals <= a.upper + tol))
    bounded = in_bounds and bool(np.all(vals > 0.0))

    right = t >= 0.0
    monotone = bool(np.all(np.diff(vals[right]) >= -tol[right][1:]))
    even = bool(np.all(np.abs(np.asarray(a.eval(-t), dtype=float) - vals) <= tol))

    threshold = a.positivity_threshold if a.positivity_threshold is not None else 0.0
    beyond = t > threshold
    positive = bool(np.all(vals[beyond] > 0.0))

    periodic = False
    if a.period is not None:
        shifted = np.asarray(a.eval(t + a.period), dtype=float)
        periodic = bool(np.all(np.abs(shifted - vals) <= tol))

    return {"a1": bounded, "a1'": True, "a2": monotone, "a3": even, "a4": positive, "periodic": periodic}


def validate_weight(
    a: Weight,
    samples: int = _DEFAULT_SAMPLES,
    horizon: float = _DEFAULT_HORIZON,
) -> list[str]:
    """List declared hypotheses that fail at the samples (empty when consistent)."""
    sampled = sample_hypotheses(a, samples, horizon)
    violations = [
        f"({label}) declared but fails at the samples"
        for label, declared in a.flags().items()
        if declared and not sampled[label]
    ]
    if a.period is not None and not sampled["periodic"]:
        violations.append(f"declared period {a.period} fails at the samples")
    for v in violations:
        logger.warning("Weight %s: %s", a.name, v)
    return violations


def infimum_on(a: Weight, t1: float, t2: float, samples: int = 201) -> float:
    """Sampled infimum of a on [t1, t2]."""
    lo, hi = min(t1, t2), max(t1, t2)
    return float(np.min(np.asarray(a.eval(np.linspace(lo, hi, samples)), dtype=float)))


@dataclass(frozen=True)
class B1Report:
    """Outcome of the structural check a <= b with b - a -> 0.

    Attributes:
        passed: True when there are no violations and the tail gap is within tolerance.
        violations: Sample points (t, a(t), b(t)) where a exceeds b.
        max_tail_gap: Largest |b - a| on |t| >= horizon/2.
        tail_ok: Whether max_tail_gap <= tail_tol.
    """

    passed: bool
    violations: tuple[tuple[float, float, float], ...]
    max_tail_gap: float
    tail_ok: bool


def check_b1(
    a: Weight,
    b: Weight,
    tail_tol: float,
    horizon: float,
    samples: int = _DEFAULT_SAMPLES,
) -> B1Report:
    """Check a <= b on [-horizon, horizon] and |b - a| <= tail_tol in the tails.

    The grid has an odd number of points so t = 0 is always sampled.
    """
    t = np.linspace(-horizon, horizon, samples + 1 if samples % 2 == 0 else samples)
    av = np.asarray(a.eval(t), dtype=float)
    bv = np.asarray(b.eval(t), dtype=float)
    over = av > bv + _tol(bv)
    violations = tuple(
        (float(ti), float(ai), float(bi)) for ti, ai, bi in zip(t[over], av[over], bv[over])
    )
    tail = np.abs(t) >= horizon / 2.0
    gap = float(np.max(np.abs(bv[tail] - av[tail]))) if np.any(tail) else 0.0
    tail_ok = gap <= tail_tol
    if violations:
        logger.info("check_b1: %d sample(s) with a > b, first at t=%g", len(violations), violations[0][0])
    return B1Report(
        passed=not violations and tail_ok,
        violations=violations,
        max_tail_gap=gap,
        tail_ok=tail_ok,
    )
