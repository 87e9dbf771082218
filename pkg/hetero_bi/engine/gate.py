"""Two-stage classification of a (W, a) problem into a solver regime.

Stage 1: Declared flags (fast) -- the constructors' own hypothesis flags.
Stage 2: Sampled hypotheses -- dense sampling when the flags say nothing usable.

Regimes:
    autonomous  constant weight; conservation law and quadrature apply
    periodic    bounded periodic weight
    structural  bounded weight with a dominating weight b for (b1)
    odd         even, monotone, eventually positive weight with an even compact-support well
    unsupported none of the above
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from hetero_bi.engine.potentials import Potential
from hetero_bi.engine.weights import Weight, sample_hypotheses

logger = logging.getLogger(__name__)

REGIMES: tuple[str, ...] = ("autonomous", "periodic", "structural", "odd", "unsupported")


@dataclass(frozen=True)
class RouteDecision:
    """Result of route_problem.

    Attributes:
        regime: One of REGIMES.
        autonomous: True when the weight is constant.
        stage: "declared" or "sampled".
        reason: Human-readable explanation.
    """

    regime: str
    autonomous: bool
    stage: str
    reason: str


def _odd_ready(W: Potential, flags: dict[str, bool]) -> bool:
    return W.has_W2prime and W.has_W3 and flags["a2"] and flags["a3"] and flags["a4"]


def _declared(W: Potential, a: Weight) -> RouteDecision | None:
    if a.is_constant:
        return RouteDecision("autonomous", True, "declared", f"{a.name} is constant")
    if a.bounded and a.period is not None:
        return RouteDecision("periodic", False, "declared", f"{a.name} is bounded with period {a.period:g}")
    if a.bounded and a.dominating is not None:
        return RouteDecision(
            "structural", False, "declared", f"{a.name} is bounded and dominated by {a.dominating.name}"
        )
    if _odd_ready(W, a.flags()):
        return RouteDecision("odd", False, "declared", f"{a.name} is even, monotone and eventually positive")
    return None


def route_problem(W: Potential, a: Weight) -> RouteDecision:
    """Classify the problem, falling back to sampled hypotheses when the declared flags are silent.

    The direct solver acts on the regime: a periodic weight adds one shifted
    start per period inside the window, and an unsupported problem is solved
    with a warning that no existence result backs it.

    Args:
        W: Potential.
        a: Weight.

    Returns:
        RouteDecision naming the regime, the stage that decided it and why.
    """
    decision = _declared(W, a)
    if decision is None:
        sampled = sample_hypotheses(a)
        t = np.linspace(-10.0, 10.0, 2001)
        values = np.asarray(a.eval(t), dtype=float)
        if np.all(values == values[0]) and values[0] > 0.0:
            decision = RouteDecision("autonomous", True, "sampled", f"{a.name} samples as constant {values[0]:g}")
        elif sampled["a1"] and sampled["periodic"]:
            decision = RouteDecision("periodic", False, "sampled", f"{a.name} samples as bounded and periodic")
        elif _odd_ready(W, sampled):
            decision = RouteDecision("odd", False, "sampled", f"{a.name} samples as even, monotone and eventually positive")
        else:
            decision = RouteDecision(
                "unsupported", False, "sampled", f"no existence hypothesis holds for {W.name} with {a.name}"
            )
    logger.debug("Routed %s / %s: %s (%s)", W.name, a.name, decision.regime, decision.reason)
    return decision
