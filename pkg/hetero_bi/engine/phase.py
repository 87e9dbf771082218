"""Phase-space shooting for u' = p / sqrt(1 + p²), p' = a(t) W'(u).

In the momentum p = u' / sqrt(1 - u'²) the singular second-order equation
becomes a regular first-order system, and |u'| < 1 holds automatically.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from hetero_bi.engine.errors import IntegrationError, ParameterError
from hetero_bi.engine.functional import Profile, unit_weight
from hetero_bi.engine.potentials import Potential
from hetero_bi.engine.weights import Weight

logger = logging.getLogger(__name__)


class PhaseState(NamedTuple):
    """Position u and relativistic momentum p."""

    u: float
    p: float

    @property
    def velocity(self) -> float:
        return self.p / math.sqrt(1.0 + self.p * self.p)


def _field(t: float, u: float, p: float, W: Potential, a: Weight) -> tuple[float, float]:
    return p / math.sqrt(1.0 + p * p), float(a.eval(t)) * float(W.deriv(u))


def phase_flow_step(s: PhaseState, t: float, dt: float, W: Potential, a: Weight | None = None) -> PhaseState:
    """One classical Runge-Kutta step of size dt (negative dt integrates backward).

    Args:
        s: State at time t.
        t: Current time; the weight is evaluated at t, t + dt/2 and t + dt.
        dt: Step size, nonzero.
        W: Potential supplying W'.
        a: Weight; constant 1 when omitted.

    Returns:
        The state at t + dt.

    Raises:
        IntegrationError: On step underflow or a non-finite state.
    """
    if dt == 0.0 or t + dt == t:
        raise IntegrationError(f"step {dt!r} underflows at t={t!r}")
    weight = a or unit_weight()
    try:
        k1u, k1p = _field(t, s.u, s.p, W, weight)
        k2u, k2p = _field(t + dt / 2, s.u + dt / 2 * k1u, s.p + dt / 2 * k1p, W, weight)
        k3u, k3p = _field(t + dt / 2, s.u + dt / 2 * k2u, s.p + dt / 2 * k2p, W, weight)
        k4u, k4p = _field(t + dt, s.u + dt * k3u, s.p + dt * k3p, W, weight)
    except ParameterError as exc:
        raise IntegrationError(f"flow left the evaluable region near t={t:g}: {exc}") from exc
    u = s.u + dt / 6 * (k1u + 2 * k2u + 2 * k3u + k4u)
    p = s.p + dt / 6 * (k1p + 2 * k2p + 2 * k3p + k4p)
    if not (math.isfinite(u) and math.isfinite(p)):
        raise IntegrationError(f"non-finite state at t={t + dt:g}")
    return PhaseState(u, p)


@dataclass(frozen=True)
class Trajectory:
    """Sampled solution of the phase flow.

    Attributes:
        t: Sample times, monotone in the direction of integration.
        u: Positions.
        p: Momenta.
    """

    t: np.ndarray
    u: np.ndarray
    p: np.ndarray

    @property
    def velocity(self) -> np.ndarray:
        return self.p / np.sqrt(1.0 + self.p**2)

    def to_profile(self) -> Profile:
        order = np.argsort(self.t, kind="stable")
        return Profile(self.t[order], self.u[order])


def shoot(
    u0: float,
    p0: float,
    t_span: tuple[float, float],
    W: Potential,
    a: Weight | None = None,
    dt: float = 1e-3,
) -> Trajectory:
    """Integrate from (u0, p0) at t_span[0] to t_span[1] with equal steps close to dt.

    Args:
        u0: Initial position.
        p0: Initial momentum.
        t_span: Start and end time; the end may lie before the start.
        W: Potential.
        a: Weight; constant 1 when omitted.
        dt: Target step size. The span is split into equal steps no longer than |dt|.

    Returns:
        Trajectory sampled at every step, ordered in the direction of integration.

    Raises:
        IntegrationError: If a step underflows or the state stops being finite.
    """
    start, stop = map(float, t_span)
    steps = max(1, math.ceil(abs(stop - start) / abs(dt) - 1e-9))
    h = (stop - start) / steps
    weight = a or unit_weight()

    t = start + h * np.arange(steps + 1)
    u = np.empty(steps + 1)
    p = np.empty(steps + 1)
    state = PhaseState(float(u0), float(p0))
    u[0], p[0] = state
    for i in range(steps):
        state = phase_flow_step(state, float(t[i]), h, W, weight)
        u[i + 1], p[i + 1] = state
    logger.debug("Shot %d steps from (%g, %g) over [%g, %g]", steps, u0, p0, start, stop)
    return Trajectory(t=t, u=u, p=p)


def shoot_both_ways(
    u0: float,
    p0: float,
    half_span: float,
    W: Potential,
    a: Weight | None = None,
    dt: float = 1e-3,
    t0: float = 0.0,
) -> Trajectory:
    """Integrate backward to t0 - half_span and forward to t0 + half_span from one phase point.

    Starting from the heteroclinic's phase point at u = 0 this traces both
    wells' approaches, which is how the quadrature profile is cross-checked.

    Returns:
        One trajectory in increasing time, the shared start sample kept once.

    Raises:
        IntegrationError: If either half fails.
    """
    back = shoot(u0, p0, (t0, t0 - half_span), W, a, dt)
    forward = shoot(u0, p0, (t0, t0 + half_span), W, a, dt)
    return Trajectory(
        t=np.concatenate([back.t[:0:-1], forward.t]),
        u=np.concatenate([back.u[:0:-1], forward.u]),
        p=np.concatenate([back.p[:0:-1], forward.p]),
    )
