"""Profile surgeries: clamping, rearrangement, stretching, excision, odd extension.

Every operation returns a new Profile and leaves its argument untouched.
"""

from __future__ import annotations

import logging
import math

import numpy as np

from hetero_bi.engine.errors import ParameterError, ProfileError, SurgeryError, UnsupportedGridError
from hetero_bi.engine.functional import Profile

logger = logging.getLogger(__name__)

# Junction values of an excision must agree to this absolute tolerance.
EXCISE_TOL = 1e-9

# u(0) tolerance for the odd extension.
ODD_TOL = 1e-9


def clamp(p: Profile) -> Profile:
    """Project the values onto [-1, 1].

    Clipping an overshoot never raises a slope in absolute value, so the
    kinetic part of the action does not increase. clamp is idempotent.

    Args:
        p: Any profile.

    Returns:
        A profile on the same grid, marked clamped.
    """
    return Profile(p.t, np.clip(p.u, -1.0, 1.0), clamped=True)


def count_ties(p: Profile) -> int:
    """Number of node values that repeat an earlier one."""
    return int(p.u.size - np.unique(p.u).size)


def rearrange(p: Profile) -> Profile:
    """Nondecreasing rearrangement of the node values on a uniform grid.

    Ties are logged as a warning, since the sorted order is then not unique.

    Args:
        p: Profile with values in [-1, 1] on a uniform grid.

    Returns:
        The sorted profile on the same grid, marked clamped.

    Raises:
        UnsupportedGridError: If the grid is not uniform.
        ProfileError: If a value lies outside [-1, 1].
    """
    if not p.is_uniform():
        raise UnsupportedGridError("monotone rearrangement needs a uniform grid")
    if np.any(np.abs(p.u) > 1.0):
        raise ProfileError("rearrangement needs values in [-1, 1]")
    ties = count_ties(p)
    if ties:
        logger.warning("Rearranged profile has %d tied value(s); the sorted order is not unique", ties)
    return Profile(p.t, np.sort(p.u, kind="stable"), clamped=True)


def extend_to(p: Profile, t_end: float) -> Profile:
    """Append nodes at the mean spacing up to t_end, holding the terminal value.

    Args:
        p: Profile to extend.
        t_end: Time the result must reach.

    Returns:
        p itself when it already reaches t_end, else the extended profile.
    """
    if t_end <= p.t[-1]:
        return p
    h = float(np.mean(p.dt))
    extra = math.ceil((t_end - p.t[-1]) / h - 1e-9)
    tail = p.t[-1] + h * np.arange(1, extra + 1)
    return Profile(np.concatenate([p.t, tail]), np.concatenate([p.u, np.full(extra, p.u[-1])]), p.clamped)


def stretch(p: Profile, t0: float, t1: float, theta: float) -> Profile:
    """Dilate the band [t0, t1] by 1/(1 - θ) and translate the tail to the right.

    The result lives on a fresh grid with the mean spacing of p, starting at
    p.t[0] and covering the extended support; past the shifted end the
    terminal value is held.

    Args:
        p: Profile, usually a computed minimizer.
        t0: Left end of the band, inside the grid.
        t1: Right end of the band, inside the grid.
        theta: Dilation parameter in (0, 1); the band grows to (t1 - t0) / (1 - θ).

    Returns:
        The stretched profile. For a constant weight its kinetic term changes
        by θ/(1 - θ) (t1 - t0) + θ(θ - 2)/(1 - θ) ∫ dt / [(1 - θ)√(1 - u'²) + √(1 - (1 - θ)²u'²)]
        and its potential term by θ/(1 - θ) ∫ W(u) dt, both over [t0, t1].

    Raises:
        ParameterError: If θ is outside (0, 1), t0 >= t1, or the band leaves the grid.
    """
    if not 0.0 < theta < 1.0:
        raise ParameterError(f"theta must lie in (0, 1), got {theta}")
    if not t0 < t1:
        raise ParameterError(f"stretch needs t0 < t1, got [{t0}, {t1}]")
    if t0 < p.t[0] or t1 > p.t[-1]:
        raise ParameterError(f"band [{t0}, {t1}] leaves the grid [{p.t[0]}, {p.t[-1]}]")

    t1_bar = t0 + (t1 - t0) / (1.0 - theta)
    shift = t1_bar - t1
    h = float(np.mean(p.dt))
    count = math.ceil((p.span + shift) / h - 1e-9)
    tau = p.t[0] + h * np.arange(count + 1)

    source = np.where(
        tau <= t0,
        tau,
        np.where(tau < t1_bar, (1.0 - theta) * (tau - t0) + t0, tau - shift),
    )
    return Profile(tau, np.interp(source, p.t, p.u), p.clamped)


def _node_index(p: Profile, t: float, label: str) -> int:
    idx = int(np.argmin(np.abs(p.t - t)))
    if abs(p.t[idx] - t) > EXCISE_TOL * max(1.0, abs(t)):
        raise SurgeryError(f"{label}={t} is not a grid node")
    return idx


def excise(p: Profile, t1: float, t2: float) -> Profile:
    """Remove (t1, t2] and translate the tail left by t2 - t1.

    When u is constant on [t1, t2] and the weight is constant, the action
    drops by exactly the potential mass of the removed segment.

    Args:
        p: Profile with u(t1) = u(t2).
        t1: Grid node where the cut starts.
        t2: Grid node where the cut ends.

    Returns:
        p itself when t1 and t2 are the same node, else the shortened profile.

    Raises:
        ParameterError: If t1 > t2.
        SurgeryError: If t1 or t2 is not a node or |u(t1) - u(t2)| > 1e-9.
    """
    if t1 > t2:
        raise ParameterError(f"excise needs t1 <= t2, got {t1} > {t2}")
    i1 = _node_index(p, t1, "t1")
    i2 = _node_index(p, t2, "t2")
    if i1 == i2:
        return p
    gap = abs(p.u[i1] - p.u[i2])
    if gap > EXCISE_TOL:
        raise SurgeryError(f"junction values differ by {gap:.3g} at t1={t1}, t2={t2}")

    offset = p.t[i2] - p.t[i1]
    t = np.concatenate([p.t[: i1 + 1], p.t[i2 + 1 :] - offset])
    u = np.concatenate([p.u[: i1 + 1], p.u[i2 + 1 :]])
    logger.debug("Excised (%g, %g]: %d node(s) removed", t1, t2, i2 - i1)
    return Profile(t, u, p.clamped)


def oddify(p: Profile) -> Profile:
    """Antisymmetric extension of a profile on [0, L] to [-L, L].

    For an even potential and weight the extended action is twice the
    half-line action.

    Args:
        p: Half-line profile with t_0 = 0 and u(0) = 0.

    Returns:
        The profile u(-t) = -u(t) on the mirrored grid.

    Raises:
        ParameterError: If the grid does not start at 0 or |u(0)| > 1e-9.
    """
    if abs(p.t[0]) > ODD_TOL:
        raise ParameterError(f"odd extension needs a grid starting at 0, got {p.t[0]}")
    if abs(p.u[0]) > ODD_TOL:
        raise ParameterError(f"odd extension needs u(0) = 0, got {p.u[0]}")
    t = np.concatenate([-p.t[:0:-1], [0.0], p.t[1:]])
    u = np.concatenate([-p.u[:0:-1], [0.0], p.u[1:]])
    return Profile(t, u, p.clamped)
