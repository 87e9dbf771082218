"""Tests for phase-space shooting."""

from __future__ import annotations

import math

import numpy as np
import pytest

from hetero_bi.engine.errors import IntegrationError
from hetero_bi.engine.phase import PhaseState, phase_flow_step, shoot, shoot_both_ways
from hetero_bi.engine.potentials import allen_cahn, exact_example


def _energy(u: np.ndarray, p: np.ndarray, W: object) -> np.ndarray:
    # sqrt(1 + p²) - 1 - W(u) is the first integral of the autonomous flow
    return np.sqrt(1.0 + p**2) - 1.0 - np.asarray(W.eval(u))  # type: ignore[attr-defined]


class TestPhaseState:
    def test_velocity_subluminal(self) -> None:
        assert PhaseState(0.0, 0.75).velocity == pytest.approx(0.6)
        assert abs(PhaseState(0.0, 1e6).velocity) < 1.0


class TestStep:
    def test_underflow(self) -> None:
        with pytest.raises(IntegrationError, match="underflows"):
            phase_flow_step(PhaseState(0.0, 1.0), 1e20, 1e-3, allen_cahn())

    def test_zero_step(self) -> None:
        with pytest.raises(IntegrationError):
            phase_flow_step(PhaseState(0.0, 1.0), 0.0, 0.0, allen_cahn())

    def test_leaving_domain(self) -> None:
        # exact_example is undefined past |u| = sqrt(1 + √2)
        with pytest.raises(IntegrationError, match="evaluable"):
            phase_flow_step(PhaseState(1.6, 1.0), 0.0, 1e-3, exact_example())


class TestShoot:
    def test_energy_conserved(self) -> None:
        W = allen_cahn()
        traj = shoot(0.0, 0.3, (0.0, 5.0), W, dt=1e-3)
        e = _energy(traj.u, traj.p, W)
        assert float(np.max(np.abs(e - e[0]))) < 1e-10

    def test_backward(self) -> None:
        traj = shoot(0.0, 0.3, (0.0, -2.0), allen_cahn(), dt=1e-3)
        assert traj.t[-1] == pytest.approx(-2.0)
        assert traj.u[-1] < 0.0

    def test_exact_heteroclinic(self) -> None:
        W = exact_example()
        p0 = math.sqrt(W.eval(0.0) * (2.0 + W.eval(0.0)))
        traj = shoot_both_ways(0.0, p0, 6.0, W, dt=1e-3)
        expected = np.tanh(traj.t / math.sqrt(2.0))
        assert float(np.max(np.abs(traj.u - expected))) < 1e-6
        assert np.all(np.diff(traj.t) > 0.0)

    def test_velocity_matches_profile(self) -> None:
        traj = shoot(0.0, 0.5, (0.0, 1.0), allen_cahn(), dt=1e-3)
        assert np.all(np.abs(traj.velocity) < 1.0)
        p = traj.to_profile()
        assert p.t.size == traj.t.size
