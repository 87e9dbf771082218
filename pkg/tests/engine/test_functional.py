"""Tests for profiles, discrete actions, residuals, bounds and the strip functional."""

from __future__ import annotations

import math

import numpy as np
import pytest

from hetero_bi.engine.errors import (
    KernelSingularityError,
    ParameterError,
    ProfileError,
    UnsupportedGridError,
)
from hetero_bi.engine.functional import (
    DiscreteAction,
    Profile,
    StripGrid,
    action,
    action_2d,
    action_gradient,
    conservation_residual,
    crossing_band,
    crossing_lower_bound,
    derivative_bound,
    el_residual,
    nonautonomous_derivative_bound,
    regularized_action,
    restrict,
    slice_compare,
)
from hetero_bi.engine.kernel import g, make_regularized
from hetero_bi.engine.potentials import allen_cahn, beta_eps, exact_example
from hetero_bi.engine.weights import constant, periodic_sin


@pytest.fixture
def tanh_profile() -> Profile:
    return Profile.sample(lambda t: np.tanh(t / math.sqrt(2.0)), np.linspace(-10.0, 10.0, 4001))


def _random_profile(rng: np.random.Generator, n: int = 40) -> Profile:
    t = np.linspace(-3.0, 3.0, n + 1)
    h = t[1] - t[0]
    steps = rng.uniform(-0.95, 0.95, n) * h
    u = np.concatenate([[0.0], np.cumsum(steps)])
    return Profile(t, u)


# ---------------------------------------------------------------------------
# Profile
# ---------------------------------------------------------------------------


class TestProfile:
    def test_read_only(self) -> None:
        p = Profile(np.array([0.0, 1.0]), np.array([0.0, 0.5]))
        with pytest.raises(ValueError):
            p.u[0] = 1.0

    def test_copies_input(self) -> None:
        u = np.array([0.0, 0.5])
        p = Profile(np.array([0.0, 1.0]), u)
        u[0] = 9.0
        assert p.u[0] == 0.0

    def test_length_mismatch(self) -> None:
        with pytest.raises(ProfileError, match="equal length"):
            Profile(np.zeros(3), np.zeros(2))

    def test_too_short(self) -> None:
        with pytest.raises(ProfileError, match="two nodes"):
            Profile(np.zeros(1), np.zeros(1))

    def test_non_increasing_names_cell(self) -> None:
        with pytest.raises(ProfileError, match="cell 1"):
            Profile(np.array([0.0, 1.0, 1.0]), np.zeros(3))

    def test_non_finite(self) -> None:
        with pytest.raises(ProfileError, match="non-finite"):
            Profile(np.array([0.0, 1.0]), np.array([0.0, np.inf]))

    def test_geometry(self) -> None:
        p = Profile(np.array([0.0, 1.0, 3.0]), np.array([0.0, 0.5, 0.5]))
        assert p.n_cells == 2
        np.testing.assert_allclose(p.slopes, [0.5, 0.0])
        np.testing.assert_allclose(p.t_mid, [0.5, 2.0])
        assert p.span == 3.0
        assert not p.is_uniform()

    def test_slope_violation_names_cell(self) -> None:
        p = Profile(np.array([0.0, 1.0, 2.0]), np.array([0.0, 0.5, 2.0]))
        with pytest.raises(ProfileError, match="cell 1"):
            p.check_slopes()

    def test_shifted(self) -> None:
        p = Profile(np.array([0.0, 1.0]), np.array([0.0, 0.5])).shifted(2.0)
        np.testing.assert_array_equal(p.t, [2.0, 3.0])

    def test_restrict(self, tanh_profile: Profile) -> None:
        r = restrict(tanh_profile, -1.0, 1.0)
        assert r.t[0] == pytest.approx(-1.0)
        assert r.t[-1] == pytest.approx(1.0)
        assert r.t.size == 401


# ---------------------------------------------------------------------------
# Action
# ---------------------------------------------------------------------------


class TestAction:
    def test_single_cell(self) -> None:
        p = Profile(np.array([0.0, 1.0]), np.array([0.0, 0.6]))
        b = action(p, allen_cahn())
        assert b.kinetic == pytest.approx(0.2)
        assert b.potential == pytest.approx(0.25 * (0.09 - 1.0) ** 2)
        assert b.total == pytest.approx(b.kinetic + b.potential)
        assert b.per_cell.shape == (1, 2)

    def test_weight_scales_potential(self) -> None:
        p = Profile(np.array([0.0, 1.0]), np.array([0.0, 0.6]))
        assert action(p, allen_cahn(), constant(2.0)).potential == pytest.approx(
            2.0 * action(p, allen_cahn()).potential
        )

    def test_rejects_superluminal(self) -> None:
        p = Profile(np.array([0.0, 1.0]), np.array([0.0, 1.5]))
        with pytest.raises(ProfileError, match="cell 0"):
            action(p, allen_cahn())

    def test_converges_to_exact_action(self, tanh_profile: Profile) -> None:
        # refining the grid changes the total by O(h²)
        coarse = Profile.sample(lambda t: np.tanh(t / math.sqrt(2.0)), np.linspace(-10.0, 10.0, 1001))
        fine = action(tanh_profile, exact_example()).total
        assert action(coarse, exact_example()).total == pytest.approx(fine, abs=2e-4)

    def test_to_dict(self) -> None:
        p = Profile(np.array([0.0, 1.0, 2.0]), np.array([0.0, 0.5, 1.0]))
        d = action(p, allen_cahn()).to_dict()
        assert set(d) == {"kinetic", "potential", "total", "cells"}
        assert len(d["cells"]) == 2


class TestNodalQuadrature:
    def test_permutation_invariant_potential(self) -> None:
        rng = np.random.default_rng(3)
        t = np.linspace(0.0, 1.0, 9)
        u = rng.uniform(-0.05, 0.05, 9)
        base = action(Profile(t, u), allen_cahn(), quadrature="nodal").potential
        shuffled = action(Profile(t, rng.permutation(u)), allen_cahn(), quadrature="nodal").potential
        assert shuffled == pytest.approx(base, rel=1e-14)

    def test_equal_bins(self) -> None:
        p = Profile(np.linspace(0.0, 2.0, 3), np.zeros(3))
        # three nodes of bin 2/3 each at W(0) = 1/4
        assert action(p, allen_cahn(), quadrature="nodal").potential == pytest.approx(0.5)

    def test_non_uniform(self) -> None:
        p = Profile(np.array([0.0, 1.0, 3.0]), np.zeros(3))
        with pytest.raises(UnsupportedGridError):
            action(p, allen_cahn(), quadrature="nodal")


class TestDiscreteAction:
    def test_gradient_matches_differences(self) -> None:
        p = _random_profile(np.random.default_rng(0))
        functional = DiscreteAction(p.t, allen_cahn(), periodic_sin(2.0, 1.0, 5.0))
        grad = functional.gradient(np.array(p.u))
        h = 1e-7
        for i in (0, 7, 20, 40):
            up, down = np.array(p.u), np.array(p.u)
            up[i] += h
            down[i] -= h
            fd = (functional.value(up) - functional.value(down)) / (2 * h)
            assert grad[i] == pytest.approx(fd, rel=1e-6, abs=1e-7)

    def test_interior_gradient(self) -> None:
        p = _random_profile(np.random.default_rng(1))
        full = DiscreteAction(p.t, allen_cahn()).gradient(np.array(p.u))
        np.testing.assert_array_equal(action_gradient(p, allen_cahn()), full[1:-1])

    def test_hessian_bands_match_gradient_differences(self) -> None:
        p = _random_profile(np.random.default_rng(2))
        functional = DiscreteAction(p.t, allen_cahn())
        u = np.array(p.u)
        diag, off = functional.hessian_bands(u)
        h = 1e-6
        i = 10
        up, down = u.copy(), u.copy()
        up[i] += h
        down[i] -= h
        column = (functional.gradient(up) - functional.gradient(down)) / (2 * h)
        assert column[i] == pytest.approx(diag[i], rel=1e-5)
        assert column[i + 1] == pytest.approx(off[i], rel=1e-5)
        assert column[i - 1] == pytest.approx(off[i - 1], rel=1e-5)


class TestRegularizedAction:
    def test_never_above_action(self) -> None:
        rng = np.random.default_rng(11)
        k = make_regularized(2)
        for _ in range(20):
            p = _random_profile(rng)
            assert regularized_action(p, allen_cahn(), k).total <= action(p, allen_cahn()).total + 1e-15

    def test_strict_when_steep(self) -> None:
        p = Profile(np.array([0.0, 1.0]), np.array([0.0, 0.95]))
        assert regularized_action(p, allen_cahn(), make_regularized(2)).total < action(p, allen_cahn()).total

    def test_equal_when_slow(self) -> None:
        p = Profile(np.array([0.0, 1.0]), np.array([0.0, 0.5]))
        k = make_regularized(2)
        assert regularized_action(p, allen_cahn(), k).total == pytest.approx(action(p, allen_cahn()).total)


# ---------------------------------------------------------------------------
# Residuals
# ---------------------------------------------------------------------------


class TestResiduals:
    def test_conservation_on_exact_solution(self, tanh_profile: Profile) -> None:
        report = conservation_residual(tanh_profile, exact_example())
        assert report.max_abs < 1e-4
        assert report.t.size == tanh_profile.t.size - 2

    def test_el_on_exact_solution(self, tanh_profile: Profile) -> None:
        assert el_residual(tanh_profile, exact_example()).max_abs < 1e-4

    def test_el_detects_wrong_potential(self, tanh_profile: Profile) -> None:
        assert el_residual(tanh_profile, allen_cahn()).max_abs > 1e-2

    def test_singular_slope(self) -> None:
        p = Profile(np.array([0.0, 1.0, 2.0]), np.array([-1.0, 0.0, 0.5]))
        with pytest.raises(KernelSingularityError, match="cell 0"):
            conservation_residual(p, allen_cahn())

    def test_regularized_flux_accepts_light_cone(self) -> None:
        p = Profile(np.array([0.0, 1.0, 2.0]), np.array([-1.0, 0.0, 0.5]))
        report = el_residual(p, allen_cahn(), kernel=make_regularized(2))
        assert np.isfinite(report.max_abs)

    def test_two_nodes(self) -> None:
        p = Profile(np.array([0.0, 1.0]), np.array([0.0, 0.5]))
        assert conservation_residual(p, allen_cahn()).max_abs == 0.0


# ---------------------------------------------------------------------------
# Bounds
# ---------------------------------------------------------------------------


class TestBounds:
    def test_allen_cahn_bound(self) -> None:
        assert derivative_bound(allen_cahn()) == pytest.approx(0.6, abs=1e-10)

    def test_exact_example_bound(self) -> None:
        assert derivative_bound(exact_example()) == pytest.approx(1.0 / math.sqrt(2.0), abs=1e-10)

    def test_nonautonomous_reduces_to_autonomous(self) -> None:
        assert nonautonomous_derivative_bound(allen_cahn(), 1.0, 0.0, 5.0) == pytest.approx(0.6, abs=1e-10)

    def test_nonautonomous_grows_with_action(self) -> None:
        low = nonautonomous_derivative_bound(allen_cahn(), 3.0, 1.0, 0.5)
        high = nonautonomous_derivative_bound(allen_cahn(), 3.0, 1.0, 2.0)
        assert 0.0 < low < high < 1.0

    def test_nonautonomous_rejects_negative(self) -> None:
        with pytest.raises(ParameterError):
            nonautonomous_derivative_bound(allen_cahn(), 1.0, -1.0, 1.0)

    def test_crossing_bound(self) -> None:
        assert crossing_lower_bound(0.2, 2.0, 1.0) == pytest.approx(0.2)

    @pytest.mark.parametrize(("eps", "a1", "beta"), [(0.0, 1.0, 1.0), (0.2, 0.0, 1.0), (0.2, 1.0, -1.0)])
    def test_crossing_bound_rejects(self, eps: float, a1: float, beta: float) -> None:
        with pytest.raises(ParameterError):
            crossing_lower_bound(eps, a1, beta)


class TestCrossingBand:
    def test_locates_band(self, tanh_profile: Profile) -> None:
        band = crossing_band(tanh_profile, allen_cahn(), None, 0.2)
        assert band is not None
        assert band.t1 == pytest.approx(math.sqrt(2.0) * math.atanh(0.8), abs=1e-4)
        assert band.t2 == pytest.approx(math.sqrt(2.0) * math.atanh(0.9), abs=1e-4)
        assert band.a1 == 1.0
        assert band.beta == pytest.approx(beta_eps(allen_cahn(), 0.2))
        assert band.bound == pytest.approx(crossing_lower_bound(0.2, 1.0, band.beta))

    def test_local_action_bounded_by_total(self, tanh_profile: Profile) -> None:
        band = crossing_band(tanh_profile, allen_cahn(), None, 0.2)
        assert 0.0 < band.local_action < action(tanh_profile, allen_cahn()).total

    def test_never_reaches_band(self) -> None:
        p = Profile(np.linspace(0.0, 1.0, 5), np.zeros(5))
        assert crossing_band(p, allen_cahn(), None, 0.2) is None

    def test_rejects_eps(self, tanh_profile: Profile) -> None:
        with pytest.raises(ParameterError):
            crossing_band(tanh_profile, allen_cahn(), None, 1.5)


# ---------------------------------------------------------------------------
# Strip functional
# ---------------------------------------------------------------------------


def _strip(amplitude: float, nx: int = 200, ny: int = 20) -> StripGrid:
    x = np.linspace(-10.0, 10.0, nx)
    y = np.linspace(0.0, 1.0, ny)
    u = np.tanh((x[:, None] + amplitude * np.sin(2 * math.pi * y[None, :])) / math.sqrt(2.0))
    return StripGrid(x, y, u)


class TestStrip:
    def test_shape_checked(self) -> None:
        with pytest.raises(ProfileError, match="shape"):
            StripGrid(np.linspace(0, 1, 3), np.linspace(0, 1, 2), np.zeros((2, 3)))

    def test_y_independent_matches_slice(self) -> None:
        gr = _strip(0.0)
        report = slice_compare(gr, allen_cahn())
        assert report.total_2d == pytest.approx(gr.width * report.slice_totals[0], abs=1e-10)
        assert report.total_2d == pytest.approx(report.x_only_total, abs=1e-12)
        assert report.passed and not report.strict
        assert report.above_slice_mean

    def test_single_node_width(self) -> None:
        gr = StripGrid(np.linspace(-1.0, 1.0, 5), np.array([0.0]), np.zeros((5, 1)))
        assert gr.width == 1.0
        assert action_2d(gr, allen_cahn()) == pytest.approx(action(gr.slice(0), allen_cahn()).total)

    def test_wavy_strictly_above_x_only(self) -> None:
        report = slice_compare(_strip(0.1), allen_cahn())
        assert report.strict
        assert report.passed
        assert report.total_2d > report.x_only_total

    def test_below_slice_mean_fails(self) -> None:
        # opposite oscillations cancel in the cell-averaged ∂_x u, so only the
        # comparison with the slice actions can catch the missing kinetic energy
        x = np.linspace(-1.0, 1.0, 401)
        f = 0.01 * np.sin(80.0 * x)
        gr = StripGrid(x, np.array([0.0, 1.0]), np.stack([f, -f], axis=1))
        report = slice_compare(gr, allen_cahn())
        assert report.strict
        assert report.total_2d >= report.x_only_total
        assert not report.above_slice_mean
        assert report.total_2d < report.width * float(np.mean(report.slice_totals))
        assert not report.passed

    def test_gradient_violation(self) -> None:
        x = np.linspace(0.0, 1.0, 3)
        y = np.linspace(0.0, 0.01, 2)
        u = np.array([[0.0, 1.0], [0.0, 1.0], [0.0, 1.0]])
        with pytest.raises(ProfileError, match="gradient norm"):
            action_2d(StripGrid(x, y, u), allen_cahn())

    def test_kinetic_only_strip(self) -> None:
        gr = _strip(0.0, nx=50, ny=3)
        expected = gr.width * float(np.sum(g(np.abs(gr.slice(0).slopes)) * gr.slice(0).dt))
        assert action_2d(gr, allen_cahn()) > expected
