"""Tests for the relativistic kernel and its regularized family.

Covers: g values and domain errors, the flux singularity, Ψₙ coefficients,
        C² matching at the junction, Υₙ∘ψₙ continuity, and the pointwise
        sandwich between ½s² and s².
"""

from __future__ import annotations

import numpy as np
import pytest

from hetero_bi.engine.errors import KernelDomainError, KernelSingularityError, ParameterError
from hetero_bi.engine.kernel import (
    branch_jets,
    g,
    g_prime,
    g_second,
    make_regularized,
    psi_n_deriv,
    psi_n_eval,
    psi_n_second,
    upsilon_psi,
)

# ---------------------------------------------------------------------------
# g and its derivatives
# ---------------------------------------------------------------------------


class TestKineticDensity:
    def test_zero(self) -> None:
        assert g(0.0) == 0.0

    def test_light_cone(self) -> None:
        assert g(1.0) == 1.0
        assert g(-1.0) == 1.0

    def test_three_four_five(self) -> None:
        assert g(0.6) == pytest.approx(0.2, abs=1e-15)

    def test_array_shape_preserved(self) -> None:
        s = np.linspace(-1.0, 1.0, 7)
        assert g(s).shape == (7,)

    def test_outside_cone_names_slope(self) -> None:
        with pytest.raises(KernelDomainError, match="1.5"):
            g(np.array([0.0, 1.5, 0.2]))

    def test_nan_rejected(self) -> None:
        with pytest.raises(KernelDomainError):
            g(float("nan"))

    def test_sandwich(self) -> None:
        s = np.linspace(-1.0, 1.0, 200)
        values = g(s)
        assert np.all(0.5 * s**2 <= values + 1e-15)
        assert np.all(values <= s**2 + 1e-15)

    def test_monotone_in_magnitude(self) -> None:
        s = np.linspace(0.0, 1.0, 200)
        assert np.all(np.diff(g(s)) > 0.0)


class TestFlux:
    def test_zero(self) -> None:
        assert g_prime(0.0) == 0.0

    def test_values(self) -> None:
        assert g_prime(0.6) == pytest.approx(0.75)
        assert g_prime(-0.6) == pytest.approx(-0.75)

    def test_singular_at_cone(self) -> None:
        with pytest.raises(KernelSingularityError):
            g_prime(1.0)

    def test_curvature_matches_difference_quotient(self) -> None:
        s, h = 0.4, 1e-6
        fd = (g_prime(s + h) - g_prime(s - h)) / (2 * h)
        assert g_second(s) == pytest.approx(fd, rel=1e-7)

    def test_curvature_singular_at_cone(self) -> None:
        with pytest.raises(KernelSingularityError):
            g_second(-1.0)


# ---------------------------------------------------------------------------
# Regularized kernels
# ---------------------------------------------------------------------------


class TestMakeRegularized:
    def test_coefficients_n2(self) -> None:
        k = make_regularized(2)
        assert (k.a_n, k.b_n, k.c_n) == (0.5, 1.0, 1.0)
        assert (k.atil_n, k.btil_n, k.ctil_n) == (1.0, -0.5, 3.0)
        assert k.junction == 0.75

    def test_closed_forms(self) -> None:
        for n in (2, 3, 5, 8):
            k = make_regularized(n)
            assert k.a_n == 1.0 - 1.0 / n
            assert k.b_n == n / 2.0
            assert k.c_n == n**3 / 8.0

    def test_rejects_small_index(self) -> None:
        with pytest.raises(ParameterError, match=">= 2"):
            make_regularized(1)

    def test_rejects_non_integer(self) -> None:
        with pytest.raises(ParameterError, match="integer"):
            make_regularized(2.5)  # type: ignore[arg-type]

    def test_frozen(self) -> None:
        k = make_regularized(3)
        with pytest.raises(AttributeError):
            k.n = 4  # type: ignore[misc]


class TestJunction:
    @pytest.mark.parametrize("n", [2, 3, 4, 8])
    def test_closed_form_jets_match(self, n: int) -> None:
        inner, outer = branch_jets(make_regularized(n))
        assert inner.value == pytest.approx(outer.value, abs=1e-10)
        assert inner.first == pytest.approx(outer.first, abs=1e-10)
        assert inner.second == pytest.approx(outer.second, rel=1e-10)

    @pytest.mark.parametrize("n", [2, 4])
    def test_finite_difference_match(self, n: int) -> None:
        k = make_regularized(n)
        t = float(np.sqrt(k.junction))
        h = 1e-4
        left = (psi_n_eval(k, t - 2 * h) - 2 * psi_n_eval(k, t - h) + psi_n_eval(k, t)) / h**2
        right = (psi_n_eval(k, t) - 2 * psi_n_eval(k, t + h) + psi_n_eval(k, t + 2 * h)) / h**2
        assert left == pytest.approx(psi_n_second(k, t - h), rel=1e-3)
        assert right == pytest.approx(psi_n_second(k, t + h), rel=1e-3)
        assert psi_n_eval(k, t - 1e-9) == pytest.approx(psi_n_eval(k, t + 1e-9), abs=1e-7)

    def test_inner_branch_is_g(self) -> None:
        k = make_regularized(3)
        t = np.linspace(-np.sqrt(k.junction), np.sqrt(k.junction), 101)
        np.testing.assert_allclose(psi_n_eval(k, t), g(t), atol=1e-15)

    def test_derivative_matches_difference_quotient(self) -> None:
        k = make_regularized(2)
        h = 1e-6
        t = np.array([-1.5, -0.9, -0.3, 0.1, 0.5, 0.84, 0.9, 1.2])
        fd = (psi_n_eval(k, t + h) - psi_n_eval(k, t - h)) / (2 * h)
        np.testing.assert_allclose(psi_n_deriv(k, t), fd, rtol=1e-6, atol=1e-9)

    def test_convex(self) -> None:
        k = make_regularized(2)
        t = np.linspace(-2.0, 2.0, 801)
        assert np.all(np.diff(psi_n_eval(k, t), 2) >= -1e-12)

    def test_below_g_beyond_junction(self) -> None:
        k = make_regularized(2)
        s = np.linspace(0.9, 1.0, 50)
        assert np.all(psi_n_eval(k, s) < g(s))


class TestUpsilonPsi:
    def test_zero(self) -> None:
        assert upsilon_psi(make_regularized(3), 0.0) == 0.0

    def test_inner_value(self) -> None:
        assert upsilon_psi(make_regularized(2), 0.6) == pytest.approx(0.25)

    @pytest.mark.parametrize("n", [2, 3, 6])
    def test_continuous_at_junction(self, n: int) -> None:
        k = make_regularized(n)
        t = float(np.sqrt(k.junction))
        assert upsilon_psi(k, t - 1e-12) == pytest.approx(n - 1, rel=1e-6)
        assert upsilon_psi(k, t + 1e-12) == pytest.approx(n - 1, rel=1e-6)

    def test_legendre_identity(self) -> None:
        k = make_regularized(3)
        t = np.array([0.2, 0.7, 0.99, 1.3])
        expected = t * psi_n_deriv(k, t) - psi_n_eval(k, t)
        np.testing.assert_allclose(upsilon_psi(k, t), expected, rtol=1e-12, atol=1e-12)
