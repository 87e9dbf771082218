"""Tests for the verification report."""

from __future__ import annotations

import numpy as np
import pytest

from hetero_bi.engine.config import SolverConfig, VerificationConfig
from hetero_bi.engine.functional import Profile
from hetero_bi.engine.potentials import allen_cahn
from hetero_bi.engine.solver import Solution, direct_minimize
from hetero_bi.engine.verification import CheckResult, CheckStatus, VerificationReport, verify_minimizer
from hetero_bi.engine.weights import periodic_sin

CHECK_NAMES = ["boundary", "slope_bound", "conservation", "euler_lagrange", "stretch", "rearrange", "crossing"]


@pytest.fixture(scope="module")
def solution() -> Solution:
    return direct_minimize(SolverConfig(), allen_cahn())


def _tanh_profile(scale: float = 1.0, nodes: int = 2001) -> Profile:
    t = np.linspace(-10.0, 10.0, nodes)
    return Profile(t, np.tanh(t / scale))


class TestReportShape:

    def test_all_checks_in_order(self, solution: Solution) -> None:
        report = verify_minimizer(solution.profile, allen_cahn(), None, SolverConfig())
        assert [c.name for c in report.checks] == CHECK_NAMES

    def test_to_dict(self) -> None:
        report = VerificationReport((
            CheckResult("boundary", CheckStatus.PASS, 0.0, 1e-3, "ok"),
            CheckResult("stretch", CheckStatus.NOT_APPLICABLE, detail="skipped"),
        ))
        data = report.to_dict()
        assert data["passed"] is True
        assert data["checks"][1] == {
            "name": "stretch", "status": "not_applicable", "value": None, "threshold": None, "detail": "skipped",
        }

    def test_get_unknown(self) -> None:
        with pytest.raises(KeyError):
            VerificationReport(()).get("boundary")

    def test_fail_means_not_passed(self) -> None:
        report = VerificationReport((CheckResult("boundary", CheckStatus.FAIL, 1.0, 1e-3),))
        assert not report.passed


class TestMinimizerPasses:

    def test_passes(self, solution: Solution, caplog: pytest.LogCaptureFixture) -> None:
        with caplog.at_level("INFO"):
            report = verify_minimizer(solution.profile, allen_cahn(), None, SolverConfig())
        assert report.passed, report.to_dict()
        assert "Verification passed (7 checks)" in caplog.text

    def test_every_check_applies(self, solution: Solution) -> None:
        report = verify_minimizer(solution.profile, allen_cahn(), None, SolverConfig())
        assert all(c.status is CheckStatus.PASS for c in report.checks)

    def test_crossing_margin(self, solution: Solution) -> None:
        check = verify_minimizer(solution.profile, allen_cahn(), None, SolverConfig()).get("crossing")
        assert check.value is not None and check.threshold is not None
        assert check.value > check.threshold


class TestFailures:

    def test_steep_profile_fails(self) -> None:
        report = verify_minimizer(_tanh_profile(), allen_cahn(), None, SolverConfig())
        assert not report.passed
        assert report.get("slope_bound").status is CheckStatus.FAIL
        assert report.get("euler_lagrange").status is CheckStatus.FAIL

    def test_boundary_fails(self) -> None:
        t = np.linspace(-10.0, 10.0, 201)
        p = Profile(t, 0.9 * np.tanh(t / 3.0))
        check = verify_minimizer(p, allen_cahn(), None, SolverConfig()).get("boundary")
        assert check.status is CheckStatus.FAIL
        assert check.value == pytest.approx(1.0 - 0.9 * np.tanh(10.0 / 3.0))

    def test_bumped_minimizer_fails_euler_lagrange(self, solution: Solution) -> None:
        p = solution.profile
        bumped = Profile(p.t, p.u + 0.05 * np.exp(-p.t**2))
        report = verify_minimizer(bumped, allen_cahn(), None, SolverConfig())
        check = report.get("euler_lagrange")
        assert check.status is CheckStatus.FAIL
        assert check.value > check.threshold
        assert not report.passed

    def test_never_raises_on_luminal_slopes(self) -> None:
        p = Profile(np.array([0.0, 1.0, 2.0, 3.0]), np.array([-1.0, -1.0, 0.0, 1.0]))
        report = verify_minimizer(p, allen_cahn(), None, SolverConfig())
        assert report.get("conservation").status is CheckStatus.FAIL
        assert report.get("euler_lagrange").status is CheckStatus.FAIL


class TestApplicability:

    def test_time_dependent_weight(self) -> None:
        a = periodic_sin(2.0, 1.0, 5.0)
        report = verify_minimizer(_tanh_profile(3.0), allen_cahn(), a, SolverConfig())
        assert report.get("conservation").status is CheckStatus.NOT_APPLICABLE
        assert report.get("stretch").status is CheckStatus.NOT_APPLICABLE
        assert report.get("slope_bound").status is not CheckStatus.NOT_APPLICABLE

    def test_non_uniform_grid_skips_rearrange(self) -> None:
        t = np.concatenate([np.linspace(-10.0, 0.0, 101), np.linspace(0.05, 10.0, 400)])
        report = verify_minimizer(Profile(t, np.tanh(t / 3.0)), allen_cahn(), None, SolverConfig())
        assert report.get("rearrange").status is CheckStatus.NOT_APPLICABLE

    def test_crossing_skipped_below_band(self) -> None:
        t = np.linspace(-10.0, 10.0, 201)
        p = Profile(t, np.linspace(-1.0, 0.85, 201))
        vcfg = VerificationConfig(crossing_eps=0.2)
        check = verify_minimizer(p, allen_cahn(), None, SolverConfig(), vcfg).get("crossing")
        assert check.status is CheckStatus.NOT_APPLICABLE
        assert check.value is None

    def test_skips_are_logged(self, caplog: pytest.LogCaptureFixture) -> None:
        a = periodic_sin(2.0, 1.0, 5.0)
        with caplog.at_level("WARNING"):
            verify_minimizer(_tanh_profile(3.0), allen_cahn(), a, SolverConfig())
        assert "Check conservation skipped" in caplog.text
