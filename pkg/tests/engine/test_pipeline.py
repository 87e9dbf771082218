"""Tests for the sweep runner."""

from __future__ import annotations

import threading
import time
from typing import Any

import pytest

from hetero_bi.engine.pipeline import SweepResult, run_sweep


def _square(index: int, job: int) -> tuple[int, dict[str, Any]]:
    # later jobs finish first so ordering is exercised
    time.sleep(0.01 * (5 - index))
    return 0, {"value": job * job}


class TestRunSweep:

    def test_empty(self) -> None:
        result = run_sweep([], _square)
        assert result == SweepResult(status="completed", rows=(), errors=[], rows_total=0, rows_succeeded=0)

    @pytest.mark.parametrize("workers", [1, 4])
    def test_rows_in_input_order(self, workers: int) -> None:
        result = run_sweep([1, 2, 3, 4, 5], _square, max_workers=workers)
        assert result.status == "completed"
        assert [r.index for r in result.rows] == [0, 1, 2, 3, 4]
        assert [r.metrics["value"] for r in result.rows] == [1, 4, 9, 16, 25]
        assert result.rows_succeeded == 5

    def test_pool_is_used(self) -> None:
        seen: set[str] = set()
        lock = threading.Lock()

        def task(index: int, job: int) -> tuple[int, dict[str, Any]]:
            with lock:
                seen.add(threading.current_thread().name)
            time.sleep(0.05)
            return 0, {}

        run_sweep(list(range(4)), task, max_workers=4)
        assert len(seen) > 1

    def test_raising_job_recorded(self) -> None:
        def task(index: int, job: int) -> tuple[int, dict[str, Any]]:
            if job == 2:
                raise RuntimeError("diverged")
            return 0, {"value": job}

        result = run_sweep([1, 2, 3], task, max_workers=2)
        assert result.status == "completed_with_errors"
        assert result.rows_succeeded == 2
        failed = result.rows[1]
        assert failed.status == "failed"
        assert failed.exit_code == 3
        assert failed.error == "diverged"
        assert result.errors == [("run-001", "diverged")]

    def test_nonzero_exit_code(self) -> None:
        def task(index: int, job: int) -> tuple[int, dict[str, Any]]:
            return (2, {"error": "verification failed"}) if index == 0 else (0, {})

        result = run_sweep(["a", "b"], task)
        assert result.rows[0].exit_code == 2
        assert result.rows[0].error == "verification failed"
        assert result.rows[1].status == "ok"

    def test_to_dict(self) -> None:
        data = run_sweep([3], _square).to_dict()
        assert data["status"] == "completed"
        assert data["rows_total"] == 1
        assert data["rows"] == [{"index": 0, "status": "ok", "exit_code": 0, "error": None, "value": 9}]
