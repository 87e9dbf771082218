"""Parameter sweeps: run independent jobs on a thread pool, merge rows in input order.

Jobs share nothing mutable; each writes its own output directory. A job
that raises is recorded as a failed row and never stops the sweep.
"""

from __future__ import annotations

import logging
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from typing import Any, TypeVar

logger = logging.getLogger(__name__)

T = TypeVar("T")


@dataclass(frozen=True)
class SweepRow:
    """Outcome of one sweep job.

    Attributes:
        index: Position of the job in the input list.
        status: "ok" or "failed".
        exit_code: Exit code the job would have had as a standalone run.
        metrics: Job metrics (action, max slope, residuals...).
        error: Failure message, None for successful rows.
    """

    index: int
    status: str
    exit_code: int
    metrics: dict[str, Any] = field(default_factory=dict)
    error: str | None = None

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "status": self.status,
            "exit_code": self.exit_code,
            "error": self.error,
            **self.metrics,
        }


@dataclass(frozen=True)
class SweepResult:
    """Result of a sweep.

    Attributes:
        status: "completed" or "completed_with_errors".
        rows: One row per job, ordered by input index.
        errors: (row name, message) for failed rows.
        rows_total: Number of jobs.
        rows_succeeded: Jobs with status "ok".
    """

    status: str
    rows: tuple[SweepRow, ...]
    errors: list[tuple[str, str]]
    rows_total: int
    rows_succeeded: int

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "rows_total": self.rows_total,
            "rows_succeeded": self.rows_succeeded,
            "rows": [r.to_dict() for r in self.rows],
        }


def run_sweep(
    jobs: Sequence[T],
    task: Callable[[int, T], tuple[int, dict[str, Any]]],
    max_workers: int = 1,
) -> SweepResult:
    """Run task(index, job) for every job and collect the rows.

    Args:
        jobs: Job descriptions, e.g. RunConfig objects.
        task: Returns (exit_code, metrics); exit code 0 marks the row ok.
        max_workers: Thread pool size.
    """
    if not jobs:
        return SweepResult(status="completed", rows=(), errors=[], rows_total=0, rows_succeeded=0)

    workers = max(1, min(max_workers, len(jobs)))
    logger.info("Sweep: %d run(s), workers=%d", len(jobs), workers)
    rows: dict[int, SweepRow] = {}
    errors: list[tuple[str, str]] = []

    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = {pool.submit(task, i, job): i for i, job in enumerate(jobs)}
        for future in as_completed(futures):
            index = futures[future]
            name = f"run-{index:03d}"
            try:
                code, metrics = future.result()
            except Exception as exc:
                logger.error("Sweep row %s failed: %s", name, exc)
                rows[index] = SweepRow(index=index, status="failed", exit_code=3, error=str(exc))
                errors.append((name, str(exc)))
                continue
            if code == 0:
                rows[index] = SweepRow(index=index, status="ok", exit_code=0, metrics=metrics)
            else:
                message = metrics.get("error") or f"exit code {code}"
                logger.error("Sweep row %s failed: %s", name, message)
                rows[index] = SweepRow(index=index, status="failed", exit_code=code, metrics=metrics, error=message)
                errors.append((name, message))
            logger.info("Sweep progress: %d/%d", len(rows), len(jobs))

    ordered = tuple(rows[i] for i in range(len(jobs)))
    errors.sort()
    succeeded = sum(1 for r in ordered if r.status == "ok")
    return SweepResult(
        status="completed" if not errors else "completed_with_errors",
        rows=ordered,
        errors=errors,
        rows_total=len(ordered),
        rows_succeeded=succeeded,
    )
