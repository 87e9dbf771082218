"""Iteration budget tracking for the direct solvers."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum


class BudgetStatus(Enum):
    OK = "ok"
    WARNING = "warning"
    EXCEEDED = "exceeded"


@dataclass(frozen=True)
class BudgetSummary:
    """Counters accumulated by one solve."""

    iterations: int
    energy_evaluations: int
    max_iterations: int
    status: BudgetStatus

    def to_dict(self) -> dict:
        return {
            "iterations": self.iterations,
            "energy_evaluations": self.energy_evaluations,
            "max_iterations": self.max_iterations,
            "status": self.status.value,
        }


class IterationBudget:
    """Counts Newton iterations and action evaluations against max_iterations."""

    def __init__(self, max_iterations: int, warn_fraction: float = 0.8) -> None:
        self._max_iterations = max_iterations
        self._warn_at = warn_fraction * max_iterations
        self._iterations: int = 0
        self._evaluations: int = 0

    def record_iteration(self) -> None:
        self._iterations += 1

    def record_evaluation(self, count: int = 1) -> None:
        self._evaluations += count

    @property
    def iterations(self) -> int:
        return self._iterations

    def check(self) -> BudgetStatus:
        """OK below the warning fraction, WARNING past it, EXCEEDED at max_iterations."""
        if self._iterations >= self._max_iterations:
            return BudgetStatus.EXCEEDED
        if self._iterations >= self._warn_at:
            return BudgetStatus.WARNING
        return BudgetStatus.OK

    def summary(self) -> BudgetSummary:
        return BudgetSummary(
            iterations=self._iterations,
            energy_evaluations=self._evaluations,
            max_iterations=self._max_iterations,
            status=self.check(),
        )
