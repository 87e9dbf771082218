"""Exception hierarchy for the hetero-bi engine.

Report-style operations (hypothesis checks, verification, sweeps) return
dataclasses instead of raising; everything else raises one of these.
"""

from __future__ import annotations

from typing import Any


class HeteroBiError(Exception):
    """Base class for all engine errors."""


class ParameterError(HeteroBiError, ValueError):
    """Raised when a numeric parameter is outside its admissible range."""


class KernelDomainError(ParameterError):
    """Raised when a slope with |s| > 1 reaches the relativistic kernel."""


class KernelSingularityError(ParameterError):
    """Raised when the flux is requested at |s| >= 1."""


class ProfileError(ParameterError):
    """Raised for malformed profiles or slope violations on a cell."""


class UnsupportedGridError(ProfileError):
    """Raised when an operation needs a uniform grid and gets another one."""


class SurgeryError(ProfileError):
    """Raised when an excision junction does not match in value."""


class PotentialError(ParameterError):
    """Raised when a potential fails construction or domain checks."""


class WeightError(ParameterError):
    """Raised when weight parameters contradict the advertised hypotheses."""


class ExpressionError(ParameterError):
    """Raised when a config expression is rejected by the grammar."""


class SolverConfigError(ParameterError):
    """Raised when a SolverConfig invariant fails.

    Attributes:
        field: Name of the offending config field.
        message: The explanation without the field prefix.
    """

    def __init__(self, field: str, message: str) -> None:
        super().__init__(f"{field}: {message}")
        self.field = field
        self.message = message


class HypothesisError(HeteroBiError):
    """Raised when a solver precondition on hypothesis flags does not hold."""


class DegenerateWellError(HeteroBiError):
    """Raised when the quadrature integrand is singular inside the transition."""


class IntegrationError(HeteroBiError):
    """Raised when a phase-flow step underflows or leaves the finite range."""


class NonConvergenceError(HeteroBiError):
    """Raised when the iteration budget runs out before convergence.

    Attributes:
        best: Best iterate found, as a Profile.
        diagnostics: Solver diagnostics at the time of failure.
    """

    def __init__(self, message: str, best: Any, diagnostics: Any) -> None:
        super().__init__(message)
        self.best = best
        self.diagnostics = diagnostics


class ConfigError(HeteroBiError):
    """Raised when a run configuration is unreadable or invalid.

    Attributes:
        field: Dotted name of the offending field ("" when the file itself is bad).
        message: The explanation without the field prefix.
    """

    def __init__(self, field: str, message: str) -> None:
        super().__init__(f"{field}: {message}" if field else message)
        self.field = field
        self.message = message
