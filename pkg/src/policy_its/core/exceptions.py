"""Exception hierarchy for policy-its.

The CLI maps each family onto an exit code: data and configuration problems
exit with 2, numerical and convergence failures with 3, and an oracle
disagreement in ``validate`` with 4.
"""

from __future__ import annotations

from typing import TYPE_CHECKING, Any

if TYPE_CHECKING:
    from policy_its.validation.models import ValidationIssue


class PolicyITSError(Exception):
    """Base exception for all policy-its errors."""

    exit_code: int = 1


class DataValidationError(PolicyITSError):
    """Raised when input records or values violate the declared schema."""

    exit_code = 2

    def __init__(self, message: str, issues: list[ValidationIssue] | None = None) -> None:
        super().__init__(message)
        self.issues = issues or []

    def __str__(self) -> str:
        base = super().__str__()
        if not self.issues:
            return base
        shown = "; ".join(issue.describe() for issue in self.issues[:10])
        more = f" (+{len(self.issues) - 10} more)" if len(self.issues) > 10 else ""
        return f"{base}: {shown}{more}"


class ConfigError(PolicyITSError):
    """Raised when a run configuration cannot be loaded or is inconsistent."""

    exit_code = 2


class ArtifactError(PolicyITSError):
    """Raised when a fit artifact is missing or does not match the current data."""

    exit_code = 2


class NumericalError(PolicyITSError):
    """Non-finite value in the log-posterior or one of its derivatives."""

    exit_code = 3

    def __init__(self, message: str, term: str = "") -> None:
        super().__init__(message)
        self.term = term


class ConvergenceError(PolicyITSError):
    """Raised when an optimizer fails to reach its tolerance."""

    exit_code = 3

    def __init__(self, message: str, trace: list[dict[str, Any]] | None = None) -> None:
        super().__init__(message)
        self.trace = trace or []


class IndefiniteHessianError(ConvergenceError):
    """The negative Hessian at the reported mode is not positive definite."""


class OracleNotConvergedError(PolicyITSError):
    """MCMC chains did not mix well enough for an oracle comparison."""

    exit_code = 3

    def __init__(self, message: str, rhat: dict[str, float] | None = None) -> None:
        super().__init__(message)
        self.rhat = rhat or {}


class OracleDisagreementError(PolicyITSError):
    """Laplace posterior means fall outside the tolerance of the MCMC oracle."""

    exit_code = 4

    def __init__(self, message: str, offenders: dict[str, float] | None = None) -> None:
        super().__init__(message)
        self.offenders = offenders or {}


__all__ = [
    "PolicyITSError",
    "DataValidationError",
    "ConfigError",
    "ArtifactError",
    "NumericalError",
    "ConvergenceError",
    "IndefiniteHessianError",
    "OracleNotConvergedError",
    "OracleDisagreementError",
]
