"""Exception hierarchy shared by every module.

Each class carries the process exit code the command line maps it to.
"""


class ArtifactError(Exception):
    exit_code = 1


class DomainError(ArtifactError, ValueError):
    """An argument lies outside the domain of the operation."""

    exit_code = 2


class UnsupportedError(DomainError):
    """A parameter combination the library deliberately does not handle."""


class BranchAmbiguousError(DomainError):
    """A point on a branch cut was given without a side selector."""


class StepSingularError(DomainError):
    """The linear system of a Schlesinger step is singular at this s."""

    def __init__(self, message, condition=None):
        super().__init__(message)
        self.condition = condition


class NotOneCutError(DomainError):
    """The equilibrium problem has no regular one-cut solution with 0 inside."""


class PrecisionExhaustedError(ArtifactError, ArithmeticError):
    """The requested accuracy could not be reached at the allowed precision."""

    exit_code = 3


class QuadratureFailedError(PrecisionExhaustedError):
    def __init__(self, message, error_estimate=None):
        super().__init__(message)
        self.error_estimate = error_estimate


class IntegrationFailedError(PrecisionExhaustedError):
    def __init__(self, message, location=None):
        super().__init__(message)
        self.location = location


class InternalConsistencyError(ArtifactError, AssertionError):
    """An identity that must hold exactly was violated beyond rounding."""

    exit_code = 4
