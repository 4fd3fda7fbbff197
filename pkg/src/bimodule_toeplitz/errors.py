"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class BimoduleError(Exception):
    """Base class for all errors raised by this package."""


class StructuralError(BimoduleError, ValueError):
    """Mismatched owners, shapes or algebras."""


class InvalidModuleError(BimoduleError):
    """A Gram form or structure tensor violates positivity."""


class AxiomViolationError(BimoduleError):
    """Validation of a bimodule failed.

    ``failed`` holds the names of the offending checks, ``report`` the full
    validation report.
    """

    def __init__(self, failed, report=None):
        self.failed = list(failed)
        self.report = report
        super().__init__("axiom violation: " + ", ".join(self.failed))


class OutOfRangeError(BimoduleError, IndexError):
    """A ladder level or window index lies outside the constructed range."""


class NotAdjointableError(BimoduleError):
    """The computed adjoint is not a module map."""


class FullnessError(BimoduleError):
    """The unit is not in the span of the inner products."""


class NotCreationOperatorError(BimoduleError):
    """A map could not be reconstructed from its extracted symbol."""

    def __init__(self, residual):
        self.residual = residual
        super().__init__(f"reconstruction residual {residual:.3e} exceeds tolerance")


class NotToeplitzError(BimoduleError):
    """Symbols extracted along a diagonal disagree."""

    def __init__(self, report):
        self.report = report
        super().__init__(
            f"diagonal spread {report.max_spread:.3e} at k={report.worst_diagonal}"
        )
