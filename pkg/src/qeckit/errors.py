"""Exception types shared across the package."""


class QecError(Exception):
    """Base class for library-specific failures."""


class CapacityError(QecError):
    """Requested dimension exceeds the supported dense-algebra cap."""


class NotAStateError(QecError, ValueError):
    """Matrix fails the density-matrix requirements (e.g. negative eigenvalue)."""


class NotSuperoperatorError(QecError, ValueError):
    """Operator family does not satisfy the completeness relation."""


class NotCorrectableError(QecError):
    """Code cannot correct the given interaction family.

    Carries the diagnostic report (``KLReport`` or a residual summary) that
    triggered the failure, when available.
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report
