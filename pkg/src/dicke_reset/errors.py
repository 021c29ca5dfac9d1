"""Exception types raised across the package."""


class DickeResetError(Exception):
    """Base class for all package errors."""


class DomainError(DickeResetError, ValueError):
    """An argument lies outside the domain of an operation."""


class IntegrationError(DickeResetError):
    """The integrator could not reach the end of the protocol.

    The trajectory accumulated up to the failure is kept on ``partial``.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class IntegrityError(DickeResetError):
    """A conserved quantity (normalization, trace, positivity) drifted too far."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class UndefinedResetFactor(DickeResetError, ZeroDivisionError):
    """The reset factor is undefined because no reset progress was made (eps = 1/2)."""


class InconsistencyError(DickeResetError):
    """Observables contradict each other, e.g. zero entropy production with D > 0."""
