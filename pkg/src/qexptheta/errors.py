"""Exception hierarchy shared by all modules."""


class QThetaError(Exception):
    """Base class for errors raised by this package."""


class DomainError(QThetaError, ValueError):
    """An argument lies outside the domain of the operation."""


class SingularityError(QThetaError, ZeroDivisionError):
    """A finite q-shifted factorial hit a vanishing denominator factor."""


class PrecisionError(QThetaError, ArithmeticError):
    """An input descriptor does not carry enough bits for the request."""


class PrecisionInsufficientError(PrecisionError):
    """A residual sits at the noise floor even after one precision escalation."""


class InsufficientDataError(QThetaError, ValueError):
    """Too few reports to form an estimate."""
