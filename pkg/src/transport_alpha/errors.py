"""Exception hierarchy shared by every module."""


class TransportAlphaError(Exception):
    """Base class for all library errors."""


class DomainError(TransportAlphaError, ValueError):
    """An argument lies outside the domain where the operation is defined."""


class SpecError(TransportAlphaError, ValueError):
    """A distribution or map description is malformed or inconsistent."""


class EstimationError(TransportAlphaError):
    """A statistical estimate could not be formed from the data."""


class NumericalError(TransportAlphaError, ArithmeticError):
    """A computation produced a non-finite or unresolved value.

    Parameters
    ----------
    message : str
        Human readable description.
    node : float, optional
        The quadrature node (or other abscissa) where the failure occurred.
    """

    def __init__(self, message, node=None):
        super().__init__(message)
        self.node = node
