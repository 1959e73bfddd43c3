"""Exception types shared across the package."""


class RandcohError(Exception):
    """Base class for all package-specific errors."""


class ParameterError(RandcohError, ValueError):
    """An argument violates a documented precondition."""


class DomainError(RandcohError, ValueError):
    """A numeric input lies outside the mathematical domain of a functional."""


class NumericalError(RandcohError, ArithmeticError):
    """A numeric routine failed to converge or produced an invalid result."""
