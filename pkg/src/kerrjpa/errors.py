"""Exception hierarchy shared by every module of the package."""


class KerrJPAError(Exception):
    """Base class for all package errors."""


class DomainError(KerrJPAError, ValueError):
    """An input lies outside the domain of an operation.

    ``field`` names the offending parameter when one can be singled out.
    """

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class SingularityError(KerrJPAError, ArithmeticError):
    """A formula is evaluated at (or numerically on top of) a pole."""


class ConvergenceError(KerrJPAError, RuntimeError):
    """An iterative search could not establish or shrink its bracket."""


class DivergenceError(KerrJPAError, RuntimeError):
    """A time-domain trajectory blew up."""


class NoSettleError(KerrJPAError, RuntimeError):
    """A time-domain trajectory did not reach steady state within the horizon."""


class LinearityError(KerrJPAError, RuntimeError):
    """A probe measurement depends on the probe amplitude."""


class ParseError(KerrJPAError, ValueError):
    """Malformed run configuration."""

    def __init__(self, message, key=None, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.key = key
        self.line = line


class ConflictError(ParseError):
    """Mutually exclusive configuration keys were both given."""
