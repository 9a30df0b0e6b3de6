"""Exception hierarchy shared by all modules."""


class QrcError(Exception):
    """Base class for errors raised by this package."""


class DimensionError(QrcError, ValueError):
    """Operand shapes are incompatible."""


class DomainError(QrcError, ValueError):
    """An argument lies outside the domain of the operation."""


class NumericalError(QrcError, ArithmeticError):
    """A numerical routine failed to reach its accuracy target.

    Attributes
    ----------
    residual : float
        The last residual observed before giving up.
    """

    def __init__(self, message, residual=float("nan")):
        super().__init__(f"{message} (residual={residual:.3e})")
        self.residual = residual


class SingularMatrixError(QrcError, ArithmeticError):
    """A matrix that must be inverted is singular to working precision."""
