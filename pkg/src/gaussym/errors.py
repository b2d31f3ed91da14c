"""Exception and warning types raised by gaussym."""


class GaussymError(Exception):
    """Base class for all gaussym errors."""


class InvalidState(GaussymError, ValueError):
    """A correlation matrix violates hermiticity, antisymmetry or physicality."""


class SingularSigma(GaussymError, ValueError):
    """Relative entropy diverges: the reference state is pure where the other is not."""


class NotUnitary(GaussymError, ValueError):
    pass


class DomainError(GaussymError, ValueError):
    pass


class DimensionMismatch(GaussymError, ValueError):
    pass


class InvalidSubsystem(GaussymError, ValueError):
    pass


class InvalidRange(GaussymError, ValueError):
    pass


class QuadratureFailure(GaussymError, RuntimeError):
    pass


class SingularDeterminant(GaussymError, ArithmeticError):
    """The FCS determinant vanished or lost all precision."""

    def __init__(self, message, eigenvalue=None):
        super().__init__(message)
        self.eigenvalue = eigenvalue


class StencilInstability(GaussymError, ValueError):
    pass


class ValidationFailure(GaussymError, RuntimeError):
    pass


class FormatError(GaussymError, ValueError):
    pass


class ConfigError(GaussymError, ValueError):
    pass


class DegenerateMode(UserWarning):
    """Eigenvalues of a pure mode were clipped before taking a logarithm."""


class DivergentAmplitude(UserWarning):
    """A pair amplitude was capped because the occupation reached one."""
