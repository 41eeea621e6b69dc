"""Exception hierarchy shared by all modules."""


class InfoContribError(Exception):
    """Base class for every error raised by this package."""


class DistributionError(InfoContribError, ValueError):
    """Invalid joint distribution or invalid operation on one."""


class ParseError(DistributionError):
    """Malformed distribution file or notation string."""


class NormalizationError(ParseError):
    """Probabilities do not sum to one within the strict tolerance."""


class StateSpaceTooLarge(DistributionError):
    """The dense table would exceed the configured state cap."""


class AbsoluteContinuityError(InfoContribError, ArithmeticError):
    """KL divergence requested where p(z) > 0 but q(z) = 0."""


class ConvergenceError(InfoContribError, RuntimeError):
    """Iterative scaling did not reach the requested tolerance."""

    def __init__(self, message, *, sweeps=None, gap=None, node=None):
        super().__init__(message)
        self.sweeps = sweeps
        self.gap = gap
        self.node = node


class ConstraintInconsistencyError(InfoContribError, ValueError):
    """No distribution satisfies the requested marginal constraints."""


class LatticeError(InfoContribError, ValueError):
    """Invalid face, complex, edge or lattice request."""


class GameError(InfoContribError, ValueError):
    """Incomplete or malformed cooperative game."""
