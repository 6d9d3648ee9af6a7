"""Exception hierarchy shared by all modules."""


class ToeplitzError(Exception):
    """Base class for errors raised by this package."""


class DomainError(ToeplitzError, ValueError):
    """Argument outside the domain of a symbol (e.g. z = 0 with m >= 1)."""


class HypothesisNotMet(ToeplitzError, ValueError):
    """Structural precondition of a criterion does not hold for the symbol."""


class OnCurve(ToeplitzError):
    """The query point could not be certified to lie off the symbol curve."""


class NearCurve(ToeplitzError):
    """The symbol minus w is too small on the circle for the requested transform."""


class NonConvergence(ToeplitzError):
    """An iterative solver stopped before meeting its tolerance."""

    def __init__(self, msg, best_residual=None):
        super().__init__(msg)
        self.best_residual = best_residual


class ReconstructionFailure(ToeplitzError):
    """Wiener-Hopf factors do not reproduce b - w to the required accuracy."""


class NotStabilized(ToeplitzError):
    """A refinement sequence did not settle within the allowed number of levels."""

    def __init__(self, msg, trace=None):
        super().__init__(msg)
        self.trace = trace


class SingularSection(ToeplitzError):
    """A finite section T_N - w is numerically singular."""


class MultiplicityError(ToeplitzError):
    """Unexpected number of interior roots."""


class DerivativeVanishes(ToeplitzError):
    """P'(zeta0, w) is numerically zero."""


class DenominatorVanishes(ToeplitzError):
    """1 - b_{-1} a_1 is numerically zero."""


class ConfigError(ToeplitzError, ValueError):
    """Malformed symbol literal or scan configuration."""
