"""Resolvent growth of banded Toeplitz operators: curve geometry, zero divisors,
Wiener-Hopf factors, finite-section oracles and the rank-one machinery for m = 1."""

from .errors import (ConfigError, DomainError, HypothesisNotMet, NearCurve, NonConvergence, NotStabilized,
                     OnCurve, ToeplitzError)
from .symbol import LaurentSymbol, WienerSymbol, evaluate, wiener_norm

__version__ = "0.1.0"

__all__ = [
    "ConfigError", "DomainError", "HypothesisNotMet", "NearCurve", "NonConvergence", "NotStabilized",
    "OnCurve", "ToeplitzError", "LaurentSymbol", "WienerSymbol", "evaluate", "wiener_norm",
]
