"""Random symbol generators shared by the tests."""

import numpy as np

from toeplitz_growth.curvegeom import distance_to_curve, in_resolvent_set
from toeplitz_growth.symbol import LaurentSymbol, WienerSymbol, sup_norm


def cnormal(rng, size=None):
    return rng.standard_normal(size) + 1j * rng.standard_normal(size)


def random_symbol(rng, max_m=3, max_k=3) -> LaurentSymbol:
    m, k = int(rng.integers(1, max_m + 1)), int(rng.integers(1, max_k + 1))
    return LaurentSymbol(cnormal(rng, m + k + 1), m)


def random_strict_symbol(rng, max_m=3, max_k=3) -> LaurentSymbol:
    """b_1 dominates the weighted sum of the rest, so b is LJ (hence regular)."""
    m, k = int(rng.integers(1, max_m + 1)), int(rng.integers(1, max_k + 1))
    c = cnormal(rng, m + k + 1)
    j = np.arange(-m, k + 1)
    rest = abs(c[j == -1][0]) + sum(abs(jj) * abs(cc) for jj, cc in zip(j, c) if abs(jj) >= 2)
    i1 = m + 1
    c[i1] = rest * rng.uniform(1.2, 2.0) * np.exp(2j * np.pi * rng.uniform())
    return LaurentSymbol(c, m)


def random_wiener(rng, J=30, decay=0.5, beta_max=10.0) -> WienerSymbol:
    """m = 1 symbol with geometrically decaying tail and beta <= beta_max."""
    while True:
        tail = cnormal(rng, J + 1) * decay ** np.arange(J + 1)
        ws = WienerSymbol(complex(cnormal(rng)), tail)
        if ws.beta <= beta_max:
            return ws


def random_resolvent_points(rng, b: LaurentSymbol, count: int, min_dist=1e-3, radius=None):
    """``count`` random w in the resolvent set, at least ``min_dist`` from the curve."""
    R = radius or 1.5 * sup_norm(b)
    out = []
    while len(out) < count:
        w = complex(R * np.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform()))
        if in_resolvent_set(b, w) and distance_to_curve(b, w)[0] >= min_dist:
            out.append(w)
    return out
