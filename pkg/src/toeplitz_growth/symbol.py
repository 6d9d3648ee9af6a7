"""
Banded (Laurent polynomial) symbols and truncated Wiener-class symbols.

A Laurent symbol

    b(z) = b_{-m} z^{-m} + ... + b_0 + ... + b_k z^k

is stored as a dense coefficient array ``coeffs`` with ``coeffs[j + m] = b_j``.
The band edges are kept tight: ``b_{-m} != 0`` when ``m >= 1`` and
``b_k != 0`` when ``k >= 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import DomainError

# coefficients with modulus <= TRIM_RTOL * ||b||_W are dropped at the band edges
TRIM_RTOL = 1e-14


def _freeze(a):
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class LaurentSymbol:
    """Finitely supported Fourier coefficients b_{-m}, ..., b_k."""

    coeffs: np.ndarray
    m: int

    def __post_init__(self):
        c = _freeze(np.atleast_1d(self.coeffs))
        if c.ndim != 1 or c.size == 0:
            raise ValueError("coeffs must be a non-empty 1-d array")
        if self.m < 0 or self.m > c.size - 1:
            raise ValueError(f"m={self.m} incompatible with {c.size} coefficients")
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "m", int(self.m))
        if self.m >= 1 and c[0] == 0:
            raise ValueError("band edge b_{-m} must be nonzero")
        if self.k >= 1 and c[-1] == 0:
            raise ValueError("band edge b_k must be nonzero")

    # -- construction ---------------------------------------------------

    @classmethod
    def from_dict(cls, coeffs: Mapping[int, complex]) -> "LaurentSymbol":
        """Build from ``{index: coefficient}``; exact zeros are ignored."""
        items = {int(j): complex(c) for j, c in coeffs.items() if complex(c) != 0}
        if not items:
            return cls(np.zeros(1), 0)
        lo = min(min(items), 0)
        hi = max(max(items), 0)
        dense = np.zeros(hi - lo + 1, dtype=complex)
        for j, c in items.items():
            dense[j - lo] = c
        return cls(dense, -lo)

    @classmethod
    def from_array(cls, coeffs: Sequence[complex], m: int, rtol: float = TRIM_RTOL) -> "LaurentSymbol":
        """Build from a dense array, trimming negligible band-edge coefficients."""
        c = np.asarray(coeffs, dtype=complex)
        scale = np.abs(c).sum()
        thresh = rtol * scale
        lo, hi = 0, c.size - 1
        while lo < m and abs(c[lo]) <= thresh:
            lo += 1
        while hi > m and abs(c[hi]) <= thresh:
            hi -= 1
        return cls(c[lo:hi + 1].copy(), m - lo)

    # -- structure ------------------------------------------------------

    @property
    def k(self) -> int:
        return self.coeffs.size - 1 - self.m

    @property
    def degree(self) -> int:
        """Degree m + k of the polynomial z^m b(z)."""
        return self.coeffs.size - 1

    @property
    def is_two_sided(self) -> bool:
        return self.m >= 1 and self.k >= 1

    @property
    def is_constant(self) -> bool:
        return self.degree == 0

    def __getitem__(self, j: int) -> complex:
        if -self.m <= j <= self.k:
            return complex(self.coeffs[j + self.m])
        return 0j

    def items(self):
        """Yield ``(j, b_j)`` over the stored band."""
        for i, c in enumerate(self.coeffs):
            yield i - self.m, complex(c)

    def to_dict(self) -> dict:
        return {j: c for j, c in self.items() if c != 0}

    def __repr__(self):
        terms = " + ".join(f"({c:.6g})z^{j}" for j, c in self.items() if c != 0)
        return f"LaurentSymbol({terms or '0'})"

    # -- algebra --------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, LaurentSymbol):
            lo = max(self.m, other.m)
            hi = max(self.k, other.k)
            dense = np.zeros(lo + hi + 1, dtype=complex)
            dense[lo - self.m: lo + self.k + 1] += self.coeffs
            dense[lo - other.m: lo + other.k + 1] += other.coeffs
            return LaurentSymbol.from_array(dense, lo)
        dense = self.coeffs.copy()
        dense[self.m] += complex(other)
        return LaurentSymbol(dense, self.m)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, LaurentSymbol):
            return self + (-1.0) * other
        return self + (-complex(other))

    def __mul__(self, scalar):
        scalar = complex(scalar)
        if scalar == 0:
            return LaurentSymbol(np.zeros(1), 0)
        return LaurentSymbol(self.coeffs * scalar, self.m)

    __rmul__ = __mul__

    def __neg__(self):
        return -1.0 * self

    def poly_coeffs(self, w: complex = 0.0) -> np.ndarray:
        """Ascending coefficients of P(z, w) = z^m (b(z) - w)."""
        p = np.array(self.coeffs, dtype=complex)
        p[self.m] -= w
        return p

    def __call__(self, z):
        return evaluate(self, z)


def evaluate(b: LaurentSymbol, z):
    """Evaluate b at ``z`` (scalar or array) by a two-sided Horner scheme.

    The analytic part is summed in powers of z and the co-analytic part in
    powers of 1/z, so neither branch overflows for |z| far from 1.
    """
    z = np.asarray(z, dtype=complex)
    if b.m >= 1 and np.any(z == 0):
        raise DomainError("symbol with negative powers evaluated at z = 0")
    c = b.coeffs
    m = b.m
    pos = np.full(z.shape, c[-1], dtype=complex)
    for j in range(c.size - 2, m - 1, -1):
        pos = pos * z + c[j]
    if m:
        zi = 1.0 / z
        neg = np.full(z.shape, c[0], dtype=complex)
        for j in range(1, m):
            neg = neg * zi + c[j]
        pos = pos + neg * zi
    return pos if pos.ndim else complex(pos)


def derivative(b: LaurentSymbol) -> LaurentSymbol:
    """Termwise derivative b'(z); coefficient j*b_j moves to index j-1."""
    lo = b.m + 1 if b.m else 0
    hi = max(b.k - 1, 0)
    dense = np.zeros(lo + hi + 1, dtype=complex)
    for j, c in b.items():
        if j:
            dense[j - 1 + lo] = j * c
    return LaurentSymbol.from_array(dense, lo)


def wiener_norm(b: LaurentSymbol) -> float:
    """||b||_W = sum_j |b_j|."""
    return math.fsum(np.abs(b.coeffs))


def theta_lipschitz(b: LaurentSymbol) -> float:
    """Bound on |d/dtheta b(e^{i theta})|, namely sum_j |j| |b_j|."""
    idx = np.arange(-b.m, b.k + 1)
    return math.fsum(np.abs(idx * b.coeffs))


def theta_lipschitz2(b: LaurentSymbol) -> float:
    """Bound on the second theta-derivative, sum_j j^2 |b_j|."""
    idx = np.arange(-b.m, b.k + 1)
    return math.fsum(np.abs(idx * idx * b.coeffs))


def circle_points(n: int, offset: float = 0.0) -> tuple[np.ndarray, np.ndarray]:
    theta = offset + 2.0 * np.pi * np.arange(n) / n
    return theta, np.exp(1j * theta)


def sup_norm(b: LaurentSymbol, n_samples: int | None = None) -> float:
    """Certified upper bound for ||b||_inf on the unit circle.

    Returns the largest sampled modulus plus ``||b'||_W * pi / n_samples``;
    every point of the circle lies within pi/n of a sample in arc length.
    """
    n_min = 4 * max(b.degree, 1)
    if n_samples is None:
        n_samples = max(n_min, 4096)
    if n_samples < n_min:
        raise ValueError(f"n_samples must be >= 4(m+k) = {n_min}")
    _, t = circle_points(n_samples)
    sampled = float(np.max(np.abs(evaluate(b, t))))
    return sampled + theta_lipschitz(b) * math.pi / n_samples


@dataclass(frozen=True, eq=False)
class WienerSymbol:
    """b(t) = b_{-1}/t + sum_{j=0}^{J} b_j t^j, the truncation of a Wiener-class series.

    ``beta`` is the weighted sum sum_{j>=0} (j+1)|b_j| over the stored tail.
    """

    b_minus1: complex
    tail: np.ndarray
    beta: float = field(init=False)

    def __post_init__(self):
        if complex(self.b_minus1) == 0:
            raise ValueError("b_{-1} must be nonzero")
        tail = _freeze(np.atleast_1d(self.tail))
        object.__setattr__(self, "b_minus1", complex(self.b_minus1))
        object.__setattr__(self, "tail", tail)
        object.__setattr__(self, "beta", weighted_tail_sum(tail))

    @classmethod
    def from_laurent(cls, b: LaurentSymbol) -> "WienerSymbol":
        if b.m != 1:
            raise ValueError("Wiener symbols here have exactly one negative index (m = 1)")
        return cls(b[-1], np.array(b.coeffs[1:]))

    def extended(self, more: Sequence[complex]) -> "WienerSymbol":
        return WienerSymbol(self.b_minus1, np.concatenate([self.tail, np.asarray(more, dtype=complex)]))

    def as_laurent(self) -> LaurentSymbol:
        dense = np.concatenate([[self.b_minus1], self.tail])
        return LaurentSymbol.from_array(dense, 1)

    @property
    def J(self) -> int:
        return self.tail.size - 1

    def __call__(self, z):
        return evaluate(self.as_laurent(), z)


def weighted_tail_sum(tail) -> float:
    tail = np.asarray(tail)
    return math.fsum((np.arange(tail.size) + 1) * np.abs(tail))


def truncation_index(tail_fn, rtol: float = 1e-10, max_terms: int = 100_000) -> int:
    """Smallest J with the discarded weighted tail below ``rtol`` times the total.

    ``tail_fn(j)`` returns b_j for j >= 0 of a decaying series. Returns J such
    that sum_{j>J} (j+1)|b_j| < rtol * beta, estimated from the computed
    partial sums (the series is summed until terms are negligible).
    """
    weights = []
    total = 0.0
    for j in range(max_terms):
        term = (j + 1) * abs(tail_fn(j))
        weights.append(term)
        total += term
        if j > 8 and term < 1e-18 * max(total, 1e-300):
            break
    weights = np.array(weights)
    suffix = np.cumsum(weights[::-1])[::-1]
    beta = suffix[0]
    for J in range(len(weights)):
        rest = suffix[J + 1] if J + 1 < len(weights) else 0.0
        if rest < rtol * beta:
            return J
    return len(weights) - 1
