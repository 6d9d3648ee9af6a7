"""
Finite sections T_N of T_b and their resolvent norms.

Entry (i, j) of T_N is b_{i-j}: column j holds the coefficients of b(t) t^j
truncated to degrees 0..N-1, which is T_b f = P_+(b f) on monomials. So
b_1 sits on the first subdiagonal and b_{-1} on the first superdiagonal.

||(T_N - w)^{-1}|| = 1 / sigma_min(T_N - w). The smallest singular value
comes from Lanczos on (A^H A)^{-1}, applied through a sparse LU of A, which
is inverse iteration with Krylov acceleration. For banded sections the
smallest eigenvalue of the banded Hermitian A^H A is cheapest of all; it is
trusted only while sigma_min is not too small relative to ||A|| (squaring
halves the accurate digits). Otherwise ``method="auto"`` falls back to a
dense SVD up to N = 512, which is immune to clustered singular values, and
to Lanczos beyond.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
from scipy.sparse.linalg import ArpackNoConvergence, LinearOperator, eigsh, splu

from .errors import SingularSection
from .symbol import LaurentSymbol, wiener_norm

SINGULAR_RTOL = 1e-14
DENSE_MAX_N = 512
# banded route accepted when lambda_min(A^H A) >= this * ||A||_1 ||A||_inf
BANDED_MIN_REL = 1e-8
AITKEN_MAX_RATIO = 0.6


@dataclass(frozen=True, eq=False)
class FiniteSection:
    N: int
    matrix: sp.csc_matrix
    symbol: LaurentSymbol

    @property
    def entries(self) -> np.ndarray:
        return self.matrix.toarray()


def toeplitz_section(b: LaurentSymbol, N: int) -> FiniteSection:
    if N < b.degree + 1:
        raise ValueError(f"N must be >= m + k + 1 = {b.degree + 1}")
    offsets, diags = [], []
    for j, c in b.items():
        if c != 0 and abs(j) < N:
            # b_j lives on the diagonal i - j_index = j, i.e. scipy offset -j
            offsets.append(-j)
            diags.append(np.full(N - abs(j), c))
    if not offsets:
        mat = sp.csc_matrix((N, N), dtype=complex)
    else:
        mat = sp.diags(diags, offsets, shape=(N, N), format="csc", dtype=complex)
    return FiniteSection(N, mat, b)


def _norm_upper(b: LaurentSymbol, w: complex) -> float:
    return wiener_norm(b) + abs(w)


def _banded_gram_min(A) -> tuple[float, float]:
    """(lambda_min(A^H A), ||A||_1 ||A||_inf) for a sparse banded A."""
    A = sp.csr_matrix(A)
    G = (A.conj().T @ A).tocsr()
    rows, cols = G.nonzero()
    n = A.shape[0]
    bw = int(np.max(np.abs(rows - cols))) if rows.size else 0
    ab = np.zeros((bw + 1, n), dtype=complex)
    for k in range(bw + 1):
        ab[bw - k, k:] = G.diagonal(k)
    lam = sla.eig_banded(ab, eigvals_only=True, select="i", select_range=(0, 0))[0]
    absA = abs(A)
    scale = float(absA.sum(axis=0).max() * absA.sum(axis=1).max())
    return float(lam), scale


def sigma_min(A, method: str = "lanczos", seed: int = 0, restarts: int = 3, tol: float = 1e-10) -> float:
    """Smallest singular value of a square matrix (sparse or dense).

    ``method`` is "lanczos" (sparse LU + Lanczos on (A^H A)^{-1}, best of
    ``restarts`` seeded random starts), "svd", "banded" or "auto".
    """
    n = A.shape[0]
    if method in ("auto", "banded") and sp.issparse(A) and n >= 4:
        lam, scale = _banded_gram_min(A)
        if method == "banded" or lam >= BANDED_MIN_REL * scale:
            return math.sqrt(max(lam, 0.0))
    if method == "banded":
        method = "svd"
    if method == "auto":
        method = "svd" if n <= DENSE_MAX_N else "lanczos"
    if method == "svd" or n < 4:
        dense = A.toarray() if sp.issparse(A) else np.asarray(A)
        return float(np.linalg.svd(dense, compute_uv=False)[-1])
    if method != "lanczos":
        raise ValueError(f"unknown method {method!r}")
    A = sp.csc_matrix(A)
    try:
        lu = splu(A, permc_spec="NATURAL")
    except RuntimeError as exc:
        raise SingularSection(f"LU factorization failed: {exc}") from exc

    def apply(x):
        return lu.solve(lu.solve(x, trans="H"))

    op = LinearOperator((n, n), matvec=apply, dtype=complex)
    rng = np.random.default_rng(seed)
    best = 0.0
    for _ in range(restarts):
        v0 = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        try:
            lam = eigsh(op, k=1, which="LA", v0=v0, tol=tol, ncv=min(n, 40), maxiter=50 * n,
                        return_eigenvectors=False)[0]
        except ArpackNoConvergence as exc:
            if len(exc.eigenvalues) == 0:
                continue
            lam = exc.eigenvalues[0]
        best = max(best, float(np.real(lam)))
    if not best > 0 or not math.isfinite(best):
        raise SingularSection("inverse iteration did not produce a positive eigenvalue")
    return 1.0 / math.sqrt(best)


def resolvent_norm(b: LaurentSymbol, w: complex, N: int, method: str = "auto", seed: int = 0) -> float:
    """||(T_N - w)^{-1}||_2.

    Raises SingularSection when sigma_min < 1e-14 ||T_N - w|| (using the
    Wiener-norm bound for the matrix norm).
    """
    A = toeplitz_section(b, N).matrix - complex(w) * sp.identity(N, dtype=complex, format="csc")
    s = sigma_min(A, method=method, seed=seed)
    if s < SINGULAR_RTOL * _norm_upper(b, w):
        raise SingularSection(f"T_N - w is numerically singular at w={w}, N={N}")
    return 1.0 / s


def extrapolate(values) -> float:
    """Limit estimate from norms at a doubling schedule.

    If the relative increments are all below 1% the last value is returned.
    Otherwise geometric (Aitken) extrapolation of the last three values is
    used, never going below the observed max. The step is only taken when
    the increment ratio q is at most AITKEN_MAX_RATIO: a doubling schedule
    gives q = 1/2 for O(1/N) convergence (0.6 leaves room for rounding),
    and q near 1 means the sequence is not yet asymptotic and 1/(1-q)
    would amplify noise.
    """
    v = np.asarray(values, dtype=float)
    top = float(v.max())
    inc = np.diff(v)
    if np.all(np.abs(inc) < 0.01 * np.abs(v[1:])):
        return float(v[-1])
    d1, d2 = inc[-2], inc[-1]
    if d1 != 0:
        q = d2 / d1
        if 0 < q <= AITKEN_MAX_RATIO:
            return max(top, float(v[-1] + d2 * q / (1 - q)))
    return top


@dataclass
class ResolventSample:
    w: complex
    dist: float
    norm_estimates: list
    extrapolated: float
    krein: float | None = None
    lrg_ratio: float = field(init=False)
    qrg_ratio: float = field(init=False)

    def __post_init__(self):
        self.lrg_ratio = self.dist * self.extrapolated
        self.qrg_ratio = self.dist ** 2 * self.extrapolated / (self.dist + 1)

    @property
    def norm_max(self) -> float:
        return max(v for _, v in self.norm_estimates)


def resolvent_norm_extrapolated(b: LaurentSymbol, w: complex, schedule=(100, 200, 400), dist: float | None = None,
                                seed: int = 0, method: str = "auto") -> ResolventSample:
    schedule = tuple(int(n) for n in schedule)
    if len(schedule) < 3 or any(b2 <= a for a, b2 in zip(schedule, schedule[1:])):
        raise ValueError("schedule must be strictly increasing with at least 3 entries")
    if dist is None:
        from .curvegeom import distance_to_spectrum
        dist = distance_to_spectrum(b, w)
    est = [(N, resolvent_norm(b, w, N, method=method, seed=seed)) for N in schedule]
    return ResolventSample(complex(w), float(dist), est, extrapolate([v for _, v in est]))


def lower_bound_check(sample: ResolventSample, slack: float = 0.05) -> bool:
    """extrapolated >= (1 - slack) / dist."""
    return sample.extrapolated * sample.dist >= 1 - slack
