"""
Resolvent bound for symbols b(t) = b_{-1}/t + sum_{j>=0} b_j t^j.

With a = 1/(b - w), the Toeplitz-Hankel identity T_{uv} = T_u T_v + H_u H_{v~}
gives T_a T_{b-w} = B = I - <., e_1> phi, phi = b_{-1}(a_1, a_2, ...), hence

    (T_b - w)^{-1} = B^{-1} T_a,
    B^{-1} = I + <., e_1> phi / (1 - b_{-1} a_1),
    ||(T_b - w)^{-1}|| <= (1 + ||phi|| / |1 - b_{-1} a_1|) / dist(w, b(T)).

a_1 also follows from residues of 1/(z P(z, w)) at 0 and at the single root
zeta_0 of P(., w) in the disk, which gives an FFT-independent cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .curvegeom import distance_to_curve, in_resolvent_set
from .errors import DenominatorVanishes, DerivativeVanishes, HypothesisNotMet, MultiplicityError, NearCurve
from .oracle import resolvent_norm_extrapolated
from .roots import polyroots
from .symbol import LaurentSymbol, WienerSymbol, evaluate, sup_norm

NEAR_CURVE_TOL = 1e-10
POLE_NEGLIGIBLE = 1e-15


def _as_wiener(b) -> WienerSymbol:
    if isinstance(b, WienerSymbol):
        return b
    if isinstance(b, LaurentSymbol):
        return WienerSymbol.from_laurent(b)
    raise TypeError("expected a WienerSymbol or a LaurentSymbol with m = 1")


def _p_coeffs(b: WienerSymbol, w: complex) -> np.ndarray:
    """Ascending coefficients of P(z, w) = b_{-1} + (b_0 - w) z + b_1 z^2 + ..."""
    p = np.concatenate([[b.b_minus1], b.tail]).astype(complex)
    p[1] -= w
    # drop vanishing top coefficients so the root finder sees the true degree
    nz = np.flatnonzero(p)
    return p[:nz[-1] + 1]


def _p_prime(p: np.ndarray, z: complex) -> complex:
    j = np.arange(1, p.size)
    return complex(np.polyval((j * p[1:])[::-1], z))


@dataclass(frozen=True, eq=False)
class CoeffWindow:
    """Fourier coefficients a_j(w), -n/2 <= j < n/2, of a = 1/(b - w).

    Poles of a = t/P(t) closer to the circle than the transform can resolve
    are removed before the FFT and restored in closed form, so
    ``coef(j)`` is accurate for every j, not only inside the window.
    """

    n: int
    remainder: np.ndarray  # FFT coefficients of the smooth part, index j at j % n
    poles: np.ndarray
    residues: np.ndarray
    aliasing_bound: float

    def _pole_coef(self, j: int) -> complex:
        out = 0j
        for p, r in zip(self.poles, self.residues):
            if abs(p) < 1 and j <= -1:
                out += r * p ** (-j - 1)
            elif abs(p) > 1 and j >= 0:
                out += -r * p ** (-j - 1)
        return out

    def coef(self, j: int) -> complex:
        base = self.remainder[j % self.n] if -self.n // 2 <= j < self.n // 2 else 0j
        return complex(base) + self._pole_coef(j)

    def __getitem__(self, j: int) -> complex:
        return self.coef(j)

    def positive(self, count: int) -> np.ndarray:
        """a_1, ..., a_count."""
        return np.array([self.coef(j) for j in range(1, count + 1)])

    def evaluate(self, t):
        t = np.asarray(t, dtype=complex)
        h = self.n // 2
        idx = np.arange(-h, h)
        rem = self.remainder[idx % self.n]
        out = (rem[None, :] * t.reshape(-1, 1) ** idx[None, :]).sum(axis=1).reshape(t.shape)
        for p, r in zip(self.poles, self.residues):
            out = out + r / (t - p)
        return out

    def positive_sq_norm(self) -> float:
        """sum_{j >= 1} |a_j|^2, with the pole tails beyond the window summed exactly."""
        h = self.n // 2
        head = sum(abs(self.coef(j)) ** 2 for j in range(1, h))
        ext = [(p, r) for p, r in zip(self.poles, self.residues) if abs(p) > 1]
        tail = 0j
        for p, r in ext:
            for q, s in ext:
                x = 1.0 / (p * np.conj(q))
                tail += r * np.conj(s) * x ** (h + 1) / (1 - x)
        # the FFT remainder beyond h is below the aliasing bound
        return float(head + max(tail.real, 0.0))


def inverse_symbol_coeffs(b, w: complex, n_fft: int = 1024, subtract_poles: bool = True) -> CoeffWindow:
    """Fourier coefficients of 1/(b(t) - w) from ``n_fft`` samples on the circle.

    Requires w off the curve (raises NearCurve if min |b(t) - w| over the
    samples is below 1e-10). Winding zero is not needed for the transform.
    """
    b = _as_wiener(b)
    if n_fft < 1024 or n_fft & (n_fft - 1):
        raise ValueError("n_fft must be a power of two >= 1024")
    t = np.exp(2j * np.pi * np.arange(n_fft) / n_fft)
    bw = b(t) - w
    if np.min(np.abs(bw)) < NEAR_CURVE_TOL:
        raise NearCurve(f"min |b(t) - w| below {NEAR_CURVE_TOL:g} at w={w}")
    vals = 1.0 / bw
    p = _p_coeffs(b, w)
    poles = polyroots(p) if p.size > 1 else np.zeros(0, dtype=complex)
    residues = np.array([z / _p_prime(p, z) for z in poles])
    h = n_fft // 2
    decay = np.where(np.abs(poles) < 1, np.abs(poles), 1.0 / np.abs(poles)) ** h
    near = decay > POLE_NEGLIGIBLE if subtract_poles else np.zeros(poles.size, dtype=bool)
    smooth = vals.copy()
    for z, r in zip(poles[near], residues[near]):
        smooth -= r / (t - z)
    remainder = np.fft.fft(smooth) / n_fft
    far = ~near
    alias = float(np.sum(np.abs(residues[far]) * decay[far] / np.maximum(1 - decay[far] ** (2.0 / h), 1e-300)))
    return CoeffWindow(n_fft, remainder, poles[near], residues[near], alias)


def zeta0_root(b, w: complex) -> complex:
    """The single root of P(., w) in the open unit disk."""
    b = _as_wiener(b)
    z = polyroots(_p_coeffs(b, w))
    inside = z[np.abs(z) < 1]
    if inside.size != 1:
        raise MultiplicityError(f"expected one root of P in the disk at w={w}, found {inside.size}")
    return complex(inside[0])


def a1_by_residue(b, w: complex, zeta0: complex | None = None) -> complex:
    """a_1 = 1/b_{-1} + 1/(zeta_0 P'(zeta_0, w))."""
    b = _as_wiener(b)
    z0 = zeta0_root(b, w) if zeta0 is None else zeta0
    dp = _p_prime(_p_coeffs(b, w), z0)
    if abs(dp) < 1e-12:
        raise DerivativeVanishes(f"|P'(zeta_0, w)| = {abs(dp):.3e} at w={w}")
    return 1.0 / b.b_minus1 + 1.0 / (z0 * dp)


@dataclass
class RankOneInverse:
    """B = I - <., e_1> phi on C^N and its explicit inverse."""

    phi: np.ndarray
    denom: complex
    phi_norm: float
    norm_bound: float

    def apply_B(self, x):
        x = np.asarray(x, dtype=complex)
        return x - np.multiply.outer(self.phi, x[0]) if x.ndim > 1 else x - x[0] * self.phi

    def apply(self, x):
        x = np.asarray(x, dtype=complex)
        if x.ndim > 1:
            return x + np.multiply.outer(self.phi, x[0]) / self.denom
        return x + x[0] * self.phi / self.denom

    def matrix(self) -> np.ndarray:
        B = np.eye(self.phi.size, dtype=complex)
        B[:, 0] -= self.phi
        return B


def b_inverse_rank_one(b, w: complex, trunc_N: int = 256, window: CoeffWindow | None = None) -> RankOneInverse:
    """B^{-1} as identity plus a rank-one term, and 1 + ||phi|| / |1 - b_{-1} a_1|.

    ``phi_norm`` covers all positive indices, not only the first ``trunc_N``.
    """
    b = _as_wiener(b)
    win = window or inverse_symbol_coeffs(b, w)
    phi = b.b_minus1 * win.positive(trunc_N)
    denom = 1 - phi[0]
    if abs(denom) < 1e-14:
        raise DenominatorVanishes(f"1 - b_(-1) a_1 vanishes at w={w}")
    phi_norm = abs(b.b_minus1) * math.sqrt(win.positive_sq_norm())
    return RankOneInverse(phi, denom, phi_norm, 1 + phi_norm / abs(denom))


def b_matrix_via_toeplitz(b, w: complex, N: int, window: CoeffWindow | None = None) -> np.ndarray:
    """Leading N x N block of T_a T_{b-w}, computed as a plain matrix product.

    T_{b-w} has one superdiagonal and J + 1 subdiagonals, so the block only
    needs columns 0..N+J of T_a.
    """
    b = _as_wiener(b)
    win = window or inverse_symbol_coeffs(b, w)
    L = N + b.J + 1
    idx = np.arange(-(L - 1), N)
    a = np.array([win.coef(int(j)) for j in idx])
    I, J = np.meshgrid(np.arange(N), np.arange(L), indexing="ij")
    Ta = a[(I - J) + (L - 1)]
    Tb = np.zeros((L, N), dtype=complex)
    c = np.concatenate([[b.b_minus1], b.tail]).astype(complex)
    c[1] -= w
    for off, val in enumerate(c, start=-1):
        # entry (i, j) = (b - w)_{i - j}
        rows = np.arange(N) + off
        ok = (rows >= 0) & (rows < L)
        Tb[rows[ok], np.arange(N)[ok]] = val
    return Ta @ Tb


@dataclass
class QRGRecord:
    w: complex
    dist: float
    zeta0: complex
    a1_residue: complex
    a1_fft: complex
    phi_norm: float
    denom: complex
    B_inv_norm_bound: float
    qrg_bound: float
    p_prime_abs: float
    beta: float
    case: str
    envelope: float
    a_coeffs: dict = field(default_factory=dict)
    aliasing_bound: float = 0.0

    def to_json(self) -> dict:
        cx = lambda z: [z.real, z.imag]
        return {
            "w": cx(self.w),
            "dist": self.dist,
            "zeta0": cx(self.zeta0),
            "a1_residue": cx(self.a1_residue),
            "a1_fft": cx(self.a1_fft),
            "phi_norm": self.phi_norm,
            "denom": cx(self.denom),
            "B_inv_norm_bound": self.B_inv_norm_bound,
            "qrg_bound": self.qrg_bound,
            "p_prime_abs": self.p_prime_abs,
            "beta": self.beta,
            "case": self.case,
            "envelope": self.envelope,
            "aliasing_bound": self.aliasing_bound,
            "a_coeffs": {str(j): cx(v) for j, v in self.a_coeffs.items()},
        }


def qrg_bound(b, w: complex, n_fft: int = 1024, dist: float | None = None) -> QRGRecord:
    """||(T_b - w)^{-1}|| <= ||B^{-1}|| / dist, with ||B^{-1}|| from the rank-one formula.

    ``envelope`` is the coefficient-only bound (1 + (|w| + beta)/dist)/dist;
    ``case`` is "far" when |w| >= 2||b||_inf and "near" otherwise.
    """
    b = _as_wiener(b)
    w = complex(w)
    lb = b.as_laurent()
    if not in_resolvent_set(lb, w):
        raise HypothesisNotMet(f"w={w} is not in the resolvent set")
    if dist is None:
        dist, _, _ = distance_to_curve(lb, w)
    win = inverse_symbol_coeffs(b, w, n_fft)
    z0 = zeta0_root(b, w)
    a1r = a1_by_residue(b, w, z0)
    inv = b_inverse_rank_one(b, w, window=win)
    dp = abs(_p_prime(_p_coeffs(b, w), z0))
    case = "far" if abs(w) >= 2 * sup_norm(lb) else "near"
    return QRGRecord(
        w=w,
        dist=dist,
        zeta0=z0,
        a1_residue=a1r,
        a1_fft=win.coef(1),
        phi_norm=inv.phi_norm,
        denom=inv.denom,
        B_inv_norm_bound=inv.norm_bound,
        qrg_bound=inv.norm_bound / dist,
        p_prime_abs=dp,
        beta=b.beta,
        case=case,
        envelope=(1 + (abs(w) + b.beta) / dist) / dist,
        a_coeffs={j: win.coef(j) for j in range(-4, 9)},
        aliasing_bound=win.aliasing_bound,
    )


TRACE_COLUMNS = ("dist", "qrg_bound", "oracle_norm", "ratio")


def support_point(b: LaurentSymbol, angle: float, n: int = 1 << 16) -> complex:
    """Point of b(T) extremal in direction e^{i angle}, refined by golden-section search."""
    u = np.exp(1j * angle)
    theta = 2 * np.pi * np.arange(n) / n
    vals = (np.conj(u) * evaluate(b, np.exp(1j * theta))).real
    i = int(np.argmax(vals))
    lo, hi = theta[i] - 2 * np.pi / n, theta[i] + 2 * np.pi / n
    g = lambda th: -(np.conj(u) * evaluate(b, np.exp(1j * th))).real
    gr = (math.sqrt(5) - 1) / 2
    for _ in range(60):
        c, d = hi - gr * (hi - lo), lo + gr * (hi - lo)
        if g(c) < g(d):
            hi = d
        else:
            lo = c
    return evaluate(b, np.exp(0.5j * (lo + hi)))


def ray_trace(b, angle: float, dists=(1e-1, 1e-2, 1e-3, 1e-4), schedule=(100, 200, 400), n_fft: int = 1024):
    """Approach b(T) along the outward normal at a support point.

    Past a support point in direction u the whole curve lies in the half-plane
    behind it, so w = support + d u has curve distance d and winding zero.
    Returns rows with keys dist, qrg_bound, oracle_norm, ratio (= qrg_bound / oracle_norm).
    """
    b = _as_wiener(b)
    lb = b.as_laurent()
    u = np.exp(1j * angle)
    s = support_point(lb, angle)
    rows = []
    for d in dists:
        w = s + d * u
        rec = qrg_bound(b, w, n_fft=n_fft)
        sample = resolvent_norm_extrapolated(lb, w, schedule, dist=rec.dist)
        rows.append({"dist": rec.dist, "qrg_bound": rec.qrg_bound, "oracle_norm": sample.extrapolated,
                     "ratio": rec.qrg_bound / sample.extrapolated, "w": w,
                     "qrg_ratio": rec.qrg_bound * rec.dist ** 2 / (rec.dist + 1)})
    return rows
