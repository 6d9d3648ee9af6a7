"""
Geometry of the symbol curve b(T).

Winding numbers and distances are certified: every sampled quantity is paired
with a derivative bound on the arc it stands for, so an integer winding or a
distance lower bound returned here holds for the continuous curve, not only
for the polygon through the samples.

For w off the curve, dist(w, sigma(T_b)) equals dist(w, b(T)): the spectrum is
the curve together with the regions of nonzero winding, and the boundary of
those regions lies on the curve. ``distance_to_spectrum`` relies on this.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .config import ScanConfig
from .errors import HypothesisNotMet, OnCurve
from .roots import polyroots
from .symbol import (
    LaurentSymbol,
    circle_points,
    derivative,
    evaluate,
    theta_lipschitz,
    theta_lipschitz2,
    wiener_norm,
)

TWO_PI = 2.0 * math.pi
MAX_DEPTH = 48


@dataclass(frozen=True, eq=False)
class CurveSampling:
    params: np.ndarray
    points: np.ndarray
    refinement_level: int = 0


def sample_curve(b: LaurentSymbol, n: int | None = None, refinement_level: int = 0) -> CurveSampling:
    n_min = 64 * max(b.degree, 1)
    n = max(n or n_min, n_min) * 2 ** refinement_level
    theta, t = circle_points(n)
    return CurveSampling(theta, evaluate(b, t), refinement_level)


def curve_diameter(b: LaurentSymbol, n: int = 2048) -> float:
    pts = sample_curve(b, n).points
    # farthest pair lies on the convex hull; a dense sample is plenty here
    d = np.abs(pts[:, None] - pts[None, :])
    return float(d.max())


def _theta_jet(b: LaurentSymbol, db: LaurentSymbol, theta):
    """f(theta) = b(e^{i theta}) and f'(theta) = i z b'(z)."""
    z = np.exp(1j * theta)
    return evaluate(b, z), 1j * z * evaluate(db, z)


def min_modulus_on_circle(jet, lip2: float, n0: int = 256, rtol: float = 1e-10, atol: float = 1e-300,
                          max_rounds: int = 80):
    """Certified lower bound of min_theta |f(theta)| by branch and bound.

    ``jet(theta)`` returns (f, f') arrays; ``lip2`` bounds |f''| on the circle.
    On an interval of half-width h around c, |f| >= dist(0, f(c) + f'(c)[-h, h])
    - lip2 h^2 / 2, so intervals are split until that bound is within
    ``rtol`` of the best attained value.

    Returns (lower, upper, theta_at_upper).
    """
    h = math.pi / n0
    centers = (np.arange(n0) + 0.5) * (2 * h)
    upper = math.inf
    theta_best = 0.0
    pruned_floor = math.inf
    for _ in range(max_rounds):
        f, fp = jet(centers)
        fp2 = (fp.real ** 2 + fp.imag ** 2)
        with np.errstate(divide="ignore", invalid="ignore"):
            s = np.where(fp2 > 0, -(fp.conj() * f).real / fp2, 0.0)
        s = np.clip(s, -h, h)
        lin = np.abs(f + fp * s)
        lower = lin - 0.5 * lip2 * h * h
        vals = np.abs(f)
        i = int(np.argmin(vals))
        if vals[i] < upper:
            upper, theta_best = float(vals[i]), float(centers[i])
        # the linear model's minimiser is often a better attained value
        fs, _ = jet(centers + s)
        vs = np.abs(fs)
        i = int(np.argmin(vs))
        if vs[i] < upper:
            upper, theta_best = float(vs[i]), float(centers[i] + s[i])
        gap = rtol * upper + atol
        keep = lower < upper - gap
        if np.any(~keep):
            pruned_floor = min(pruned_floor, float(lower[~keep].min()))
        if not keep.any():
            return max(min(pruned_floor, upper), 0.0), upper, theta_best % TWO_PI
        centers = centers[keep]
        h *= 0.5
        centers = np.concatenate([centers - h, centers + h])
        if centers.size > 2_000_000:
            break
    f, fp = jet(centers)
    fp2 = (fp.real ** 2 + fp.imag ** 2)
    with np.errstate(divide="ignore", invalid="ignore"):
        s = np.clip(np.where(fp2 > 0, -(fp.conj() * f).real / fp2, 0.0), -h, h)
    lower = np.abs(f + fp * s) - 0.5 * lip2 * h * h
    floor = min(pruned_floor, float(lower.min()))
    return max(floor, 0.0), upper, theta_best % TWO_PI


def distance_to_curve(b: LaurentSymbol, w: complex, n: int | None = None, rtol: float = 1e-10):
    """Certified lower bound of min_t |w - b(t)| over the unit circle.

    Returns (lower, upper, theta_nearest).
    """
    db = derivative(b)
    shifted = b - w

    def jet(theta):
        return _theta_jet(shifted, db, theta)

    n0 = max(n or 0, 64 * max(b.degree, 1))
    return min_modulus_on_circle(jet, theta_lipschitz2(b), n0=n0, rtol=rtol)


MAX_ARCS = 2_000_000


def _adaptive_winding(b: LaurentSymbol, ws: np.ndarray, n: int, max_depth: int):
    """Batched certified winding numbers; entries that cannot be certified are None.

    An arc with center c and half-width h is certified when
    |f'(c)| h + L2 h^2 / 2 < |f(c)|: its image then lies in a disk around
    f(c) that misses 0, so the principal argument of f(end)/f(start) is the
    true increment. Failing arcs are halved. The second-order test keeps the
    number of live arcs bounded even near cusps, where f' vanishes.
    """
    db = derivative(b)
    lip2 = theta_lipschitz2(b)
    h0 = TWO_PI / n
    theta = h0 * np.arange(n + 1)
    z_end = np.exp(1j * theta)
    z_mid = np.exp(1j * (theta[:-1] + 0.5 * h0))
    curve_end = evaluate(b, z_end)
    curve_mid = evaluate(b, z_mid)
    speed_mid = np.abs(z_mid * evaluate(db, z_mid))
    # rounding allowance so arcs through an exactly sampled zero never pass
    fuzz = 64 * np.finfo(float).eps * (wiener_norm(b) + np.abs(ws).max(initial=0.0))
    slack = speed_mid * 0.5 * h0 + 0.5 * lip2 * (0.5 * h0) ** 2 + fuzz
    total = np.zeros(ws.size)
    failed = np.zeros(ws.size, dtype=bool)
    pending = []
    for start in range(0, ws.size, 512):
        chunk = ws[start:start + 512]
        fa = curve_end[None, :-1] - chunk[:, None]
        fb = curve_end[None, 1:] - chunk[:, None]
        fc = curve_mid[None, :] - chunk[:, None]
        ok = slack[None, :] < np.abs(fc)
        with np.errstate(divide="ignore", invalid="ignore"):
            inc = np.angle(fb / fa)
        total[start:start + chunk.size] = np.where(ok, inc, 0.0).sum(axis=1)
        rows, cols = np.nonzero(~ok)
        if rows.size:
            pending.append((rows + start, theta[cols], fa[rows, cols], fb[rows, cols], fc[rows, cols]))
    if pending:
        owner = np.concatenate([q[0] for q in pending])
        left = np.concatenate([q[1] for q in pending])
        fa = np.concatenate([q[2] for q in pending])
        fb = np.concatenate([q[3] for q in pending])
        fmid = np.concatenate([q[4] for q in pending])
        h = h0
        for _ in range(max_depth):
            # split every live arc at its center
            h *= 0.5
            left = np.concatenate([left, left + h])
            owner = np.concatenate([owner, owner])
            fa, fb = np.concatenate([fa, fmid]), np.concatenate([fmid, fb])
            if owner.size > MAX_ARCS:
                break
            zc = np.exp(1j * (left + 0.5 * h))
            fmid = evaluate(b, zc) - ws[owner]
            speed = np.abs(zc * evaluate(db, zc))
            ok = speed * 0.5 * h + 0.5 * lip2 * (0.5 * h) ** 2 + fuzz < np.abs(fmid)
            with np.errstate(divide="ignore", invalid="ignore"):
                inc = np.angle(fb / fa)
            np.add.at(total, owner[ok], inc[ok])
            keep = ~ok
            left, fa, fb, fmid, owner = left[keep], fa[keep], fb[keep], fmid[keep], owner[keep]
            if owner.size == 0:
                break
        failed[owner] = True
    out = np.rint(total / TWO_PI).astype(int)
    return [None if f else int(v) for f, v in zip(failed, out)]


def winding(b: LaurentSymbol, w: complex, n: int | None = None, max_depth: int = MAX_DEPTH) -> int:
    """Winding number of b(t) - w around 0 as t runs once around the circle.

    Raises OnCurve if some arc cannot be certified at depth ``max_depth``.
    """
    n = max(n or 0, 64 * max(b.degree, 1))
    (wn,) = _adaptive_winding(b, np.array([complex(w)]), n, max_depth)
    if wn is None:
        raise OnCurve(f"cannot certify that w={w} is off the curve")
    return wn


def winding_many(b: LaurentSymbol, ws, n: int | None = None, on_curve=None, max_depth: int = MAX_DEPTH):
    """Winding numbers for an array of points; uncertifiable points get ``on_curve``."""
    ws = np.asarray(ws, dtype=complex).ravel()
    n = max(n or 0, 64 * max(b.degree, 1))
    res = _adaptive_winding(b, ws, n, max_depth)
    return [on_curve if r is None else r for r in res]


def in_resolvent_set(b: LaurentSymbol, w: complex, n: int | None = None) -> bool:
    """True iff w is off b(T) and the winding of b - w vanishes."""
    if abs(w) > wiener_norm(b):
        return True
    try:
        return winding(b, w, n) == 0
    except OnCurve:
        return False


def distance_to_spectrum(b: LaurentSymbol, w: complex, n: int | None = None) -> float:
    """Certified lower bound of dist(w, sigma(T_b)); zero for w in the spectrum."""
    if not in_resolvent_set(b, w, n):
        return 0.0
    lower, _, _ = distance_to_curve(b, w, n)
    return lower


# -- Jordan property ----------------------------------------------------


@dataclass(frozen=True)
class CoefficientTest:
    passes_weak: bool
    passes_strict: bool
    which_sign: int | None

    def to_json(self):
        return {"passes_weak": self.passes_weak, "passes_strict": self.passes_strict,
                "which_sign": self.which_sign}


def coefficient_lj_test(b: LaurentSymbol) -> CoefficientTest:
    """Sufficient coefficient conditions for b(T) to be Jordan (weak) or b to be LJ (strict).

    |b_{+-1}| >= (>) |b_{-+1}| + sum_{j>=2} j |b_j| + sum_{j>=2} j |b_{-j}|.
    """
    if max(b.m, b.k) < 2:
        raise HypothesisNotMet("coefficient test needs max(m, k) >= 2")
    rest = math.fsum(j * abs(b[j]) + j * abs(b[-j]) for j in range(2, max(b.m, b.k) + 1))
    weak, strict = {}, {}
    for sign in (1, -1):
        lhs = abs(b[sign])
        rhs = abs(b[-sign]) + rest
        weak[sign] = lhs >= rhs
        strict[sign] = lhs > rhs
    which = next((s for s in (1, -1) if strict[s]), None) or next((s for s in (1, -1) if weak[s]), None)
    return CoefficientTest(any(weak.values()), any(strict.values()), which)


def detect_cusps(b: LaurentSymbol, tol: float = 1e-6) -> list[complex]:
    """Unimodular zeros of b' (roots of the polynomial z^{m+1} b'(z) with ||z| - 1| < tol)."""
    if b.is_constant:
        return []
    # coefficient of z^{j+m} is j b_j
    idx = np.arange(-b.m, b.k + 1)
    poly = idx * b.coeffs
    nz = np.flatnonzero(poly)
    poly = poly[:nz[-1] + 1]
    if poly.size < 2:
        return []
    roots = polyroots(poly)
    near = roots[np.abs(np.abs(roots) - 1.0) < tol]
    db, d2b = derivative(b), derivative(derivative(b))
    out = []
    for z in near:
        for _ in range(4):
            d2 = evaluate(d2b, z)
            if d2 == 0:
                break
            z = z - evaluate(db, z) / d2
        out.append(complex(z))
    return sorted(out, key=lambda z: np.angle(z) % TWO_PI)


def _circ_sep(a, b):
    d = np.abs(np.asarray(a) - np.asarray(b)) % TWO_PI
    return np.minimum(d, TWO_PI - d)


def _newton_pairs(b, db, th1, th2, scale, iters=60):
    for _ in range(iters):
        f1, d1 = _theta_jet(b, db, th1)
        f2, d2 = _theta_jet(b, db, th2)
        F = f1 - f2
        if np.all(np.abs(F) < 1e-14 * scale):
            break
        J = np.empty(th1.shape + (2, 2))
        J[..., 0, 0], J[..., 0, 1] = d1.real, -d2.real
        J[..., 1, 0], J[..., 1, 1] = d1.imag, -d2.imag
        rhs = np.stack([F.real, F.imag], axis=-1)
        step = np.einsum("...ij,...j->...i", np.linalg.pinv(J), rhs)
        step = np.clip(step, -0.1, 0.1)
        done = np.abs(F) < 1e-14 * scale
        th1 = np.where(done, th1, th1 - step[..., 0])
        th2 = np.where(done, th2, th2 - step[..., 1])
    f1, _ = _theta_jet(b, db, th1)
    f2, _ = _theta_jet(b, db, th2)
    return th1 % TWO_PI, th2 % TWO_PI, np.abs(f1 - f2), 0.5 * (f1 + f2)


def detect_self_intersections(b: LaurentSymbol, n: int | None = None, tol: float = 1e-6,
                              residual: float = 1e-10):
    """Parameter pairs (theta1 < theta2) with b(e^{i theta1}) = b(e^{i theta2}).

    Candidates are crossing polygon segments and sample pairs closer than
    ``tol * ||b||_W``, found with a k-d tree; each is refined by a 2-d Newton
    iteration on (theta1, theta2) and kept if the residual is below
    ``residual * max(1, ||b||_W)`` and the parameters stay more than 2 pi / n
    apart. Returns a list of (theta1, theta2, w) sorted by theta1.
    """
    n_min = 256 * max(b.degree, 1)
    n = n or 2 * n_min
    if n < n_min:
        raise ValueError(f"need n >= 256(m+k) = {n_min}")
    scale = max(1.0, wiener_norm(b))
    theta, t = circle_points(n)
    pts = evaluate(b, t)
    nxt = np.roll(pts, -1)
    seg = nxt - pts
    r = 2.0 * float(np.abs(seg).max()) + tol * scale
    tree = cKDTree(np.column_stack([pts.real, pts.imag]))
    pairs = tree.query_pairs(r, output_type="ndarray")
    if pairs.size == 0:
        return []
    i, j = pairs[:, 0], pairs[:, 1]
    cyc = np.minimum(np.abs(i - j), n - np.abs(i - j))
    sel = cyc >= 2
    i, j = i[sel], j[sel]
    # segment intersection p + s r = q + u v, s, u in [0, 1]
    p, rr, q, v = pts[i], seg[i], pts[j], seg[j]

    def cross(a, c):
        return a.real * c.imag - a.imag * c.real

    den = cross(rr, v)
    with np.errstate(divide="ignore", invalid="ignore"):
        s = cross(q - p, v) / den
        u = cross(q - p, rr) / den
    crossing = (np.abs(den) > 0) & (s >= 0) & (s <= 1) & (u >= 0) & (u <= 1)
    close = np.abs(p - q) < tol * scale
    cand = crossing | close
    if not cand.any():
        return []
    h = TWO_PI / n
    s = np.where(crossing, s, 0.0)[cand]
    u = np.where(crossing, u, 0.0)[cand]
    th1 = theta[i[cand]] + s * h
    th2 = theta[j[cand]] + u * h
    db = derivative(b)
    th1, th2, res, wv = _newton_pairs(b, db, th1, th2, scale)
    good = (res < residual * scale) & (_circ_sep(th1, th2) > h)
    found = []
    for a, c, wval in zip(th1[good], th2[good], wv[good]):
        a, c = (a, c) if a < c else (c, a)
        if any(_circ_sep(a, fa) < 1e-7 and _circ_sep(c, fc) < 1e-7 for fa, fc, _ in found):
            continue
        found.append((float(a), float(c), complex(wval)))
    found.sort(key=lambda x: (x[0], x[1]))
    return found


def is_degenerate_segment(pairs, n: int) -> bool:
    """True when the curve is a segment traced back and forth.

    Then every intersection pair satisfies theta1 + theta2 = const (mod 2 pi)
    and the pairs form a continuum (at least n / 8 of them at resolution n).
    """
    if len(pairs) < max(8, n // 8):
        return False
    sums = np.array([(a + c) % TWO_PI for a, c, _ in pairs])
    ref = sums[0]
    return bool(np.all(_circ_sep(sums, ref) < 1e-6))


VERDICTS = ("LJ", "JordanWithCusps", "SelfIntersecting", "Inconclusive")


@dataclass
class LJReport:
    verdict: str
    coefficient_test: CoefficientTest | None
    self_intersections: list
    cusps: list
    degenerate_segment: bool = False
    certificate: dict = field(default_factory=dict)

    def to_json(self):
        return {
            "verdict": self.verdict,
            "coefficient_test": self.coefficient_test.to_json() if self.coefficient_test else None,
            "self_intersections": [
                {"theta1": a, "theta2": c, "w": [wv.real, wv.imag]} for a, c, wv in self.self_intersections
            ],
            "cusps": [[z.real, z.imag] for z in self.cusps],
            "degenerate_segment": self.degenerate_segment,
            "certificate": self.certificate,
        }


def _separation_certificate(b: LaurentSymbol, n: int) -> dict:
    """Sound check that the sampled curve has no self-intersection.

    With mu = min |f'| and L2 = sup |f''| (f(theta) = b(e^{i theta})), two
    parameters closer than mu / L2 never share an image. Farther pairs are
    excluded when the corresponding samples are more than 3 L1 pi / n apart,
    L1 = sup |f'|, because each true point is within L1 pi / n of a sample.
    """
    db = derivative(b)
    lip1, lip2 = theta_lipschitz(b), theta_lipschitz2(b)
    theta, t = circle_points(n)
    mu = float(np.min(np.abs(evaluate(db, t)))) - lip2 * math.pi / n
    out = {"min_speed_lower": mu, "local_window": None, "offending_pairs": None, "certified": False}
    if mu <= 0:
        return out
    window = mu / lip2
    out["local_window"] = window
    pts = evaluate(b, t)
    radius = 3.0 * lip1 * math.pi / n
    tree = cKDTree(np.column_stack([pts.real, pts.imag]))
    pairs = tree.query_pairs(radius, output_type="ndarray")
    if pairs.size:
        sep = _circ_sep(theta[pairs[:, 0]], theta[pairs[:, 1]])
        bad = int(np.count_nonzero(sep >= window - TWO_PI / n))
    else:
        bad = 0
    out["offending_pairs"] = bad
    out["certified"] = bad == 0
    return out


def classify_lj(b: LaurentSymbol, cfg: ScanConfig | None = None) -> LJReport:
    """Combine the coefficient test, intersection scan and cusp scan into a verdict."""
    cfg = cfg or ScanConfig()
    if not b.is_two_sided:
        raise HypothesisNotMet("classification needs m >= 1 and k >= 1")
    n = max(cfg.curve_samples(b), 256 * b.degree)
    try:
        coef = coefficient_lj_test(b)
    except HypothesisNotMet:
        coef = None
    pairs = detect_self_intersections(b, n, cfg.intersection_tol)
    cusps = detect_cusps(b, cfg.cusp_tol)
    degenerate = is_degenerate_segment(pairs, n)
    cert = {}
    if pairs:
        verdict = "SelfIntersecting"
    elif cusps:
        verdict = "JordanWithCusps"
    elif coef is not None and coef.passes_strict:
        verdict = "LJ"
        cert = {"certified": True, "by": "coefficient inequality"}
    else:
        cert = _separation_certificate(b, n)
        verdict = "LJ" if cert["certified"] else "Inconclusive"
    return LJReport(verdict, coef, pairs, cusps, degenerate, cert)
