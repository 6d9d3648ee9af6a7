"""
Zero divisor of P(z, w) = z^m (b(z) - w) and regularity of Laurent polynomials.

On Omega(b) (off the curve, winding zero) the argument principle puts exactly
m roots in the open disk and k outside the closed disk. ``b`` is regular when
one of the two groups stays uniformly away from the circle over all of
Omega(b). That is not decidable from finitely many samples, so
``regularity_scan`` reports sampled extremes together with the evidence that
led to each verdict.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .config import ScanConfig
from .curvegeom import curve_diameter, detect_cusps, winding_many
from .errors import HypothesisNotMet
from .roots import polyroots, polyroots_batch, sort_roots
from .symbol import LaurentSymbol, circle_points, derivative, evaluate, sup_norm, wiener_norm


def roots_of_P(b: LaurentSymbol, w: complex) -> np.ndarray:
    """All m + k roots of P(., w), sorted by modulus then argument."""
    if b.is_constant:
        raise HypothesisNotMet("symbol must be non-constant")
    return polyroots(b.poly_coeffs(w))


def vieta_residuals(b: LaurentSymbol, w: complex, roots) -> tuple[float, float]:
    """Relative mismatch of the root sum and product against the coefficients."""
    p = b.poly_coeffs(w)
    n = p.size - 1
    lead = p[-1]
    want_sum = -p[-2] / lead
    want_prod = (-1) ** n * p[0] / lead
    got_sum = complex(np.sum(roots))
    got_prod = complex(np.prod(roots))
    scale_sum = max(abs(want_sum), float(np.sum(np.abs(roots))), 1e-300)
    return abs(got_sum - want_sum) / scale_sum, abs(got_prod - want_prod) / max(abs(want_prod), 1e-300)


@dataclass(frozen=True, eq=False)
class ZeroDivisor:
    roots: np.ndarray
    interior: tuple
    unimodular: tuple
    exterior: tuple
    band: float
    w: complex

    def counts(self) -> tuple[int, int, int]:
        return len(self.interior), len(self.unimodular), len(self.exterior)

    def counts_match(self, m: int, k: int) -> bool:
        return self.counts() == (m, 0, k)

    def to_json(self) -> dict:
        return {
            "w": [self.w.real, self.w.imag],
            "band": self.band,
            "roots": [[z.real, z.imag] for z in self.roots],
            "moduli": [float(abs(z)) for z in self.roots],
            "interior": list(self.interior),
            "unimodular": list(self.unimodular),
            "exterior": list(self.exterior),
        }


def split_divisor(roots, band: float, w: complex) -> ZeroDivisor:
    """Partition roots into |z| < 1 - band, ||z| - 1| <= band, |z| > 1 + band."""
    if not 0 < band < 0.1:
        raise ValueError("band must lie in (0, 0.1)")
    z = sort_roots(np.asarray(roots, dtype=complex))
    mod = np.abs(z)
    inner = tuple(int(i) for i in np.flatnonzero(mod < 1 - band))
    outer = tuple(int(i) for i in np.flatnonzero(mod > 1 + band))
    unim = tuple(int(i) for i in np.flatnonzero(np.abs(mod - 1) <= band))
    z.setflags(write=False)
    return ZeroDivisor(z, inner, unim, outer, band, complex(w))


def zero_divisor(b: LaurentSymbol, w: complex, band: float = 1e-8) -> ZeroDivisor:
    return split_divisor(roots_of_P(b, w), band, w)


def count_check(b: LaurentSymbol, w: complex, band: float = 1e-8) -> bool:
    return zero_divisor(b, w, band).counts_match(b.m, b.k)


# -- Grace certificate --------------------------------------------------


@dataclass(frozen=True)
class GraceResult:
    applies: bool
    rho: float | None
    s: int

    def to_json(self):
        return {"applies": self.applies, "rho": self.rho, "s": self.s}


def apolar_grace_test(b: LaurentSymbol, s: int) -> GraceResult:
    """For m = 1: if |b_{k-s}| > C(k+1, s)|b_{-1}|, the interior root stays in |z| <= rho < 1."""
    if b.m != 1:
        raise HypothesisNotMet("apolarity certificate needs m = 1")
    if not 0 <= s <= b.k - 1:
        raise ValueError(f"s must lie in [0, k-1] = [0, {b.k - 1}]")
    binom = math.comb(b.k + 1, s)
    lead = abs(b[b.k - s])
    if not lead > binom * abs(b[-1]):
        return GraceResult(False, None, s)
    rho = (binom * abs(b[-1]) / lead) ** (1.0 / (b.k + 1 - s))
    return GraceResult(True, rho, s)


def best_grace(b: LaurentSymbol) -> GraceResult | None:
    """Smallest certified radius over all admissible s, or None if none applies."""
    if b.m != 1 or b.k < 1:
        return None
    hits = [g for g in (apolar_grace_test(b, s) for s in range(b.k)) if g.applies]
    return min(hits, key=lambda g: g.rho) if hits else None


# -- sampling of Omega(b) -----------------------------------------------


@dataclass
class OmegaSamples:
    """Scan points known to lie in Omega(b), with the roots of P at each.

    ``level`` is -1 for the coarse area grids and l >= 0 for points at
    distance about diam * 2^-l from the curve; ``path`` groups points on the
    same offset ray across levels (-1 for grid points).
    """

    w: np.ndarray
    level: np.ndarray
    path: np.ndarray
    roots: np.ndarray
    path_anchor: dict = field(default_factory=dict)


def _grid(box, nx, ny):
    x0, x1, y0, y1 = box
    X, Y = np.meshgrid(np.linspace(x0, x1, nx), np.linspace(y0, y1, ny))
    return (X + 1j * Y).ravel()


def candidate_points(b: LaurentSymbol, cfg: ScanConfig):
    """Scan candidates as (w, level, path) arrays plus the anchor of each path.

    Area grids cover |w| <= C1 and the curve's bounding box; offset rays leave
    the curve along both normals at each ring point, and cusps get a fan of
    16 directions because the normal is undefined there.
    """
    c1 = 2.0 ** b.degree * wiener_norm(b)
    _, t = circle_points(2048)
    pts = evaluate(b, t)
    lo = complex(pts.real.min(), pts.imag.min())
    hi = complex(pts.real.max(), pts.imag.max())
    pad = 0.25 * max(hi.real - lo.real, hi.imag - lo.imag, 1e-3)
    ws, levels, paths = [], [], []
    if cfg.grid:
        g = _grid(cfg.grid["box"], cfg.grid["nx"], cfg.grid["ny"])
        ws.append(g)
    else:
        g1 = _grid((-c1, c1, -c1, c1), 65, 65)
        ws.append(g1[np.abs(g1) <= c1])
        ws.append(_grid((lo.real - pad, hi.real + pad, lo.imag - pad, hi.imag + pad), 65, 65))
    n_grid = sum(a.size for a in ws)
    levels.append(np.full(n_grid, -1))
    paths.append(np.full(n_grid, -1))

    diam = curve_diameter(b)
    n_ring = cfg.ring_points(b)
    theta, t = circle_points(n_ring, offset=math.pi / n_ring)
    f = evaluate(b, t)
    fp = 1j * t * evaluate(derivative(b), t)
    speed = np.abs(fp)
    ok = speed > 1e-12 * max(1.0, wiener_norm(b))
    normal = np.where(ok, 1j * fp / np.where(ok, speed, 1.0), 0.0)
    anchors = {}
    dirs = [f[ok] + 0 * normal[ok], normal[ok], -normal[ok]]
    base, nrm = np.concatenate([dirs[0], dirs[0]]), np.concatenate([dirs[1], dirs[2]])
    for c, z in enumerate(detect_cusps(b, cfg.cusp_tol)):
        fc = evaluate(b, z)
        fan = np.exp(2j * math.pi * np.arange(16) / 16)
        base = np.concatenate([base, np.full(16, fc)])
        nrm = np.concatenate([nrm, fan])
    n_paths = base.size
    for i in range(n_paths):
        anchors[i] = complex(base[i])
    for lev in range(cfg.max_level + 1):
        d = diam * 2.0 ** -lev
        ws.append(base + d * nrm)
        levels.append(np.full(n_paths, lev))
        paths.append(np.arange(n_paths))
    w = np.concatenate(ws)
    return w, np.concatenate(levels), np.concatenate(paths), anchors


def omega_samples(b: LaurentSymbol, cfg: ScanConfig | None = None) -> OmegaSamples:
    """Scan candidates filtered to Omega(b) by certified winding, with roots of P."""
    cfg = cfg or ScanConfig()
    w, level, path, anchors = candidate_points(b, cfg)
    wn = np.array(winding_many(b, w, on_curve=-999))
    keep = wn == 0
    w, level, path = w[keep], level[keep], path[keep]
    p = np.repeat(b.poly_coeffs(0.0)[None, :], w.size, axis=0)
    p[:, b.m] -= w
    roots = polyroots_batch(p) if w.size else np.zeros((0, b.degree), dtype=complex)
    return OmegaSamples(w, level, path, roots, anchors)


# -- regularity ---------------------------------------------------------


VERDICTS = ("regular", "irregular", "inconclusive")


@dataclass
class RegularityReport:
    sup_interior_modulus: float
    inf_exterior_modulus: float
    r_estimate: float | None
    R_estimate: float | None
    regular_interior: bool
    regular_exterior: bool
    verdict: str
    grid_stats: list
    witnesses: dict
    approach_paths: dict
    constants: dict
    count_violations: int
    band_ambiguous: int
    n_samples: int
    grace: GraceResult | None = None

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "sup_interior_modulus": self.sup_interior_modulus,
            "inf_exterior_modulus": self.inf_exterior_modulus,
            "r_estimate": self.r_estimate,
            "R_estimate": self.R_estimate,
            "regular_interior": self.regular_interior,
            "regular_exterior": self.regular_exterior,
            "grid_stats": self.grid_stats,
            "witnesses": {k: [v.real, v.imag] for k, v in self.witnesses.items()},
            "approach_paths": self.approach_paths,
            "constants": self.constants,
            "count_violations": self.count_violations,
            "band_ambiguous": self.band_ambiguous,
            "n_samples": self.n_samples,
            "grace": self.grace.to_json() if self.grace else None,
        }


def _path_reaches_circle(gaps: np.ndarray, margin: float, run: int = 4) -> bool:
    """Gaps to the circle shrink monotonically over the last ``run`` levels and end below margin/4."""
    if gaps.size < run:
        return False
    tail = gaps[-run:]
    return bool(tail[-1] < margin / 4 and np.all(np.diff(tail) <= 0))


def regularity_scan(b: LaurentSymbol, cfg: ScanConfig | None = None, samples: OmegaSamples | None = None) -> RegularityReport:
    """Sample Omega(b) within |w| <= C1 and track sup |z_m| and inf |z_{m+1}|.

    Beyond C1 = 2^(m+k)||b||_W the moduli are at most 1/2 and at least 2, so
    nothing outside that disk can break regularity.
    """
    cfg = cfg or ScanConfig()
    if not b.is_two_sided:
        raise HypothesisNotMet("regularity scan needs m >= 1 and k >= 1")
    s = samples or omega_samples(b, cfg)
    m = b.m
    mod = np.abs(s.roots)
    zin, zout = mod[:, m - 1], mod[:, m]
    c1 = 2.0 ** b.degree * wiener_norm(b)
    c2 = 2.0 * sup_norm(b)
    inside_c2 = np.abs(s.w) <= c2
    c3 = float(mod[inside_c2].max()) if inside_c2.any() else None
    # the argument principle fixes the count in the open disk exactly; roots
    # inside the unimodular band are only flagged, since samples at depth l
    # sit about diam 2^-l from the curve
    violations = int(np.count_nonzero(np.count_nonzero(mod < 1, axis=1) != m))
    in_band = int(np.count_nonzero((np.abs(mod - 1) <= cfg.band).any(axis=1)))

    stats = []
    for lev in np.unique(s.level):
        sel = s.level == lev
        i, j = int(np.argmax(np.where(sel, zin, -np.inf))), int(np.argmin(np.where(sel, zout, np.inf)))
        stats.append({
            "level": int(lev),
            "n_points": int(sel.sum()),
            "sup_interior": float(zin[i]),
            "inf_exterior": float(zout[j]),
        })
    i_sup, i_inf = int(np.argmax(zin)), int(np.argmin(zout))
    sup_in, inf_out = float(zin[i_sup]), float(zout[i_inf])

    # per-ray evidence of roots approaching the circle
    irr_in = irr_out = False
    paths_json = {}
    best_in = best_out = None
    for pid in np.unique(s.path[s.path >= 0]):
        sel = np.flatnonzero(s.path == pid)
        sel = sel[np.argsort(s.level[sel])]
        g_in, g_out = 1 - zin[sel], zout[sel] - 1
        hit_in = _path_reaches_circle(g_in, cfg.margin)
        hit_out = _path_reaches_circle(g_out, cfg.margin)
        irr_in |= hit_in
        irr_out |= hit_out
        if best_in is None or g_in[-1] < best_in[0]:
            best_in = (g_in[-1], pid, sel)
        if best_out is None or g_out[-1] < best_out[0]:
            best_out = (g_out[-1], pid, sel)
    for tag, best in (("interior", best_in), ("exterior", best_out)):
        if best is None:
            continue
        _, pid, sel = best
        paths_json[tag] = {
            "anchor": [s.path_anchor[int(pid)].real, s.path_anchor[int(pid)].imag],
            "points": [
                {"level": int(s.level[q]), "w": [s.w[q].real, s.w[q].imag],
                 "z_m": float(zin[q]), "z_m1": float(zout[q])}
                for q in sel
            ],
        }

    reg_in = sup_in <= 1 - cfg.margin
    reg_out = inf_out >= 1 + cfg.margin
    if reg_in or reg_out:
        verdict = "regular"
    elif irr_in and irr_out:
        verdict = "irregular"
    else:
        verdict = "inconclusive"
    return RegularityReport(
        sup_interior_modulus=sup_in,
        inf_exterior_modulus=inf_out,
        r_estimate=sup_in if reg_in else None,
        R_estimate=inf_out if reg_out else None,
        regular_interior=bool(reg_in),
        regular_exterior=bool(reg_out),
        verdict=verdict,
        grid_stats=stats,
        witnesses={"sup_interior": complex(s.w[i_sup]), "inf_exterior": complex(s.w[i_inf])},
        approach_paths=paths_json,
        constants={"C1": c1, "C2": c2, "C3": c3},
        count_violations=violations,
        band_ambiguous=in_band,
        n_samples=int(s.w.size),
        grace=best_grace(b),
    )


def approach_trace(b: LaurentSymbol, anchor: complex, direction: complex, levels=range(0, 33), band: float = 1e-8):
    """|z_m| and |z_{m+1}| along w = anchor + diam 2^-l direction, for w in Omega(b).

    Used to exhibit a specific approach to the curve (for instance w -> 2+ for z + 1/z).
    """
    diam = curve_diameter(b)
    direction = direction / abs(direction)
    ws = np.array([anchor + diam * 2.0 ** -lev * direction for lev in levels])
    wn = winding_many(b, ws, on_curve=-999)
    out = []
    for lev, w, wv in zip(levels, ws, wn):
        if wv != 0:
            continue
        z = roots_of_P(b, w)
        out.append({"level": lev, "w": complex(w), "z_m": float(abs(z[b.m - 1])), "z_m1": float(abs(z[b.m]))})
    return out
