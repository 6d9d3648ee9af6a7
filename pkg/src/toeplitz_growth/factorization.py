"""
Wiener-Hopf factorization of b - w, Krein's resolvent bound, and the LRG scan.

For w in Omega(b) with interior roots z_1..z_m and exterior roots z_{m+1}..z_{m+k},

    b(z) - w = a_-(z) a_+(z),
    a_-(z) = b_k prod_i (1 - z_i / z),   a_+(z) = prod_j (z - z_{m+j}),

and ||(T_b - w)^{-1}|| <= ||1/a_+||_inf ||1/a_-||_inf.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .config import ScanConfig
from .curvegeom import curve_diameter, distance_to_curve, min_modulus_on_circle, winding_many
from .divisor import RegularityReport, roots_of_P
from .errors import HypothesisNotMet, NotStabilized, ReconstructionFailure
from .symbol import LaurentSymbol, circle_points, derivative, evaluate, sup_norm, wiener_norm

RECONSTRUCTION_RTOL = 1e-10


@dataclass(frozen=True, eq=False)
class FactorPair:
    w: complex
    scale: complex  # b_k
    interior: np.ndarray
    exterior: np.ndarray

    def a_minus(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.full(z.shape, self.scale, dtype=complex)
        for r in self.interior:
            out = out * (1 - r / z)
        return out

    def a_plus(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.ones(z.shape, dtype=complex)
        for r in self.exterior:
            out = out * (z - r)
        return out

    def reconstruction_error(self, b: LaurentSymbol, n: int = 1024) -> float:
        _, t = circle_points(n, offset=0.5 / n)
        target = evaluate(b, t) - self.w
        got = self.a_minus(t) * self.a_plus(t)
        return float(np.max(np.abs(got - target)) / np.max(np.abs(target)))

    def to_json(self) -> dict:
        return {
            "w": [self.w.real, self.w.imag],
            "a_minus": {"scale": [self.scale.real, self.scale.imag],
                        "roots": [[z.real, z.imag] for z in self.interior]},
            "a_plus": {"scale": [1.0, 0.0], "roots": [[z.real, z.imag] for z in self.exterior]},
        }


def factorize(b: LaurentSymbol, w: complex, roots=None, n_check: int = 1024) -> FactorPair:
    """Wiener-Hopf factors of b - w built from the split zero divisor.

    Raises HypothesisNotMet if the roots do not split as m inside / k outside
    the circle (w is not in Omega(b)), ReconstructionFailure if the factor
    product misses b - w by more than 1e-10 relative at ``n_check`` points.
    """
    z = roots_of_P(b, w) if roots is None else np.asarray(roots)
    mod = np.abs(z)
    m = b.m
    if np.count_nonzero(mod < 1) != m or np.count_nonzero(mod > 1) != b.k:
        raise HypothesisNotMet(f"roots at w={w} do not split as {m} inside / {b.k} outside")
    pair = FactorPair(complex(w), b[b.k], z[:m].copy(), z[m:].copy())
    err = pair.reconstruction_error(b, n_check)
    if not err <= RECONSTRUCTION_RTOL:
        raise ReconstructionFailure(f"factor product misses b - w by {err:.3e} (relative) at w={w}")
    return pair


def _root_poly_min(roots, n0: int = 64) -> float:
    """Certified lower bound of min over the circle of |prod (t - r)|."""
    if len(roots) == 0:
        return 1.0
    c = np.poly(roots)[::-1]  # ascending
    j = np.arange(c.size)
    lip2 = math.fsum(np.abs(j * j * c))

    def jet(theta):
        t = np.exp(1j * theta)
        val = np.ones_like(t)
        der = np.zeros_like(t)
        for r in roots:
            der = der * (t - r) + val
            val = val * (t - r)
        return val, 1j * t * der

    lower, _, _ = min_modulus_on_circle(jet, lip2, n0=max(n0, 16 * len(roots)))
    return lower


def factor_sup_norms(pair: FactorPair) -> tuple[float, float]:
    """Certified upper bounds of ||1/a_+||_inf and ||1/a_-||_inf."""
    lo_plus = _root_poly_min(pair.exterior)
    # on the circle |a_-(t)| = |b_k| prod |t - z_i|
    lo_minus = abs(pair.scale) * _root_poly_min(pair.interior)
    inv = lambda x: math.inf if x <= 0 else 1.0 / x
    return inv(lo_plus), inv(lo_minus)


def krein_bound(b: LaurentSymbol, w: complex, pair: FactorPair | None = None) -> float:
    pair = pair or factorize(b, w)
    p, q = factor_sup_norms(pair)
    return p * q


@dataclass
class BoundReport:
    w: complex
    dist: float
    krein: float
    generic_plus: float | None = None
    generic_minus: float | None = None
    refined_minus: float | None = None
    refined_plus: float | None = None
    neumann: float | None = None
    constants: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        d = {k: getattr(self, k) for k in ("dist", "krein", "generic_plus", "generic_minus",
                                           "refined_minus", "refined_plus", "neumann")}
        d["w"] = [self.w.real, self.w.imag]
        d["constants"] = self.constants
        return d


def bound_report(b: LaurentSymbol, w: complex, reg: RegularityReport | None = None,
                 pair: FactorPair | None = None, dist: float | None = None) -> BoundReport:
    """Krein bound next to the generic, refined and Neumann bounds at w."""
    w = complex(w)
    pair = pair or factorize(b, w)
    if dist is None:
        dist, _, _ = distance_to_curve(b, w)
    krein = krein_bound(b, w, pair)
    c1 = 2.0 ** b.degree * wiener_norm(b)
    c2 = 2.0 * sup_norm(b)
    rep = BoundReport(w, dist, krein, constants={"C1": c1, "C2": c2})
    inv_dist = math.inf if dist <= 0 else 1.0 / dist
    if abs(w) >= c2:
        rep.neumann = 3.0 * inv_dist
    if abs(w) > c2:
        return rep
    bk = abs(b[b.k])
    rep.generic_plus = 2.0 ** b.m * bk * inv_dist
    ext_mod = np.abs(pair.exterior)
    c3 = reg.constants.get("C3") if reg is not None else None
    c3 = max(c3 or 0.0, float(ext_mod.max(initial=0.0)), float(np.abs(pair.interior).max(initial=0.0)))
    # (1 + C3)^k dominates sup_t |a_+(t)|; the local product keeps it valid at this w
    c4 = max((1 + c3) ** b.k, float(np.prod(1 + ext_mod)))
    rep.generic_minus = c4 * inv_dist
    rep.constants.update({"C3": c3, "C4": c4})
    if reg is not None and reg.regular_interior:
        r = max(reg.r_estimate, float(np.abs(pair.interior).max()))
        c5 = bk * (1 - r) ** b.m
        rep.refined_minus = 1.0 / c5
        rep.constants["C5"] = c5
    if reg is not None and reg.regular_exterior:
        R = min(reg.R_estimate, float(ext_mod.min()))
        c6 = (R - 1) ** b.k
        rep.refined_plus = 1.0 / c6
        rep.constants["C6"] = c6
    return rep


# -- LRG constant -------------------------------------------------------


@dataclass
class LRGResult:
    C_lrg: float | None
    argmax_w: complex | None
    stabilized: bool
    trace: list
    records: list

    def to_json(self) -> dict:
        return {
            "C_lrg": self.C_lrg,
            "argmax_w": None if self.argmax_w is None else [self.argmax_w.real, self.argmax_w.imag],
            "stabilized": self.stabilized,
            "trace": self.trace,
        }


LRG_COLUMNS = ("w_re", "w_im", "dist", "krein", "neumann", "product")


def lrg_points(b: LaurentSymbol, cfg: ScanConfig):
    """Per-level point sets: an area grid at level 0, then offset rings at diam 2^-l."""
    diam = curve_diameter(b)
    c2 = 2.0 * sup_norm(b)
    n_ring = cfg.ring_points(b)
    theta, t = circle_points(n_ring, offset=math.pi / n_ring)
    f = evaluate(b, t)
    fp = 1j * t * evaluate(derivative(b), t)
    speed = np.abs(fp)
    ok = speed > 1e-12 * max(1.0, wiener_norm(b))
    nrm = 1j * fp[ok] / speed[ok]
    f = f[ok]
    R = 1.25 * c2
    X, Y = np.meshgrid(np.linspace(-R, R, 33), np.linspace(-R, R, 33))
    levels = [(X + 1j * Y).ravel()]
    for lev in range(1, cfg.lrg_levels):
        d = diam * 2.0 ** -lev
        levels.append(np.concatenate([f + d * nrm, f - d * nrm]))
    return levels


def lrg_constant(b: LaurentSymbol, cfg: ScanConfig | None = None, reg: RegularityReport | None = None) -> LRGResult:
    """sup of dist * min(krein, neumann) over a grid refined toward the curve.

    The running sup is recorded after each level; it counts as stabilized when
    each of the last two levels changes it by less than 10%. For symbols not
    certified regular the trace is returned without a constant.
    """
    cfg = cfg or ScanConfig()
    diam = curve_diameter(b)
    c2 = 2.0 * sup_norm(b)
    best, best_w = 0.0, None
    trace, records = [], []
    for lev, ws in enumerate(lrg_points(b, cfg)):
        wn = np.array(winding_many(b, ws, on_curve=-999))
        level_sup = 0.0
        for w in ws[wn == 0]:
            w = complex(w)
            dist, _, _ = distance_to_curve(b, w)
            if dist < 1e-6 * diam:
                continue
            kr = krein_bound(b, w)
            neu = 3.0 / dist if abs(w) >= c2 else math.inf
            prod = dist * min(kr, neu)
            records.append({"w_re": w.real, "w_im": w.imag, "dist": dist, "krein": kr,
                            "neumann": neu if math.isfinite(neu) else None, "product": prod})
            level_sup = max(level_sup, prod)
            if prod > best:
                best, best_w = prod, w
        trace.append({"level": lev, "n_points": int(np.count_nonzero(wn == 0)), "level_sup": level_sup,
                      "running_sup": best})
    sups = [t["running_sup"] for t in trace]
    stable = len(sups) >= 3 and all(
        abs(sups[i] - sups[i - 1]) < 0.1 * sups[i - 1] for i in (len(sups) - 1, len(sups) - 2)
    )
    if reg is not None and reg.verdict != "regular":
        return LRGResult(None, best_w, stable, trace, records)
    if not stable:
        raise NotStabilized(f"LRG sup still moving after {len(sups)} levels", trace)
    return LRGResult(best, best_w, True, trace, records)
