"""
Grid drivers: resolvent-norm scans against the Krein bound, and portraits.

Per-point work is independent, so it is farmed out to a process pool when
more than one worker is requested (``workers`` argument, ``ScanConfig.workers``
or the TOEPLITZ_WORKERS environment variable). Results always come back in
grid order.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, Iterator

import numpy as np

from .config import ScanConfig
from .curvegeom import curve_diameter, distance_to_curve, winding_many
from .errors import ToeplitzError
from .factorization import krein_bound
from .oracle import lower_bound_check, resolvent_norm, resolvent_norm_extrapolated
from .symbol import LaurentSymbol, circle_points, evaluate

SCAN_COLUMNS = ("w_re", "w_im", "dist", "winding", "normN_max", "extrapolated", "krein",
                "lrg_ratio", "qrg_ratio", "lower_ok")
PORTRAIT_COLUMNS = ("w_re", "w_im", "winding", "dist", "sigma_min", "log10_norm")

# scan points closer than this fraction of diam(b(T)) are left out: finite
# sections of size <= 400 have not converged there
SCAN_MIN_REL_DIST = 0.02
# default cap on scan points; an evenly strided subset of the grid is kept
SCAN_MAX_POINTS = 240


def worker_count(requested: int | None = None) -> int:
    env = os.environ.get("TOEPLITZ_WORKERS")
    if env:
        return max(1, int(env))
    return max(1, int(requested or 1))


def parallel_map(fn: Callable, items: Iterable, workers: int = 1, chunksize: int = 4) -> list:
    items = list(items)
    if workers <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items, chunksize=chunksize))


def default_box(b: LaurentSymbol, pad: float = 0.5):
    _, t = circle_points(2048)
    pts = evaluate(b, t)
    diam = curve_diameter(b)
    r = pad * diam
    return (pts.real.min() - r, pts.real.max() + r, pts.imag.min() - r, pts.imag.max() + r)


def grid_points(box, nx: int, ny: int) -> np.ndarray:
    """Row-major grid (y outer, x inner)."""
    x0, x1, y0, y1 = box
    X, Y = np.meshgrid(np.linspace(x0, x1, nx), np.linspace(y0, y1, ny))
    return (X + 1j * Y).ravel()


def resolvent_points(b: LaurentSymbol, cfg: ScanConfig | None = None, min_rel_dist: float = SCAN_MIN_REL_DIST,
                     max_points: int | None = SCAN_MAX_POINTS):
    """Grid points certified in the resolvent set and not too close to the curve.

    Returns (w, dist) arrays in grid order. Without an explicit grid in the
    config, at most ``max_points`` of them are kept.
    """
    cfg = cfg or ScanConfig()
    if cfg.grid:
        ws = grid_points(cfg.grid["box"], cfg.grid["nx"], cfg.grid["ny"])
    else:
        ws = grid_points(default_box(b), 32, 32)
    wn = np.array(winding_many(b, ws, on_curve=-999))
    ws = ws[wn == 0]
    diam = curve_diameter(b)
    dist = np.array([distance_to_curve(b, w)[0] for w in ws])
    keep = dist >= min_rel_dist * diam
    ws, dist = ws[keep], dist[keep]
    if not cfg.grid and max_points and ws.size > max_points:
        idx = np.unique(np.linspace(0, ws.size - 1, max_points).round().astype(int))
        ws, dist = ws[idx], dist[idx]
    return ws, dist


def _scan_one(args):
    b, w, dist, schedule, seed = args
    rec = {"w_re": w.real, "w_im": w.imag, "dist": dist, "winding": 0}
    try:
        s = resolvent_norm_extrapolated(b, w, schedule, dist=dist, seed=seed)
        kr = krein_bound(b, w)
    except ToeplitzError as exc:
        rec.update({"error": str(exc)})
        return rec
    rec.update({
        "normN_max": s.norm_max,
        "extrapolated": s.extrapolated,
        "krein": kr,
        "lrg_ratio": s.lrg_ratio,
        "qrg_ratio": s.qrg_ratio,
        "lower_ok": lower_bound_check(s),
        "norm_estimates": s.norm_estimates,
    })
    return rec


def resolvent_scan(b: LaurentSymbol, cfg: ScanConfig | None = None, workers: int | None = None,
                   include_spectrum: bool = False) -> list[dict]:
    """Finite-section resolvent norms and Krein bounds over the scan grid.

    With ``include_spectrum`` the grid points outside the resolvent set are
    reported too (winding and zero distance only).
    """
    cfg = cfg or ScanConfig()
    workers = worker_count(workers or cfg.workers)
    if include_spectrum:
        box = cfg.grid["box"] if cfg.grid else default_box(b)
        nx, ny = (cfg.grid["nx"], cfg.grid["ny"]) if cfg.grid else (32, 32)
        ws = grid_points(box, nx, ny)
        wn = winding_many(b, ws, on_curve=None)
        diam = curve_diameter(b)
        jobs, out = [], []
        for i, (w, k) in enumerate(zip(ws, wn)):
            if k == 0:
                d = distance_to_curve(b, w)[0]
                if d >= SCAN_MIN_REL_DIST * diam:
                    jobs.append((i, (b, complex(w), d, cfg.section_schedule, cfg.seed)))
                    continue
            out.append((i, {"w_re": w.real, "w_im": w.imag, "dist": 0.0 if k else distance_to_curve(b, w)[0],
                            "winding": k if k is not None else None}))
        done = parallel_map(_scan_one, [j for _, j in jobs], workers)
        out.extend((i, r) for (i, _), r in zip(jobs, done))
        return [r for _, r in sorted(out, key=lambda x: x[0])]
    ws, dist = resolvent_points(b, cfg)
    jobs = [(b, complex(w), float(d), cfg.section_schedule, cfg.seed) for w, d in zip(ws, dist)]
    return parallel_map(_scan_one, jobs, workers)


def _portrait_row(args):
    b, ys, xs, N, seed = args
    ws = xs + 1j * ys
    wn = winding_many(b, ws, on_curve=None)
    rows = []
    for w, k in zip(ws, wn):
        dist = distance_to_curve(b, w)[0] if k == 0 else 0.0
        try:
            s = 1.0 / resolvent_norm(b, w, N, seed=seed)
        except ToeplitzError:
            s = 0.0
        rows.append({"w_re": w.real, "w_im": w.imag, "winding": k, "dist": dist, "sigma_min": s,
                     "log10_norm": -math.log10(s) if s > 0 else math.inf})
    return rows


def portrait(b: LaurentSymbol, box, nx: int, ny: int, N: int = 400, seed: int = 0,
             workers: int = 1) -> Iterator[dict]:
    """sigma_min(T_N - w) over a raster, yielded one grid row at a time."""
    xs = np.linspace(box[0], box[1], nx)
    ys = np.linspace(box[2], box[3], ny)
    workers = worker_count(workers)
    if workers <= 1:
        for y in ys:
            yield from _portrait_row((b, y, xs, N, seed))
        return
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for rows in pool.map(_portrait_row, [(b, y, xs, N, seed) for y in ys]):
            yield from rows
