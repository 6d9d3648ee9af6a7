"""
Simultaneous polynomial root finding (Aberth-Ehrlich) with Newton polish.

Polynomials are given by ascending coefficients ``p[0] + p[1] z + ... + p[n] z^n``.
The solver is vectorised over a batch of polynomials of equal degree, which is
how the scans use it: thousands of P(., w) differing in one coefficient.
"""

from __future__ import annotations

import numpy as np

from .errors import NonConvergence

BACKWARD_TOL = 1e-12


def _horner(p, z):
    """p(z) and p'(z) for ascending coefficient rows ``p`` (B, n+1) and points ``z`` (B, r)."""
    val = np.repeat(p[:, -1:], z.shape[1], axis=1)
    der = np.zeros_like(val)
    for j in range(p.shape[1] - 2, -1, -1):
        der = der * z + val
        val = val * z + p[:, j:j + 1]
    return val, der


def backward_error(p, z):
    """|p(z)| / sum_j |p_j| |z|^j, elementwise over a batch."""
    p = np.atleast_2d(p)
    z = np.atleast_2d(z)
    val, _ = _horner(p, z)
    scale = _abs_horner(p, z)
    return np.abs(val) / np.where(scale > 0, scale, 1.0)


def _initial_guesses(p):
    n = p.shape[1] - 1
    a0 = np.abs(p[:, 0])
    an = np.abs(p[:, -1])
    # geometric mean of the root moduli; fall back to 1 when p(0) = 0
    radius = np.where(a0 > 0, (a0 / an) ** (1.0 / n), 1.0)
    ang = 2 * np.pi * np.arange(n) / n + 0.4
    return radius[:, None] * np.exp(1j * ang)[None, :]


def _abs_horner(p, z):
    """sum_j |p_j| |z|^j, the scale for backward errors."""
    absz = np.abs(z)
    scale = np.repeat(np.abs(p[:, -1:]), z.shape[1], axis=1)
    for j in range(p.shape[1] - 2, -1, -1):
        scale = scale * absz + np.abs(p[:, j:j + 1])
    return scale


def aberth_batch(p, tol=1e-15, max_iter=500):
    """Roots of every row of ``p`` (ascending coefficients, shape (B, n+1)).

    A root stops moving once its Aberth step is below ``tol`` relative to its
    modulus or its residual is at rounding level. Rows whose roots have all
    stopped are dropped from further iterations.

    Returns (roots, converged) with roots of shape (B, n).
    """
    p = np.asarray(p, dtype=complex)
    if p.ndim == 1:
        p = p[None, :]
    if np.any(p[:, -1] == 0):
        raise ValueError("leading coefficient must be nonzero")
    B, n1 = p.shape
    n = n1 - 1
    if n == 0:
        return np.zeros((B, 0), dtype=complex), np.ones(B, dtype=bool)
    if n == 1:
        return (-p[:, :1] / p[:, 1:]), np.ones(B, dtype=bool)
    z_all = _initial_guesses(p)
    active_all = np.ones((B, n), dtype=bool)
    rows = np.arange(B)
    eye = np.eye(n, dtype=bool)[None]
    eps = np.finfo(float).eps
    for _ in range(max_iter):
        pr, z, active = p[rows], z_all[rows], active_all[rows]
        val, der = _horner(pr, z)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = val / der
            diff = z[:, :, None] - z[:, None, :]
            inv = np.where(eye, 0.0, 1.0 / np.where(eye, 1.0, diff))
            s = inv.sum(axis=2)
            step = ratio / (1.0 - ratio * s)
        # a residual at rounding level freezes the root where it is
        tiny = np.abs(val) <= 4 * eps * _abs_horner(pr, z)
        active &= ~tiny
        step = np.where(np.isfinite(step) & active, step, 0.0)
        z = z - step
        small = np.abs(step) <= tol * np.maximum(np.abs(z), 1e-300)
        active &= ~small
        z_all[rows] = z
        active_all[rows] = active
        rows = rows[active.any(axis=1)]
        if rows.size == 0:
            break
    return z_all, ~active_all.any(axis=1)


def _newton_polish(p, z, steps=3):
    for _ in range(steps):
        val, der = _horner(p, z)
        with np.errstate(divide="ignore", invalid="ignore"):
            cand = z - val / der
        ok = np.isfinite(cand)
        old = backward_error(p, z)
        new = backward_error(p, np.where(ok, cand, z))
        z = np.where(ok & (new < old), cand, z)
    return z


def _merge_clusters(p, z, rtol=1e-4, tol=BACKWARD_TOL):
    """Replace tight clusters of approximate roots by their centroid.

    A root of multiplicity s is only resolved to ~eps^(1/s); its approximations
    are spread symmetrically, so the centroid is accurate to near eps. A
    cluster is merged only if the centroid itself has backward error <= tol,
    which keeps genuinely distinct close roots apart.
    """
    n = z.shape[1]
    if n < 2:
        return z
    d = np.abs(z[:, :, None] - z[:, None, :])
    scale = np.maximum(1.0, np.abs(z))[:, :, None]
    near = (d <= rtol * scale) & ~np.eye(n, dtype=bool)[None]
    rows = np.flatnonzero(near.any(axis=(1, 2)))
    z = z.copy()
    for r in rows:
        row = z[r]
        used = np.zeros(n, dtype=bool)
        for i in range(n):
            if used[i]:
                continue
            close = (~used) & (np.abs(row - row[i]) <= rtol * max(1.0, abs(row[i])))
            if close.sum() > 1:
                c = row[close].mean()
                if backward_error(p[r:r + 1], np.array([[c]]))[0, 0] <= tol:
                    row[close] = c
            used |= close
    return z


def sort_roots(z, rtol=1e-10):
    """Sort by ascending modulus; moduli equal to ``rtol`` are ordered by argument."""
    z = np.asarray(z)
    if z.ndim > 1:
        z = np.take_along_axis(z, np.argsort(np.abs(z), axis=1, kind="stable"), axis=1)
        mod = np.abs(z)
        ties = np.flatnonzero((np.diff(mod, axis=1) <= rtol * mod[:, 1:]).any(axis=1))
        for r in ties:
            z[r] = sort_roots(z[r], rtol)
        return z
    z = z[np.argsort(np.abs(z), kind="stable")]
    mod = np.abs(z)
    out = []
    i = 0
    while i < z.size:
        j = i + 1
        while j < z.size and mod[j] - mod[i] <= rtol * max(mod[j], 1e-300):
            j += 1
        group = z[i:j]
        out.extend(group[np.argsort(np.angle(group), kind="stable")])
        i = j
    return np.array(out, dtype=z.dtype)


def polyroots(p, tol=BACKWARD_TOL, max_iter=500, sort=True):
    """All roots of one polynomial with ascending coefficients ``p``.

    Raises NonConvergence if the backward error of some root exceeds ``tol``.
    """
    p = np.asarray(p, dtype=complex)
    z = polyroots_batch(p[None, :], tol=tol, max_iter=max_iter, sort=sort)
    return z[0]


def polyroots_batch(p, tol=BACKWARD_TOL, max_iter=500, sort=True):
    p = np.atleast_2d(np.asarray(p, dtype=complex))
    z, _ = aberth_batch(p, max_iter=max_iter)
    if z.shape[1] == 0:
        return z
    z = _newton_polish(p, z)
    z = _merge_clusters(p, z)
    err = backward_error(p, z)
    worst = float(err.max())
    if not worst <= tol:
        raise NonConvergence(f"root finder backward error {worst:.3e} exceeds {tol:.1e}", worst)
    if sort:
        z = sort_roots(z)
    return z
