import types

import numpy as np
import pytest

from toeplitz_growth.config import ScanConfig
from toeplitz_growth.corpus import get_entry
from toeplitz_growth.curvegeom import curve_diameter, distance_to_curve, winding
from toeplitz_growth.scan import (SCAN_MIN_REL_DIST, default_box, grid_points, parallel_map, portrait,
                                  resolvent_points, resolvent_scan, worker_count)

B0 = get_entry("b0").symbol
SMALL = ScanConfig(grid={"box": [-4, 4, -2, 2], "nx": 5, "ny": 3}, section_schedule=(40, 80, 160))


def _square(x):
    return x * x


def test_worker_count_env_override(monkeypatch):
    monkeypatch.delenv("TOEPLITZ_WORKERS", raising=False)
    assert worker_count(None) == 1
    assert worker_count(3) == 3
    monkeypatch.setenv("TOEPLITZ_WORKERS", "2")
    assert worker_count(7) == 2
    monkeypatch.setenv("TOEPLITZ_WORKERS", "0")
    assert worker_count(7) == 1


def test_parallel_map_keeps_order():
    xs = list(range(23))
    assert parallel_map(_square, xs, workers=2) == [x * x for x in xs]
    assert parallel_map(_square, xs, workers=1) == [x * x for x in xs]


def test_grid_is_row_major():
    g = grid_points((0, 2, 10, 11), 3, 2)
    assert np.allclose(g, [10j, 1 + 10j, 2 + 10j, 11j, 1 + 11j, 2 + 11j])


def test_default_box_contains_curve():
    x0, x1, y0, y1 = default_box(B0)
    assert x0 < -2 and x1 > 2 and y0 < 0 < y1


def test_resolvent_points_filter():
    b = get_entry("ellipse").symbol
    ws, dist = resolvent_points(b)
    assert 200 <= ws.size <= 240
    assert np.all(dist >= SCAN_MIN_REL_DIST * curve_diameter(b))
    for w, d in list(zip(ws, dist))[::37]:
        assert winding(b, w) == 0
        assert d == pytest.approx(distance_to_curve(b, w)[0])


def test_scan_parallel_matches_serial(monkeypatch):
    monkeypatch.delenv("TOEPLITZ_WORKERS", raising=False)
    serial = resolvent_scan(B0, SMALL, workers=1)
    par = resolvent_scan(B0, SMALL, workers=2)
    assert serial == par
    assert serial and all(r["lower_ok"] and r["krein"] >= r["extrapolated"] * 0.95 for r in serial)


def test_scan_include_spectrum():
    recs = resolvent_scan(B0, SMALL, include_spectrum=True)
    assert len(recs) == 15
    mid = recs[7]
    assert (mid["w_re"], mid["w_im"]) == (0, 0)
    assert mid["winding"] == 0 or "extrapolated" not in mid


def test_portrait_streams():
    gen = portrait(B0, (-3, 3, -1, 1), 4, 3, N=24)
    assert isinstance(gen, types.GeneratorType)
    first = next(gen)
    assert (first["w_re"], first["w_im"]) == (-3, -1)
    rest = list(gen)
    assert len(rest) == 11
    for r in [first] + rest:
        if r["winding"] == 0:
            # numerical range of T_N lies in [-2, 2], which is the curve here
            assert r["sigma_min"] >= r["dist"] - 1e-9
