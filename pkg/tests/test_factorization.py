import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from strategies import two_sided

from toeplitz_growth.config import ScanConfig
from toeplitz_growth.curvegeom import distance_to_curve, in_resolvent_set
from toeplitz_growth.divisor import regularity_scan
from toeplitz_growth.errors import HypothesisNotMet, NotStabilized
from toeplitz_growth.factorization import bound_report, factor_sup_norms, factorize, krein_bound, lrg_constant
from toeplitz_growth.symbol import LaurentSymbol, sup_norm

b0 = LaurentSymbol.from_dict({-1: 1, 1: 1})
b3 = LaurentSymbol.from_dict({-1: 1, 1: 4, 3: 1})
ellipse = LaurentSymbol.from_dict({-1: 1, 1: 2})
PHI = (1 + 5 ** 0.5) / 2


def test_b0_factors():
    pair = factorize(b0, 3)
    assert np.allclose(pair.interior, [(3 - 5 ** 0.5) / 2])
    assert np.allclose(pair.exterior, [(3 + 5 ** 0.5) / 2])
    assert pair.scale == 1
    assert pair.a_minus(1) * pair.a_plus(1) == pytest.approx(-1, abs=1e-14)
    assert pair.a_minus(1) == pytest.approx(1 / PHI) and pair.a_plus(1) == pytest.approx(-PHI)
    assert pair.reconstruction_error(b0) < 1e-15


def test_b3_factor_degrees():
    pair = factorize(b3, 10)
    assert (len(pair.interior), len(pair.exterior)) == (1, 3)


@pytest.mark.parametrize("b, w", [(ellipse, 0), (b3, 0), (b0, 1)])
def test_factorize_rejects_points_off_omega(b, w):
    with pytest.raises(HypothesisNotMet):
        factorize(b, w)


def test_b0_sup_norms_and_krein():
    p, q = factor_sup_norms(factorize(b0, 3))
    assert p == pytest.approx(1 / PHI, rel=1e-9)
    assert q == pytest.approx(PHI, rel=1e-9)
    assert krein_bound(b0, 3) == pytest.approx(1, rel=1e-9)


def test_neumann_branch():
    rep = bound_report(b0, 100)
    assert rep.neumann == pytest.approx(3 / 98, rel=1e-9)
    assert rep.generic_plus is None


def test_ellipse_refined_minus():
    reg = regularity_scan(ellipse)
    rng = np.random.default_rng(2)
    for _ in range(10):
        w = 3.2 * np.exp(2j * np.pi * rng.uniform())
        rep = bound_report(ellipse, w, reg)
        assert rep.refined_minus <= 1 / (2 * (1 - 2 ** -0.5)) + 1e-9
        assert rep.krein <= rep.generic_plus * rep.refined_minus * (1 + 1e-9)


def test_irregular_symbol_has_no_refined_bounds():
    reg = regularity_scan(b0)
    rep = bound_report(b0, 2.5, reg)
    assert rep.refined_minus is None and rep.refined_plus is None
    assert rep.generic_minus is not None


@settings(max_examples=40, deadline=None)
@given(two_sided, st.builds(complex, st.floats(-6, 6), st.floats(-6, 6)))
def test_krein_and_generic_inequalities(b, w):
    dist = distance_to_curve(b, w)[0]
    if dist < 1e-4 or not in_resolvent_set(b, w):
        return
    pair = factorize(b, w)
    kr = krein_bound(b, w, pair)
    assert kr * dist >= 1 - 1e-9
    plus, _ = factor_sup_norms(pair)
    if abs(w) <= 2 * sup_norm(b):
        assert plus * dist <= 2 ** b.m * abs(b[b.k]) * (1 + 1e-9)


def test_lrg_needs_levels_to_stabilize():
    cfg = ScanConfig(lrg_levels=2)
    with pytest.raises(NotStabilized) as info:
        lrg_constant(ellipse, cfg)
    trace = info.value.trace
    assert len(trace) == 2
    assert trace[-1]["running_sup"] >= 1 - 1e-9


def test_lrg_irregular_returns_no_constant():
    cfg = ScanConfig(lrg_levels=2)
    res = lrg_constant(b0, cfg, regularity_scan(b0))
    assert res.C_lrg is None and len(res.trace) == 2
