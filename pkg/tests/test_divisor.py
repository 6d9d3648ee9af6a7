import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import linear_sum_assignment

from strategies import two_sided

from toeplitz_growth.config import ScanConfig
from toeplitz_growth.curvegeom import distance_to_curve, in_resolvent_set
from toeplitz_growth.divisor import (apolar_grace_test, best_grace, count_check, regularity_scan, roots_of_P,
                                     split_divisor, vieta_residuals, zero_divisor)
from toeplitz_growth.errors import HypothesisNotMet
from toeplitz_growth.symbol import LaurentSymbol

b0 = LaurentSymbol.from_dict({-1: 1, 1: 1})
b2 = LaurentSymbol.from_dict({-1: 1, 2: 1})
b3 = LaurentSymbol.from_dict({-1: 1, 1: 4, 3: 1})
ellipse = LaurentSymbol.from_dict({-1: 1, 1: 2})
grace = LaurentSymbol.from_dict({-1: 1, 2: 2})


def test_roots_b0_w3():
    z = roots_of_P(b0, 3)
    assert np.allclose(z, [(3 - 5 ** 0.5) / 2, (3 + 5 ** 0.5) / 2], atol=1e-15)


def test_roots_b0_w2_double_root():
    z = roots_of_P(b0, 2)
    assert np.allclose(z, [1, 1], atol=1e-7)
    zd = zero_divisor(b0, 2)
    assert zd.counts() == (0, 2, 0)


def test_divisor_b0_w3():
    zd = zero_divisor(b0, 3)
    assert zd.counts() == (1, 0, 1) and zd.counts_match(1, 1)


def test_divisor_inside_ellipse_flags_mismatch():
    # P = 1 + 2z^2: roots +-i/sqrt(2), both inside; w = 0 has winding 1
    zd = zero_divisor(ellipse, 0)
    assert zd.counts() == (2, 0, 0)
    assert not zd.counts_match(1, 1)
    assert np.allclose(sorted(np.abs(zd.roots)), [2 ** -0.5] * 2)


@pytest.mark.parametrize("b, w", [(b3, 10), (b0, 3), (b2, 5)])
def test_count_check_examples(b, w):
    assert count_check(b, w)


def test_band_validation():
    with pytest.raises(ValueError):
        split_divisor(np.array([0.5, 2]), 0.5, 0)


@settings(max_examples=50, deadline=None)
@given(two_sided, st.builds(complex, st.floats(-5, 5), st.floats(-5, 5)))
def test_vieta_and_total_count(b, w):
    z = roots_of_P(b, w)
    assert z.size == b.m + b.k
    s_err, p_err = vieta_residuals(b, w, z)
    assert s_err <= 1e-8 and p_err <= 1e-8
    zd = zero_divisor(b, w)
    assert sum(zd.counts()) == b.m + b.k


@settings(max_examples=50, deadline=None)
@given(two_sided, st.builds(complex, st.floats(-6, 6), st.floats(-6, 6)))
def test_counts_on_resolvent_set(b, w):
    if distance_to_curve(b, w)[0] < 1e-6 or not in_resolvent_set(b, w):
        return
    assert zero_divisor(b, w).counts_match(b.m, b.k)


@settings(max_examples=40, deadline=None)
@given(two_sided, st.builds(complex, st.floats(-4, 4), st.floats(-4, 4)), st.floats(0, 2 * math.pi))
def test_root_continuity(b, w, th):
    z1 = roots_of_P(b, w)
    z2 = roots_of_P(b, w + 1e-6 * np.exp(1j * th))
    gaps = np.abs(z1[:, None] - z1[None, :]) + np.eye(z1.size)
    if gaps.min() < 1e-2:
        return  # near a multiple root displacement scales like delta^(1/mult)
    cost = np.abs(z1[:, None] - z2[None, :])
    r, c = linear_sum_assignment(cost)
    assert cost[r, c].max() <= 1e-3


@settings(max_examples=20, deadline=None)
@given(two_sided, st.floats(0, 2 * math.pi))
def test_remark_cutoff(b, th):
    from toeplitz_growth.symbol import wiener_norm
    w = 2.0 ** b.degree * wiener_norm(b) * np.exp(1j * th)
    z = np.abs(roots_of_P(b, w))
    assert z[b.m - 1] <= 0.5 + 1e-9 and z[b.m] >= 2 - 1e-9


# -- apolarity certificate ---------------------------------------------------


def test_grace_example():
    g = apolar_grace_test(grace, 0)
    assert g.applies and g.rho == pytest.approx(0.5 ** (1 / 3), rel=1e-14)


def test_grace_counterexample_applies():
    zeta = np.exp(3j * np.pi / 4)
    assert abs(zeta + 1) < 1
    c2 = 1 / (zeta * (zeta + 1))
    b = LaurentSymbol.from_dict({-1: 1, 2: c2})
    assert abs(c2) > 1
    assert abs(b(zeta) - b(1)) < 1e-12
    g = best_grace(b)
    assert g is not None and g.applies and g.rho < 1


def test_grace_not_applicable_to_b0():
    assert not apolar_grace_test(b0, 0).applies
    assert best_grace(b0) is None


def test_grace_needs_m_one():
    with pytest.raises(HypothesisNotMet):
        apolar_grace_test(LaurentSymbol.from_dict({-2: 1, 1: 1}), 0)


# -- regularity scan -------------------------------------------------------------


@pytest.fixture(scope="module")
def reports():
    return {name: regularity_scan(b) for name, b in
            (("b0", b0), ("ellipse", ellipse), ("b3", b3), ("grace", grace))}


def test_b0_irregular(reports):
    rep = reports["b0"]
    assert rep.verdict == "irregular"
    assert rep.sup_interior_modulus > 0.999
    assert rep.count_violations == 0


@pytest.mark.parametrize("name", ["ellipse", "b3", "grace"])
def test_regular_symbols(reports, name):
    rep = reports[name]
    assert rep.verdict == "regular"
    assert rep.count_violations == 0
    assert rep.n_samples > 1000


def test_grace_rho_bounds_scan(reports):
    assert reports["grace"].r_estimate <= 0.5 ** (1 / 3)


def test_ellipse_interior_roots(reports):
    # P = 1 - wz + 2z^2 has root product 1/2, so |z_1| <= 1/sqrt(2)
    assert reports["ellipse"].r_estimate <= 2 ** -0.5 + 1e-12


def test_report_json_shape(reports):
    d = reports["b0"].to_json()
    assert d["verdict"] == "irregular" and set(d["constants"]) >= {"C1", "C2", "C3"}


def test_margin_too_coarse_changes_nothing_for_regular():
    rep = regularity_scan(ellipse, ScanConfig(margin=1e-2, max_level=12))
    assert rep.verdict == "regular"
