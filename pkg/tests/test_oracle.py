import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from strategies import laurent

from toeplitz_growth.curvegeom import distance_to_spectrum
from toeplitz_growth.errors import SingularSection
from toeplitz_growth.oracle import (ResolventSample, extrapolate, lower_bound_check, resolvent_norm,
                                    resolvent_norm_extrapolated, sigma_min, toeplitz_section)
from toeplitz_growth.symbol import LaurentSymbol, evaluate, sup_norm, wiener_norm

b0 = LaurentSymbol.from_dict({-1: 1, 1: 1})
b2 = LaurentSymbol.from_dict({-1: 1, 2: 1})
b3 = LaurentSymbol.from_dict({-1: 1, 1: 4, 3: 1})


def test_b0_section():
    A = toeplitz_section(b0, 3).entries
    assert np.array_equal(A, [[0, 1, 0], [1, 0, 1], [0, 1, 0]])


@pytest.mark.parametrize("b", [b2, b3, LaurentSymbol.from_dict({-2: 1j, 0: 2, 1: -1})])
def test_orientation_by_monomial_action(b):
    # column n of T_N holds the coefficients of P_+(b t^n) at degrees 0..N-1
    N = 6
    A = toeplitz_section(b, N).entries
    for n in range(N):
        col = np.zeros(N, dtype=complex)
        for j, c in b.items():
            if 0 <= j + n < N:
                col[j + n] += c
        assert np.array_equal(A[:, n], col)


def test_b0_normal_values():
    s = resolvent_norm_extrapolated(b0, 3)
    assert 0.98 <= s.extrapolated <= 1.0
    s = resolvent_norm_extrapolated(b0, 2.1)
    assert 9.5 <= s.extrapolated <= 10.0
    assert lower_bound_check(resolvent_norm_extrapolated(b0, 3))


def test_shift_symbol():
    shift = LaurentSymbol.from_dict({1: 1})
    vals = [resolvent_norm(shift, 2, N) for N in (100, 200, 400)]
    assert all(v <= 1 + 1e-12 for v in vals)
    assert vals[-1] == pytest.approx(1, abs=1e-3)


def test_singular_section_raises():
    with pytest.raises(SingularSection):
        resolvent_norm(LaurentSymbol.from_dict({1: 1}), 0, 50)


@pytest.mark.parametrize("w", [3, 2.1, 2 + 1j, -2.5])
def test_normal_family_monotone(w):
    vals = [resolvent_norm(b0, w, N) for N in (25, 50, 100, 200, 400)]
    assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))


@settings(max_examples=25, deadline=None)
@given(laurent(), st.floats(0, 2 * np.pi))
def test_neumann_sandwich(b, th):
    w = 10 * wiener_norm(b) * np.exp(1j * th)
    v = resolvent_norm(b, w, 200)
    s = sup_norm(b)
    assert 1 / (abs(w) + s) * (1 - 1e-9) <= v <= 1 / (abs(w) - s) * (1 + 1e-9)


@settings(max_examples=15, deadline=None)
@given(laurent(), st.floats(0, 2 * np.pi), st.floats(2, 4))
def test_far_field_neumann_bound(b, th, r):
    w = r * sup_norm(b) * np.exp(1j * th)
    s = resolvent_norm_extrapolated(b, w)
    assert s.extrapolated <= 3 / s.dist


@settings(max_examples=25, deadline=None)
@given(laurent(), st.builds(complex, st.floats(-4, 4), st.floats(-4, 4)))
def test_conjugation_symmetry(b, w):
    bc = LaurentSymbol(np.conj(b.coeffs), b.m)
    try:
        v = resolvent_norm(b, w, 60)
    except SingularSection:
        return
    assert resolvent_norm(bc, np.conj(w), 60) == pytest.approx(v, rel=1e-10)


def test_sigma_min_routes_agree():
    rng = np.random.default_rng(1)
    for _ in range(20):
        N = int(rng.integers(8, 100))
        b = LaurentSymbol(rng.standard_normal(5) + 1j * rng.standard_normal(5), 2)
        A = toeplitz_section(b, N).matrix - 4 * sp.identity(N, format="csc")
        ref = sigma_min(A, "svd")
        for method in ("lanczos", "banded", "auto"):
            assert sigma_min(A, method) == pytest.approx(ref, rel=1e-8)


def test_large_section_lanczos():
    # above the dense cutoff: b0 at w=3 is the normal equality case
    assert resolvent_norm(b0, 3, 2000) == pytest.approx(1, abs=1e-4)


def test_extrapolate_rules():
    assert extrapolate([1.0, 1.001, 1.002]) == 1.002
    # O(1/N) convergence on a doubling schedule: Aitken is exact
    vals = [2 - 10 / n for n in (100, 200, 400)]
    assert extrapolate(vals) == pytest.approx(2, rel=1e-12)
    # increments barely shrinking: no extrapolation beyond the observed max
    assert extrapolate([1, 2, 2.95]) == 2.95


def test_extrapolated_at_least_max_observed():
    s = resolvent_norm_extrapolated(b3, 6 + 1j)
    assert s.extrapolated >= s.norm_max - 1e-9


def test_lower_bound_check_wiring():
    s = ResolventSample(3, 2.0, [(100, 0.25)], 0.25)
    assert not lower_bound_check(s)
    s = ResolventSample(3, 2.0, [(100, 0.5)], 0.5)
    assert lower_bound_check(s)


def test_b3_w0_is_spectrum():
    # b3(T) winds once around 0, so dist(0, sigma) = 0 and sections blow up
    assert distance_to_spectrum(b3, 0) == 0
    vals = [resolvent_norm(b3, 0, N) for N in (8, 16, 32)]
    assert vals[1] > 100 * vals[0] and vals[2] > 100 * vals[1]


def test_schedule_validation():
    with pytest.raises(ValueError):
        resolvent_norm_extrapolated(b0, 3, (100, 100, 200))
