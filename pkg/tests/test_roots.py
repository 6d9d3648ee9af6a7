import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from toeplitz_growth.errors import NonConvergence
from toeplitz_growth.roots import backward_error, polyroots, polyroots_batch, sort_roots

cx = st.builds(complex, st.floats(-5, 5), st.floats(-5, 5))


def test_quadratic():
    z = polyroots(np.array([1, -3, 1], dtype=complex))
    assert np.allclose(z, [(3 - 5 ** 0.5) / 2, (3 + 5 ** 0.5) / 2], atol=1e-15)


def test_double_root_is_merged():
    z = polyroots(np.array([1, -2, 1], dtype=complex))
    assert np.allclose(z, [1, 1], atol=1e-7)


def test_sorted_by_modulus_then_argument():
    z = sort_roots(np.array([2, -1, 1j, 1, 0.5]))
    assert list(np.abs(z)) == sorted(np.abs(z))
    unit = z[1:4]
    assert list(np.angle(unit) % (2 * np.pi)) == sorted(np.angle(unit) % (2 * np.pi))


@settings(max_examples=60, deadline=None)
@given(st.lists(cx, min_size=2, max_size=9).filter(lambda c: abs(c[0]) > 0.05 and abs(c[-1]) > 0.05))
def test_vieta_and_backward_error(c):
    p = np.array(c, dtype=complex)
    z = polyroots(p)
    assert z.size == p.size - 1
    assert backward_error(p, z).max() <= 1e-12
    # product of roots = (-1)^n p_0 / p_n
    want = (-1) ** z.size * p[0] / p[-1]
    assert abs(np.prod(z) - want) <= 1e-8 * max(abs(want), np.prod(np.abs(z)))


def test_batch_matches_single():
    rng = np.random.default_rng(0)
    P = rng.standard_normal((20, 6)) + 1j * rng.standard_normal((20, 6))
    Z = polyroots_batch(P)
    for p, z in zip(P, Z):
        assert np.allclose(z, polyroots(p), atol=1e-10)


def test_degree_31_converges():
    rng = np.random.default_rng(5)
    p = (rng.standard_normal(32) + 1j * rng.standard_normal(32)) * 0.5 ** np.arange(32)
    p[0] += 3
    z = polyroots(p)
    assert backward_error(p, z).max() <= 1e-12


def test_nonconvergence_error_carries_residual():
    err = NonConvergence("x", 0.5)
    assert err.best_residual == 0.5


def test_matches_companion_eigenvalues():
    rng = np.random.default_rng(5)
    for _ in range(50):
        n = int(rng.integers(2, 10))
        p = rng.standard_normal(n + 1) + 1j * rng.standard_normal(n + 1)
        ours = polyroots(p)
        ref = np.roots(p[::-1])
        # match each companion root to its nearest Aberth root
        d = np.abs(ours[:, None] - ref[None, :])
        assert np.max(d.min(axis=0)) <= 1e-8 * max(1, np.abs(ref).max())
        assert np.max(d.min(axis=1)) <= 1e-8 * max(1, np.abs(ref).max())
