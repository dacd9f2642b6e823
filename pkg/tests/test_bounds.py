import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from chebsurf.bounds import (
    BoundsDomainError,
    bound_report,
    epsilon_interval,
    equal_likelihood_sample_size,
    expected_surface_count,
    k_bracket,
    max_parameter_order,
    surface_lower_bound,
    tail_bound,
    univariate_tail_bound,
)


@pytest.mark.parametrize("n, eps, expected", [(3, 4, 0.75), (3, 3, 1.0), (3, 1e12, 3e-12), (3, 1, 1.0)])
def test_tail_bound(n, eps, expected):
    assert tail_bound(n, eps) == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("n, eps, expected", [(3, 4, 0.25), (3, 3, 0.0), (3, 6, 0.5), (3, 2, 0.0)])
def test_lower_bound(n, eps, expected):
    assert surface_lower_bound(n, eps) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("fn", [tail_bound, surface_lower_bound])
def test_non_positive_epsilon(fn):
    with pytest.raises(ValueError):
        fn(3, 0)
    with pytest.raises(ValueError):
        fn(3, -1.0)


def test_univariate_tail():
    assert univariate_tail_bound(2.0) == 0.25
    assert univariate_tail_bound(0.5) == 1.0


def test_equal_likelihood_examples():
    assert equal_likelihood_sample_size(4, 3) == 16.0
    assert equal_likelihood_sample_size(6, 3) == 12.0
    with pytest.raises(BoundsDomainError):
        equal_likelihood_sample_size(3, 3)
    with pytest.raises(BoundsDomainError):
        equal_likelihood_sample_size(2, 3)


@given(st.integers(1, 64), st.floats(1e-6, 1e6))
def test_equal_likelihood_identity(n, gap):
    # Evaluated exactly: 1 - N/eps in floating point cancels catastrophically
    # near eps = N and would measure the check, not the implementation.
    eps = n + gap
    m = Fraction(equal_likelihood_sample_size(eps, n))
    e = Fraction(eps)
    assert abs((m / e) * (1 - n / e) - 1) <= Fraction(1, 10 ** 9)


@given(st.integers(1, 50), st.floats(1e-3, 1e9))
def test_tail_plus_lower_is_one(n, eps):
    tb, lb = tail_bound(n, eps), surface_lower_bound(n, eps)
    assert 0.0 <= tb <= 1.0 and 0.0 <= lb <= 1.0
    if eps >= n:
        assert tb + lb == pytest.approx(1.0, abs=1e-12)


def test_epsilon_interval():
    assert epsilon_interval(3, 4096) == (3, 4096)
    assert epsilon_interval(1, 2) == (1, 2)
    with pytest.raises(BoundsDomainError):
        epsilon_interval(3, 3)


@pytest.mark.parametrize("m, expected", [(4096, 64.0), (1, 1.0), (16, 4.0)])
def test_max_order(m, expected):
    assert max_parameter_order(m) == expected


@pytest.mark.parametrize("m, eps, expected", [(4096, 4, 1024.0), (4096, 32, 128.0), (777, 1, 777.0)])
def test_expected_surfaces(m, eps, expected):
    assert expected_surface_count(m, eps) == expected


def test_k_bracket_matches_brute_force():
    for m in range(1, 3000):
        lo, hi = k_bracket(m)
        assert lo < hi
        for k in range(1, int(math.isqrt(m)) + 3):
            inside = k + 1 < m / k < k + 2
            assert inside == (lo < k < hi), (m, k)


def test_k_bracket_tracks_sqrt():
    for m in (10 ** 2, 10 ** 4, 10 ** 6):
        lo, hi = k_bracket(m)
        assert lo <= math.sqrt(m) <= hi + 1


def test_bound_report():
    r = bound_report(3, 4096, 4.0).to_dict()
    assert r == {
        "n_features": 3, "epsilon": 4.0, "m_pixels": 4096, "tail_bound": 0.75,
        "lower_bound": 0.25, "expected_surfaces": 1024.0, "epsilon_interval": [3.0, 4096.0],
        "max_order": 64.0,
    }
    r = bound_report(5, 4).to_dict()
    assert r["epsilon_interval"] is None and r["tail_bound"] is None


def _samplers():
    def normal(rng, n):
        cov = np.array([[4.0, 1.0, 0.5], [1.0, 2.0, 0.3], [0.5, 0.3, 1.0]])
        return rng.multivariate_normal([1.0, -2.0, 3.0], cov, size=n)

    def cube(rng, n):
        return rng.uniform(-1.0, 1.0, size=(n, 3)) @ np.array([[1, 0, 0], [0.5, 2, 0], [0, 0, 0.3]])

    def heavy(rng, n):
        # Mixture of a tight core and a wide student-t component (df=5).
        core = rng.normal(size=(n, 3))
        wide = 6.0 * rng.standard_t(5, size=(n, 3))
        return np.where(rng.random((n, 1)) < 0.9, core, wide)

    return {"normal": normal, "uniform_cube": cube, "heavy_mixture": heavy}


def empirical_tail(x, eps):
    mu = x.mean(axis=0)
    cov = np.cov(x, rowvar=False)
    dev = x - mu
    d = np.einsum("ij,jk,ik->i", dev, np.linalg.inv(cov), dev)
    return float(np.mean(d >= eps))


@pytest.mark.parametrize("family", sorted(_samplers()))
def test_chebyshev_monte_carlo(family):
    x = _samplers()[family](np.random.default_rng(99), 100_000)
    for eps in (4, 8, 16, 32):
        assert empirical_tail(x, eps) <= tail_bound(3, eps) + 0.01
