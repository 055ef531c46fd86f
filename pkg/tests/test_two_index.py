from __future__ import annotations

import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from tfbm.errors import DomainError, SeriesDivergenceWarning
from tfbm.kernels.fou import fou_cov, fou_variance, tfbm_cov
from tfbm.kernels.two_index import (
    two_index_cov,
    two_index_increment_variance,
    two_index_leading_term,
    two_index_offdiag_cov,
    two_index_small_time_coeff,
    two_index_tail_series,
    two_index_tfbm_cov,
    two_index_variance,
)


def quad_oracle(alpha, beta, lam, tau):
    f = lambda k: (k ** (2 * beta) + lam ** (2 * beta)) ** (-alpha) / math.pi  # noqa: E731
    if tau == 0.0:
        return integrate.quad(f, 0, np.inf, epsabs=0, epsrel=1e-12, limit=400)[0]
    return integrate.quad(f, 0, np.inf, weight="cos", wvar=tau, limlst=400)[0]


@pytest.mark.parametrize("alpha, beta", [(1.5, 0.8), (1.2, 0.7), (2.0, 0.4), (1.25, 1.0)])
@pytest.mark.parametrize("lam, tau", [(0.5, 0.2), (0.5, 3.0), (1.0, 0.9), (2.0, 1.5)])
def test_two_index_matches_scipy(alpha, beta, lam, tau):
    assert two_index_cov(alpha, beta, lam, tau).value == pytest.approx(quad_oracle(alpha, beta, lam, tau), rel=1e-7)


@pytest.mark.parametrize("alpha, beta, lam", [(1.5, 0.8, 0.5), (1.2, 0.7, 1.0), (1.0, 0.6, 2.0)])
def test_two_index_variance_closed_form_vs_quadrature(alpha, beta, lam):
    assert two_index_variance(alpha, beta, lam) == pytest.approx(quad_oracle(alpha, beta, lam, 0.0), rel=1e-9)


@pytest.mark.parametrize("args, expected", [
    ((1.5, 0.8, 0.5, 2.0), 0.447618688996616623),
    ((1.5, 0.8, 0.5, 0.05), 0.919186692154529596),
    ((1.2, 0.7, 1.0, 40.0), 5.64067045893526065e-5),
])
def test_two_index_frozen_values(args, expected):
    r = two_index_cov(*args)
    assert r.converged
    assert r.value == pytest.approx(expected, rel=1e-9)


def test_two_index_variance_frozen():
    assert two_index_variance(1.5, 0.8, 0.5) == pytest.approx(0.926022244985757142, rel=1e-13)


@pytest.mark.parametrize("alpha", [0.75, 1.25, 2.0])
@pytest.mark.parametrize("tau", [0.0, 0.1, 1.0, 5.0, 30.0])
def test_beta_one_reduces_to_fou(alpha, tau):
    assert two_index_cov(alpha, 1.0, 0.5, tau).value == pytest.approx(fou_cov(alpha, 0.5, tau), rel=1e-8)
    assert two_index_variance(alpha, 1.0, 0.5) == pytest.approx(fou_variance(alpha, 0.5), rel=1e-13)


def test_contour_and_real_axis_agree_at_the_switch():
    # just below and just above lam tau = 1 the two routes are used
    a, b, lam = 1.5, 0.8, 1.0
    below = two_index_cov(a, b, lam, 1.0 - 1e-9).value
    above = two_index_cov(a, b, lam, 1.0).value
    assert above == pytest.approx(below, rel=1e-8)


def test_increment_variance_small_time_route_matches_direct():
    a, b, lam, t = 1.5, 0.8, 0.5, 0.5
    direct = 2 * (two_index_variance(a, b, lam) - two_index_cov(a, b, lam, t).value)
    assert two_index_increment_variance(a, b, lam, t).value == pytest.approx(direct, rel=1e-9)


def test_reduced_covariance_beta_one_is_tfbm():
    for t, s in [(1.0, 2.0), (0.3, 0.3), (5.0, 0.2)]:
        assert two_index_tfbm_cov(1.25, 1.0, 0.5, t, s).value == pytest.approx(tfbm_cov(1.25, 0.5, t, s), rel=1e-8)


@given(st.floats(0.05, 4.0), st.floats(0.05, 4.0))
@settings(max_examples=20, deadline=None)
def test_reduced_covariance_symmetric(t, s):
    a = two_index_tfbm_cov(1.5, 0.8, 0.5, t, s).value
    b = two_index_tfbm_cov(1.5, 0.8, 0.5, s, t).value
    assert a == pytest.approx(b, rel=1e-12, abs=1e-15)


@given(st.floats(0.6, 3.0).flatmap(lambda a: st.tuples(st.just(a), st.floats(max(0.55 / a, 0.2), 1.0))),
       st.floats(0.2, 3.0), st.floats(0.05, 3.0), st.floats(0.3, 3.0))
@settings(max_examples=20, deadline=None)
def test_two_index_scaling_law(ab, lam, tau, r):
    # C_{lam/r}(r tau) = r^{2 alpha beta - 1} C_lam(tau)
    a, b = ab
    if a * b <= 0.55:
        return
    lhs = two_index_cov(a, b, lam / r, r * tau).value
    rhs = r ** (2 * a * b - 1) * two_index_cov(a, b, lam, tau).value
    assert lhs == pytest.approx(rhs, rel=1e-7)


def test_small_time_coefficient():
    a, b = 1.5, 0.8
    t = 1e-5
    v = two_index_increment_variance(a, b, 1.0, t).value
    assert v / t ** (2 * a * b - 1) == pytest.approx(two_index_small_time_coeff(a, b), rel=5e-3)
    # Brownian scaling at alpha beta = 1
    assert two_index_small_time_coeff(1.25, 0.8) == pytest.approx(1.0, rel=1e-12)


def test_tail_series_approaches_exact_value():
    a, b, lam = 1.2, 0.7, 1.0
    tau = 200.0
    exact = two_index_offdiag_cov(a, b, lam, tau, rtol=1e-12).value
    assert two_index_tail_series(a, b, lam, tau, 3) == pytest.approx(exact, rel=1e-3)
    assert two_index_leading_term(a, b, lam, tau) == pytest.approx(exact, rel=0.02)


def test_tail_series_divergence_warning():
    with pytest.warns(SeriesDivergenceWarning):
        two_index_tail_series(1.2, 0.7, 1.0, 2.0, 30)


def test_tail_series_no_warning_in_asymptotic_regime():
    with warnings.catch_warnings():
        warnings.simplefilter("error", SeriesDivergenceWarning)
        two_index_tail_series(1.2, 0.7, 1.0, 200.0, 3)


@pytest.mark.parametrize("alpha, beta", [(1.0, 0.4), (1.0, 1.2), (1.0, 0.0), (-1.0, 0.9)])
def test_two_index_domain(alpha, beta):
    with pytest.raises(DomainError):
        two_index_cov(alpha, beta, 1.0, 1.0)


def test_offdiag_allows_non_integrable_density():
    r = two_index_offdiag_cov(1.2, 0.4, 1.0, 40.0)
    assert math.isfinite(r.value) and r.value > 0
    with pytest.raises(DomainError):
        two_index_offdiag_cov(1.2, 0.4, 1.0, 0.0)
