from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate as sp_integrate

from tfbm import quad


def test_integrate_polynomial_exact():
    r = quad.integrate(lambda x: 3 * x**2, 0.0, 2.0)
    assert r.value == pytest.approx(8.0, rel=1e-14)
    assert r.converged


def test_integrate_endpoint_singularity():
    r = quad.integrate(lambda x: x ** (-0.5), 0.0, 1.0, tol=1e-10)
    assert r.value == pytest.approx(2.0, abs=1e-9)


def test_quadresult_arithmetic():
    a = quad.QuadResult(1.0, 1e-12, 10, True)
    b = quad.QuadResult(2.0, 2e-12, 5, False)
    c = a + b
    assert (c.value, c.nodes_used, c.converged) == (3.0, 15, False)
    assert c.abs_err == pytest.approx(3e-12)
    assert a.scaled(-2.0).value == -2.0 and a.scaled(-2.0).abs_err == 2e-12
    assert float(a) == 1.0


@pytest.mark.parametrize("g, expected", [
    (lambda u: np.exp(-u), 1.0),
    (lambda u: u ** -0.5 * np.exp(-u), math.sqrt(math.pi)),
    # Psi closed form: int u^{a-1} (1+u)^{b-a-1} e^{-zu} du = Gamma(a) z^{-a} with b = a + 1
    (lambda u: u ** -0.25 * np.exp(-2.0 * u), math.gamma(0.75) * 2.0**-0.75),
])
def test_laplace_integral_examples(g, expected):
    assert quad.laplace_integral(g, 1e-12).value == pytest.approx(expected, rel=1e-11)


@pytest.mark.parametrize("tau, expected", [
    (0.0, math.pi / 2),            # int_0^inf (1+k^2)^{-1} dk
    (1.0, math.pi / 2 * math.exp(-1.0)),
    (7.5, math.pi / 2 * math.exp(-7.5)),
])
def test_cosine_transform_lorentzian(tau, expected):
    r = quad.cosine_transform(lambda k: 1.0 / (1.0 + k * k), tau, 0.0, rtol=1e-11, scale=1.0)
    assert r.value == pytest.approx(expected, rel=1e-9)


def test_cosine_transform_slow_algebraic_decay():
    # int_0^inf cos(k tau) (1 + k^2)^{-0.3} dk: slowly decaying tail; reference by scipy's QAWF
    f = lambda k: (1.0 + k * k) ** -0.3  # noqa: E731
    ref, _ = sp_integrate.quad(f, 0, np.inf, weight="cos", wvar=2.0, limlst=200)
    r = quad.cosine_transform(f, 2.0, 0.0, rtol=1e-10, scale=1.0)
    assert r.value == pytest.approx(ref, rel=1e-8)


def test_tail_acceleration_inverse_square():
    # int_1^inf cos(k) / k^2 dk = cos(1) - (pi/2 - Si(1))
    from scipy.special import sici

    expected = math.cos(1.0) - (math.pi / 2 - sici(1.0)[0])
    head = quad.integrate(lambda k: np.cos(k) / k**2, 1.0, 2.5 * math.pi, 1e-14)
    tail = quad._oscillatory_tail(lambda k: 1.0 / k**2, 2.5 * math.pi, 1.0, 1e-13)
    assert head.value + tail.value == pytest.approx(expected, abs=1e-11)


@given(st.floats(0.05, 20.0), st.floats(0.2, 3.0), st.floats(0.2, 3.0))
@settings(max_examples=30, deadline=None)
def test_cosine_transform_linear(tau, a, b):
    f = lambda k: 1.0 / (a * a + k * k)  # noqa: E731
    g = lambda k: 1.0 / (b * b + k * k) ** 1.5  # noqa: E731
    tol = 1e-10
    rf = quad.cosine_transform(f, tau, tol)
    rg = quad.cosine_transform(g, tau, tol)
    rs = quad.cosine_transform(lambda k: f(k) + g(k), tau, tol)
    assert abs(rs.value - (rf.value + rg.value)) <= 2 * tol + 1e-13


def test_sine_squared_transform_matches_cosine_difference():
    f = lambda k: 1.0 / (1.0 + k * k) ** 1.2  # noqa: E731
    c0 = quad.cosine_transform(f, 0.0, 0.0, rtol=1e-12).value
    c1 = quad.cosine_transform(f, 0.8, 0.0, rtol=1e-12).value
    s = quad.sine_squared_transform(f, 0.8, 0.0, rtol=1e-12).value
    # 2 sin^2(k tau / 2) = 1 - cos(k tau)
    assert s == pytest.approx(c0 - c1, rel=1e-10)


def test_rotated_contour_matches_real_axis():
    f = lambda k: (k * k + 0.25) ** -1.3  # noqa: E731
    real = quad.cosine_transform(f, 6.0, 0.0, rtol=1e-12, scale=0.5).value
    rot = quad.rotated_cosine_transform(f, 6.0, [0.5], 0.0, rtol=1e-12).value
    assert rot == pytest.approx(real, rel=1e-9)


def test_loglog_fit_exact_power():
    x = np.array([1.0, 2.0, 3.0, 5.0, 8.0])
    slope, pref, r2 = quad.loglog_power_fit(x, 3 * x**2)
    assert slope == pytest.approx(2.0, rel=1e-13)
    assert pref == pytest.approx(3.0, rel=1e-13)
    assert r2 == pytest.approx(1.0, abs=1e-13)


def test_loglog_fit_noisy():
    rng = np.random.default_rng(3)
    x = np.geomspace(0.01, 10, 40)
    y = x**1.5 * (1 + 0.01 * rng.standard_normal(x.size))
    slope, _, _ = quad.loglog_power_fit(x, y)
    assert abs(slope - 1.5) <= 0.02


def test_loglog_fit_constant_ys():
    slope, pref, _ = quad.loglog_power_fit([1.0, 2.0, 4.0, 8.0], [5.0] * 4)
    assert slope == pytest.approx(0.0, abs=1e-14)
    assert pref == pytest.approx(5.0)


@pytest.mark.parametrize("xs, ys", [
    ([1.0, 2.0, 3.0], [1.0, 2.0, 3.0]),               # too few points
    ([1.0, 2.0, 3.0, -4.0], [1.0, 2.0, 3.0, 4.0]),    # non-positive x
    ([1.0, 1.0, 1.0, 1.0], [1.0, 2.0, 3.0, 4.0]),     # constant x
    ([1.0, 2.0, 3.0, 4.0], [1.0, 0.0, 3.0, 4.0]),     # non-positive y
])
def test_loglog_fit_degenerate(xs, ys):
    with pytest.raises(ValueError):
        quad.loglog_power_fit(xs, ys)
