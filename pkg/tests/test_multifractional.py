from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from tfbm.errors import DomainError, UnsupportedParameterError
from tfbm.kernels.base import reduce_kernel
from tfbm.kernels.curves import ParamCurve
from tfbm.kernels.fou import fou_cov, tfbm_cov
from tfbm.kernels.multifractional import (
    mou_cross_cov,
    mou_spectral_cov,
    riesz_mou_cov,
    tmbm_coefficients,
    tmbm_cov,
    var_temper_mou_cov,
    var_temper_mou_pair_kernel,
    var_temper_tmbm_cov,
    weyl_mou_cov,
)

ALPHA_LOW = ParamCurve.logistic(0.65, 0.9, 5.0, 1.0)
ALPHA_CROSS = ParamCurve.logistic(0.8, 1.2, 5.0, 1.0)
LAM_CURVE = ParamCurve.logistic(0.3, 0.8, 5.0, 1.0)


def moving_average_oracle(aa, la, ab, lb, u, v):
    """Brute-force covariance of two Weyl moving averages by scipy quadrature."""
    m = min(u, v)

    def f(y):
        x, z = u - m + y, v - m + y
        return x ** (aa - 1) * math.exp(-la * x) * z ** (ab - 1) * math.exp(-lb * z)

    total = sum(integrate.quad(f, a, b, epsabs=0, epsrel=1e-13, limit=200)[0] for a, b in ((0, 1), (1, np.inf)))
    return total / (math.gamma(aa) * math.gamma(ab))


@pytest.mark.parametrize("aa, la, ab, lb, u, v", [
    (0.7, 0.5, 0.9, 0.5, 3.0, 1.0),
    (0.9, 0.5, 0.7, 0.5, 3.0, 1.0),
    (1.3, 0.4, 0.8, 0.9, 0.5, 2.5),
    (2.0, 1.0, 1.5, 0.3, 4.0, 4.0),
])
def test_mou_cross_cov_matches_moving_average(aa, la, ab, lb, u, v):
    assert mou_cross_cov(aa, la, ab, lb, u, v) == pytest.approx(moving_average_oracle(aa, la, ab, lb, u, v),
                                                                 rel=1e-9)


def test_mou_cross_cov_frozen():
    assert mou_cross_cov(0.7, 0.5, 0.9, 0.5, 3.0, 1.0) == pytest.approx(0.209215635159217995, rel=1e-12)


@pytest.mark.parametrize("alpha", [0.75, 1.25, 2.0])
@pytest.mark.parametrize("tau", [0.0, 0.4, 3.0])
def test_constant_order_reduces_to_fou(alpha, tau):
    s = 1.0
    assert weyl_mou_cov(alpha, 0.5, s + tau, s) == pytest.approx(fou_cov(alpha, 0.5, tau), rel=1e-11)
    if alpha < 1.5:
        assert riesz_mou_cov(alpha, 0.5, s + tau, s) == pytest.approx(fou_cov(alpha, 0.5, tau), rel=1e-13)
        assert tmbm_cov(alpha, 0.5, s + tau, s) == pytest.approx(tfbm_cov(alpha, 0.5, s + tau, s), rel=1e-13)
    assert var_temper_mou_cov(alpha, 0.5, s + tau, s) == pytest.approx(fou_cov(alpha, 0.5, tau), rel=1e-11)


@given(st.floats(0.0, 10.0), st.floats(0.0, 10.0))
@settings(max_examples=40, deadline=None)
def test_weyl_mou_symmetric(t, s):
    assert weyl_mou_cov(ALPHA_CROSS, 0.5, t, s) == pytest.approx(weyl_mou_cov(ALPHA_CROSS, 0.5, s, t), rel=1e-12)


@pytest.mark.parametrize("t, s", [(3.0, 1.0), (6.0, 2.0), (5.5, 4.5)])
def test_whittaker_form_agrees_with_psi_form(t, s):
    assert mou_spectral_cov(ALPHA_LOW, 0.5, t, s) == pytest.approx(weyl_mou_cov(ALPHA_LOW, 0.5, t, s), rel=1e-9)


def test_whittaker_form_unsupported_when_later_order_exceeds_one():
    # alpha(8) is about 1.18 on this curve
    with pytest.raises(UnsupportedParameterError):
        mou_spectral_cov(ALPHA_CROSS, 0.5, 8.0, 1.0)
    with pytest.raises(DomainError):
        mou_spectral_cov(ALPHA_LOW, 0.5, 2.0, 2.0)


def test_holder_cap_applies_to_riesz_and_tmbm_only():
    steep = ParamCurve(ALPHA_CROSS.kind, ALPHA_CROSS.params, holder_exponent=0.6)
    with pytest.raises(DomainError):
        tmbm_cov(steep, 0.5, 1.0, 2.0)
    with pytest.raises(DomainError):
        riesz_mou_cov(steep, 0.5, 1.0, 2.0)
    assert math.isfinite(weyl_mou_cov(steep, 0.5, 1.0, 2.0))


def test_tmbm_coefficients_assemble():
    t, s = 3.0, 7.0
    co = tmbm_coefficients(ALPHA_CROSS, 0.5, t, s)
    assert co.assemble(t, s) == pytest.approx(tmbm_cov(ALPHA_CROSS, 0.5, t, s), rel=1e-12)


@given(st.floats(0.1, 10.0), st.floats(0.1, 10.0))
@settings(max_examples=25, deadline=None)
def test_var_temper_tmbm_is_reduction(t, s):
    base = var_temper_mou_pair_kernel(ALPHA_CROSS, LAM_CURVE, t, s)
    assert var_temper_tmbm_cov(ALPHA_CROSS, LAM_CURVE, t, s) == pytest.approx(reduce_kernel(base, t, s),
                                                                             rel=1e-10, abs=1e-13)


def test_var_temper_mou_matches_moving_average():
    t, s = 6.0, 2.0
    expected = moving_average_oracle(ALPHA_CROSS(t), LAM_CURVE(t), ALPHA_CROSS(s), LAM_CURVE(s), t, s)
    assert var_temper_mou_cov(ALPHA_CROSS, LAM_CURVE, t, s) == pytest.approx(expected, rel=1e-9)


def test_var_temper_tmbm_pinned_origin():
    assert var_temper_tmbm_cov(ALPHA_CROSS, LAM_CURVE, 0.0, 3.0) == 0.0
