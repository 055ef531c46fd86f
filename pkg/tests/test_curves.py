from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tfbm.errors import DomainError
from tfbm.kernels.curves import CurveKind, ParamCurve, as_curve


def test_constant_curve():
    c = ParamCurve.constant(1.25)
    assert c(3.0) == 1.25
    assert c.is_constant
    np.testing.assert_array_equal(c(np.array([0.0, 1.0])), [1.25, 1.25])


def test_linear_clamped():
    c = ParamCurve.linear_clamped(0.5, 0.1, 0.6, 0.9)
    assert c(0.0) == 0.6 and c(2.0) == pytest.approx(0.7) and c(10.0) == 0.9
    assert (c.lower_bound, c.upper_bound) == (0.6, 0.9)


def test_logistic_endpoints_and_midpoint():
    c = ParamCurve.logistic(0.8, 1.2, 5.0, 1.0)
    assert c(5.0) == pytest.approx(1.0)
    assert c(-100.0) == pytest.approx(0.8) and c(100.0) == pytest.approx(1.2)
    assert c.holder_constant == pytest.approx(0.1)


def test_table_interpolation():
    c = ParamCurve.table([0.0, 1.0, 3.0], [0.7, 0.9, 0.8])
    assert c(0.5) == pytest.approx(0.8) and c(2.0) == pytest.approx(0.85)
    assert (c.lower_bound, c.upper_bound) == (0.7, 0.9)


@given(st.floats(0.55, 1.4), st.floats(0.55, 1.4), st.floats(-5, 5), st.floats(0.1, 5), st.floats(-50, 50))
def test_logistic_stays_within_bounds(lo, hi, mid, k, t):
    c = ParamCurve.logistic(lo, hi, mid, k)
    assert c.lower_bound - 1e-15 <= c(t) <= c.upper_bound + 1e-15


def test_declared_bounds_must_contain_range():
    with pytest.raises(DomainError):
        ParamCurve(CurveKind.LOGISTIC, (0.8, 1.2, 5.0, 1.0), lower_bound=0.9)


def test_alpha_curve_invariants():
    ParamCurve.logistic(0.8, 1.2, 5.0, 1.0).require_alpha(holder_cap=True)
    with pytest.raises(DomainError):
        ParamCurve.constant(0.5).require_alpha(holder_cap=False)
    # upper bound must stay below kappa + 1/2
    with pytest.raises(DomainError):
        ParamCurve(CurveKind.CONSTANT, (1.4,), holder_exponent=0.5).require_alpha(holder_cap=True)
    ParamCurve(CurveKind.CONSTANT, (1.4,), holder_exponent=0.5).require_alpha(holder_cap=False)


def test_lambda_curve_invariant():
    with pytest.raises(DomainError):
        ParamCurve.logistic(0.0, 0.8, 1.0, 1.0).require_lambda()


def test_round_trip_dict():
    c = ParamCurve.logistic(0.3, 0.8, 5.0, 1.0)
    assert ParamCurve.from_dict(c.to_dict()) == c


def test_as_curve_passthrough():
    c = ParamCurve.constant(0.7)
    assert as_curve(c) is c
    assert as_curve(0.7) == c
