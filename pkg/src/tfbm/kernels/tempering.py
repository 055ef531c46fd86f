"""FOU and TFBM with a time-dependent tempering rate lambda(t).

The process at time ``t`` is the Weyl moving average with kernel
``e^{-lambda(t)(t-u)} (t-u)^{alpha-1} / Gamma(alpha)``.  The covariance of two
such moving averages with rates ``la`` at time ``u`` and ``lb`` at time ``v``
is, with ``lp = (la + lb)/2`` and ``d = |u - v|``,

    e^{-(l_late - lp) d} (sqrt(pi) Gamma(alpha))^{-1} (d / (2 lp))^{alpha-1/2} K_{alpha-1/2}(lp d)

where ``l_late`` is the rate attached to the later of ``u, v``.

Reduced covariances freeze the pair ``(lambda(t), lambda(s))`` of the
evaluation point: ``B(t) = X_{lambda(t)}(t) - X_{lambda(t)}(0)``.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from tfbm import quad
from tfbm.kernels.base import CovCoefficients, check_alpha, reduce_kernel
from tfbm.kernels.curves import ParamCurve, as_curve
from tfbm.kernels.fou import fou_cov, fou_variance
from tfbm.quad import QuadResult

__all__ = [
    "weyl_cross_cov",
    "var_temper_cov",
    "var_temper_pair_kernel",
    "var_temper_tfbm_cov",
    "var_temper_tfbm_coefficients",
    "riesz_var_temper_cov",
]

DEFAULT_RTOL = 1e-10


def _lambda_curve(lam: float | ParamCurve) -> ParamCurve:
    curve = as_curve(lam)
    curve.require_lambda()
    return curve


def weyl_cross_cov(alpha: float, lam_a: float, lam_b: float, u: float, v: float) -> float:
    """Covariance of the rate-``lam_a`` process at ``u`` with the rate-``lam_b`` process at ``v``."""
    lp = 0.5 * (lam_a + lam_b)
    d = abs(u - v)
    if d == 0.0:
        return fou_variance(alpha, lp)
    late = lam_a if u > v else lam_b
    return math.exp(-(late - lp) * d) * fou_cov(alpha, lp, d)


def var_temper_cov(alpha: float, lambda_curve: float | ParamCurve, t: float, s: float) -> float:
    """``e^{-lambda_-*(t,s)|t-s|} C_{lambda_+}(t - s)`` with ``C`` the FOU covariance.

    ``lambda_-* = (lambda(late) - lambda(early)) / 2`` makes the result
    symmetric.  ``t == s`` returns the variance with ``lambda(t)``.
    """
    check_alpha(alpha)
    curve = _lambda_curve(lambda_curve)
    return weyl_cross_cov(alpha, curve(t), curve(s), t, s)


def var_temper_pair_kernel(alpha: float, lambda_curve: float | ParamCurve, t: float, s: float
                           ) -> Callable[[float, float], float]:
    """Base covariance with the pair ``(lambda(t), lambda(s))`` frozen.

    The first argument belongs to the process with rate ``lambda(t)`` and the
    second to the one with rate ``lambda(s)``, whatever times they are
    evaluated at.  Feeding it to :func:`reduce_kernel` gives the reduced
    covariance.
    """
    check_alpha(alpha)
    curve = _lambda_curve(lambda_curve)
    la, lb = curve(t), curve(s)
    return lambda u, v: weyl_cross_cov(alpha, la, lb, u, v)


def var_temper_tfbm_cov(alpha: float, lambda_curve: float | ParamCurve, t: float, s: float) -> float:
    """Reduced variable-tempering covariance.

    With ``lp = (lambda(t) + lambda(s))/2``, ``lm = (lambda(t) - lambda(s))/2`` and
    ``C`` the FOU covariance at rate ``lp``:

        e^{-lm (t-s)} C(t-s) - e^{-lm t} C(t) - e^{lm s} C(s) + C(0)

    which is :func:`reduce_kernel` applied to :func:`var_temper_pair_kernel`.
    """
    check_alpha(alpha)
    curve = _lambda_curve(lambda_curve)
    if t == 0.0 or s == 0.0:
        return 0.0
    lt, ls = curve(t), curve(s)
    lp, lm = 0.5 * (lt + ls), 0.5 * (lt - ls)
    c = lambda x: fou_cov(alpha, lp, x)  # noqa: E731
    return (math.exp(-lm * (t - s)) * c(t - s) - math.exp(-lm * t) * c(t) - math.exp(lm * s) * c(s)
            + fou_variance(alpha, lp))


def var_temper_tfbm_coefficients(alpha: float, lambda_curve: float | ParamCurve, t: float, s: float
                                 ) -> CovCoefficients:
    """Pair-dependent coefficients ``c_t(t,s), c_s(t,s), c_{t-s}(t,s)`` with ``H = alpha - 1/2``."""
    base = var_temper_pair_kernel(alpha, lambda_curve, t, s)
    h2 = 2.0 * alpha - 1.0
    var = base(0.0, 0.0)

    def coef(u: float, v: float) -> float:
        d = abs(u - v)
        return math.nan if d == 0.0 else 2.0 * (var - base(u, v)) / d**h2

    return CovCoefficients(coef(t, 0.0), coef(0.0, s), coef(t, s), alpha - 0.5)


def riesz_var_temper_cov(alpha: float, lambda_curve: float | ParamCurve, t: float, s: float, *,
                         rtol: float = DEFAULT_RTOL) -> QuadResult:
    """``pi^{-1} int_0^inf cos(k|t-s|) (k^2 + lambda(t)^2)^{-alpha/2} (k^2 + lambda(s)^2)^{-alpha/2} dk``.

    No closed form exists when ``lambda(t) != lambda(s)``; the integral is
    evaluated on the real axis for short lags and on the rotated path
    otherwise.
    """
    check_alpha(alpha)
    curve = _lambda_curve(lambda_curve)
    a, b = curve(t), curve(s)
    tau = abs(t - s)
    a2, b2, h = a * a, b * b, 0.5 * alpha

    def f(k):
        k2 = k * k
        return (k2 + a2) ** (-h) * (k2 + b2) ** (-h)

    lo = min(a, b)
    if lo * tau < 1.0:
        res = quad.cosine_transform(f, tau, 0.0, rtol=rtol, scale=max(a, b), points=sorted({a, b}))
    else:
        res = quad.rotated_cosine_transform(f, tau, [a, b], 0.0, rtol=rtol)
    return res.scaled(1.0 / math.pi)
