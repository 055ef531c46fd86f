"""Multifractional OU processes (time-dependent order alpha(t)) and their reductions.

Two constructions are covered:

* Weyl MOU: the moving average ``int e^{-lam(t-u)} (t-u)^{alpha(t)-1} dW(u) / Gamma(alpha(t))``.
  Its cross covariances involve Tricomi's Psi; an equivalent Whittaker-W
  form is available where that representation converges.
* Riesz MOU: spectral construction whose covariance is the FOU Bessel form
  evaluated at ``alpha_+(t,s) = (alpha(t) + alpha(s))/2``.  Its reduced process
  is TMBM.
"""

from __future__ import annotations

import math
from typing import Callable

from tfbm.errors import DomainError, UnsupportedParameterError
from tfbm.kernels.base import CovCoefficients, check_lambda, reduce_kernel
from tfbm.kernels.curves import ParamCurve, as_curve
from tfbm.kernels.fou import fou_cov, tfbm_coefficients, tfbm_cov
from tfbm.specfun import log_tricomi_psi, whittaker_w

__all__ = [
    "mou_cross_cov",
    "weyl_mou_cov",
    "mou_spectral_cov",
    "riesz_mou_cov",
    "tmbm_cov",
    "tmbm_coefficients",
    "var_temper_mou_cov",
    "var_temper_mou_pair_kernel",
    "var_temper_tmbm_cov",
    "var_temper_tmbm_coefficient",
]


def _alpha_curve(alpha: float | ParamCurve, *, holder_cap: bool) -> ParamCurve:
    curve = as_curve(alpha)
    curve.require_alpha(holder_cap=holder_cap)
    return curve


def _lambda_curve(lam: float | ParamCurve) -> ParamCurve:
    curve = as_curve(lam)
    curve.require_lambda()
    return curve


def mou_cross_cov(alpha_a: float, lam_a: float, alpha_b: float, lam_b: float, u: float, v: float) -> float:
    """Covariance of two Weyl moving averages, ``(alpha_a, lam_a)`` at ``u`` and ``(alpha_b, lam_b)`` at ``v``.

    With ``ap = (alpha_a + alpha_b)/2``, ``lp = (lam_a + lam_b)/2``, ``d = |u - v|``
    and the later time carrying ``(alpha_l, lam_l)``, the earlier ``alpha_e``:

        e^{-lam_l d} d^{2 ap - 1} Psi(alpha_e, 2 ap, 2 lp d) / Gamma(alpha_l)

    and ``Gamma(2ap - 1) / (Gamma(alpha_a) Gamma(alpha_b) (2 lp)^{2ap - 1})`` at ``d = 0``.
    """
    ap = 0.5 * (alpha_a + alpha_b)
    lp = 0.5 * (lam_a + lam_b)
    d = abs(u - v)
    if d == 0.0:
        return math.exp(math.lgamma(2 * ap - 1) - math.lgamma(alpha_a) - math.lgamma(alpha_b)
                        - (2 * ap - 1) * math.log(2 * lp))
    if u > v:
        a_late, l_late, a_early = alpha_a, lam_a, alpha_b
    else:
        a_late, l_late, a_early = alpha_b, lam_b, alpha_a
    log_psi, _ = log_tricomi_psi(a_early, 2 * ap, 2 * lp * d)
    return math.exp(-l_late * d + (2 * ap - 1) * math.log(d) + log_psi - math.lgamma(a_late))


def weyl_mou_cov(alpha_curve: float | ParamCurve, lam: float, t: float, s: float) -> float:
    """Weyl MOU covariance ``e^{-lam|t-s|} |t-s|^{2a+ - 1} Psi(alpha(t^s), 2a+, 2 lam |t-s|) / Gamma(alpha(tvs))``."""
    curve = _alpha_curve(alpha_curve, holder_cap=False)
    check_lambda(lam)
    return mou_cross_cov(curve(t), lam, curve(s), lam, t, s)


def mou_spectral_cov(alpha_curve: float | ParamCurve, lam: float, t: float, s: float) -> float:
    """Whittaker form of the MOU covariance.

    For ``t > s`` (arguments are swapped otherwise):
    ``(t-s)^{a+ - 1} / (Gamma(alpha(t)) (2 lam)^{a+}) W_{a-, 1/2 - a+}(2 lam (t-s))``
    with ``a- = (alpha(t) - alpha(s))/2``.  The Whittaker function is only
    available through its Laplace representation, which needs
    ``alpha(t) < 1`` for the later time; otherwise
    :class:`UnsupportedParameterError` is raised.
    """
    curve = _alpha_curve(alpha_curve, holder_cap=False)
    check_lambda(lam)
    if t == s:
        raise DomainError("the Whittaker form is defined for t != s only")
    if t < s:
        t, s = s, t
    at, as_ = curve(t), curve(s)
    ap, am = 0.5 * (at + as_), 0.5 * (at - as_)
    d = t - s
    try:
        w = whittaker_w(am, 0.5 - ap, 2 * lam * d)
    except UnsupportedParameterError as exc:
        raise UnsupportedParameterError(
            f"Whittaker route undefined at (t, s) = ({t}, {s}): alpha(t) = {at:.6g} >= 1"
        ) from exc
    return d ** (ap - 1) / (math.gamma(at) * (2 * lam) ** ap) * w.value


def riesz_mou_cov(alpha_curve: float | ParamCurve, lam: float, t: float, s: float) -> float:
    """Riesz MOU covariance: the FOU covariance at order ``alpha_+(t,s)``."""
    curve = _alpha_curve(alpha_curve, holder_cap=True)
    return fou_cov(0.5 * (curve(t) + curve(s)), lam, t - s)


def tmbm_cov(alpha_curve: float | ParamCurve, lam: float, t: float, s: float) -> float:
    """TMBM covariance: the TFBM four-term expression with ``alpha_+(t,s)`` in every term."""
    curve = _alpha_curve(alpha_curve, holder_cap=True)
    return tfbm_cov(0.5 * (curve(t) + curve(s)), lam, t, s)


def tmbm_coefficients(alpha_curve: float | ParamCurve, lam: float, t: float, s: float) -> CovCoefficients:
    """TFBM-form coefficients with ``H_+(t,s) = alpha_+(t,s) - 1/2``."""
    curve = _alpha_curve(alpha_curve, holder_cap=True)
    return tfbm_coefficients(0.5 * (curve(t) + curve(s)), lam, t, s)


def var_temper_mou_cov(alpha_curve: float | ParamCurve, lambda_curve: float | ParamCurve,
                       t: float, s: float) -> float:
    """MOU covariance with both order and tempering time-dependent.

    ``e^{-lambda(tvs)|t-s|} |t-s|^{2a+ - 1} Psi(alpha(t^s), 2a+, 2 lambda_+ |t-s|) / Gamma(alpha(tvs))``.
    """
    ac = _alpha_curve(alpha_curve, holder_cap=False)
    lc = _lambda_curve(lambda_curve)
    return mou_cross_cov(ac(t), lc(t), ac(s), lc(s), t, s)


def var_temper_mou_pair_kernel(alpha_curve: float | ParamCurve, lambda_curve: float | ParamCurve,
                               t: float, s: float) -> Callable[[float, float], float]:
    """Cross covariance with ``(alpha(t), lambda(t))`` and ``(alpha(s), lambda(s))`` frozen."""
    ac = _alpha_curve(alpha_curve, holder_cap=False)
    lc = _lambda_curve(lambda_curve)
    at, lt, as_, ls = ac(t), lc(t), ac(s), lc(s)
    return lambda u, v: mou_cross_cov(at, lt, as_, ls, u, v)


def var_temper_tmbm_coefficient(alpha_curve: float | ParamCurve, lambda_curve: float | ParamCurve,
                                t: float, s: float, u: float, v: float) -> float:
    """``c_{t,s}(u, v) = [V - X(u, v)] / |u - v|^{2H_+}``.

    ``X`` is the frozen-pair cross covariance, ``V`` its value at the origin
    ``Gamma(2H_+) / (Gamma(alpha(t)) Gamma(alpha(s)) (2 lambda_+)^{2H_+})`` and
    ``H_+ = alpha_+(t,s) - 1/2``.
    """
    base = var_temper_mou_pair_kernel(alpha_curve, lambda_curve, t, s)
    ac = as_curve(alpha_curve)
    h2 = ac(t) + ac(s) - 1.0
    d = abs(u - v)
    if d == 0.0:
        raise DomainError("coefficient undefined at u == v")
    return (base(0.0, 0.0) - base(u, v)) / d**h2


def var_temper_tmbm_cov(alpha_curve: float | ParamCurve, lambda_curve: float | ParamCurve,
                        t: float, s: float) -> float:
    """Reduced covariance ``c(t,0)|t|^{2H+} + c(0,s)|s|^{2H+} - c(t,s)|t-s|^{2H+}``.

    ``c = c_{t,s}`` from :func:`var_temper_tmbm_coefficient`.  Algebraically this
    is :func:`reduce_kernel` of the frozen-pair cross covariance.
    """
    if t == 0.0 or s == 0.0:
        return 0.0
    ac = as_curve(alpha_curve)
    h2 = ac(t) + ac(s) - 1.0
    total = (var_temper_tmbm_coefficient(alpha_curve, lambda_curve, t, s, t, 0.0) * abs(t) ** h2
             + var_temper_tmbm_coefficient(alpha_curve, lambda_curve, t, s, 0.0, s) * abs(s) ** h2)
    if t != s:
        total -= var_temper_tmbm_coefficient(alpha_curve, lambda_curve, t, s, t, s) * abs(t - s) ** h2
    return total
