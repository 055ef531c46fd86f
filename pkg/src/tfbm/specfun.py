"""Special functions used by the covariance formulas.

* :func:`ln_gamma` -- log-gamma for positive arguments.
* :func:`bessel_k` / :func:`log_bessel_k` -- modified Bessel function of the
  second kind of real order, from the integral representation
  ``K_nu(z) = int_0^inf exp(-z cosh t) cosh(nu t) dt`` summed with the
  trapezoid rule in log space.  The integrand is entire and even, so the rule
  converges geometrically in the step size for every ``z``.
* :func:`tricomi_psi` -- Tricomi's confluent hypergeometric function (Kummer
  U) from its Laplace integral, for ``a > 0`` and ``z > 0``.
* :func:`whittaker_w` -- Whittaker W through its Tricomi representation.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, logsumexp

from tfbm import quad
from tfbm.errors import DomainError, QuadratureError, UnsupportedParameterError

__all__ = [
    "Method",
    "SpecFunResult",
    "ln_gamma",
    "bessel_k",
    "log_bessel_k",
    "tricomi_psi",
    "log_tricomi_psi",
    "whittaker_w",
]


class Method(str, enum.Enum):
    SERIES = "series"
    INTEGRAL_REP = "integral_rep"
    ASYMPTOTIC = "asymptotic"
    CLOSED_FORM = "closed_form"


@dataclass(frozen=True)
class SpecFunResult:
    """A special-function value with an error estimate.

    ``range_flag`` is ``"underflow"`` or ``"overflow"`` when the true value is
    outside the double range; ``value`` is then 0 or inf respectively.
    """

    value: float
    abs_err_estimate: float
    method: Method
    range_flag: str | None = None

    def __float__(self) -> float:
        return float(self.value)


def ln_gamma(x):
    """``log Gamma(x)`` for ``x > 0``; accepts scalars or arrays."""
    arr = np.asarray(x, dtype=float)
    if np.any(~(arr > 0)):
        raise DomainError(f"ln_gamma requires x > 0, got {x!r}")
    if arr.ndim == 0:
        return math.lgamma(float(arr))
    return gammaln(arr)


# ---------------------------------------------------------------------------
# Bessel K
# ---------------------------------------------------------------------------

_BESSEL_STEP = 0.1
_BESSEL_DROP = 50.0  # log-units below the peak beyond which terms are ignored


def _bessel_log_integrand(nu: float, z: np.ndarray, t: np.ndarray) -> np.ndarray:
    # log(cosh(nu t)) = nu t + log1p(exp(-2 nu t)) - log 2, stable for large nu t
    nt = nu * t
    log_cosh = nt + np.log1p(np.exp(-2.0 * nt)) - math.log(2.0)
    with np.errstate(over="ignore"):
        return -z[:, None] * np.cosh(t)[None, :] + log_cosh[None, :]


def _bessel_t_max(nu: float, zmin: float) -> float:
    """Truncation point of the integral for the smallest argument in a batch."""
    t_peak = math.asinh(nu / zmin) if nu > 0 else 0.0

    def logf(t: float) -> float:
        nt = nu * t
        # z cosh t overflows for tiny z near t ~ 700; past e^700 the term is -inf anyway
        log_zc = math.log(zmin) + t - math.log(2.0) if t > 30.0 else math.log(zmin * math.cosh(t))
        zc = math.exp(log_zc) if log_zc < 700.0 else math.inf
        return -zc + nt + math.log1p(math.exp(-2.0 * nt)) - math.log(2.0)

    peak = logf(t_peak)
    t = t_peak + 1.0
    while logf(t) > peak - _BESSEL_DROP:
        t += 1.0 + 0.25 * t
    return t


def _log_bessel_k_with_err(nu: float, z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    nu = abs(float(nu))
    t_max = _bessel_t_max(nu, float(np.min(z)))
    # the peak of exp(-z cosh t) has width ~ 1/sqrt(z); keep several nodes across it
    step = min(_BESSEL_STEP, 0.5 / math.sqrt(float(np.max(z))))
    n = int(math.ceil(t_max / step))
    n += n % 2
    t = np.arange(n + 1) * step
    lf = _bessel_log_integrand(nu, z, t)
    # trapezoid on [0, inf) of an even function: h * (f0/2 + sum_{j>=1} f_j)
    lf_half = lf.copy()
    lf_half[:, 0] -= math.log(2.0)
    log_h = logsumexp(lf_half, axis=1) + math.log(step)
    log_2h = logsumexp(lf_half[:, ::2], axis=1) + math.log(2.0 * step)
    rel_err = np.abs(np.expm1(log_2h - log_h))
    # the coarse rule error bounds the fine one with a wide margin; keep a
    # rounding floor proportional to the number of terms
    rel_err = np.minimum(rel_err, 1.0) ** 2 + 4.0 * np.finfo(float).eps * math.sqrt(n + 1)
    return log_h, rel_err


def _check_bessel_args(nu: float, z) -> np.ndarray:
    if not math.isfinite(nu) or abs(nu) > 50.0:
        raise DomainError(f"bessel_k requires |nu| <= 50, got nu={nu!r}")
    arr = np.asarray(z, dtype=float)
    if np.any(~(arr > 0)) or np.any(~np.isfinite(arr)):
        raise DomainError(f"bessel_k requires finite z > 0, got {z!r}")
    return arr


def log_bessel_k(nu: float, z):
    """``log K_nu(z)``; vectorized over ``z``.  Never under- or overflows."""
    arr = _check_bessel_args(nu, z)
    flat = np.atleast_1d(arr).ravel()
    log_val, _ = _log_bessel_k_with_err(nu, flat)
    out = log_val.reshape(np.shape(arr))
    return float(out) if out.ndim == 0 else out


def bessel_k(nu: float, z: float) -> SpecFunResult:
    """Modified Bessel function of the second kind ``K_nu(z)`` for real ``nu``, ``z > 0``."""
    arr = _check_bessel_args(nu, z)
    log_val, rel = _log_bessel_k_with_err(nu, np.atleast_1d(arr).ravel()[:1])
    lv = float(log_val[0])
    if lv < -745.0:
        return SpecFunResult(0.0, 0.0, Method.INTEGRAL_REP, "underflow")
    if lv > 709.0:
        return SpecFunResult(math.inf, 0.0, Method.INTEGRAL_REP, "overflow")
    value = math.exp(lv)
    return SpecFunResult(value, float(rel[0]) * value, Method.INTEGRAL_REP)


# ---------------------------------------------------------------------------
# Tricomi Psi and Whittaker W
# ---------------------------------------------------------------------------

_PSI_TOL = 1e-13


def log_tricomi_psi(a: float, b: float, z: float) -> tuple[float, float]:
    """``(log Psi(a, b, z), relative error estimate)`` for ``a > 0``, ``z > 0``.

    Uses ``Psi = z^{-a} / Gamma(a) * int_0^inf e^{-s} s^{a-1} (1 + s/z)^{b-a-1} ds``
    (the Laplace representation after ``t = s / z``), integrated with the
    double-exponential rule in log space.
    """
    if not (a > 0):
        raise DomainError(f"tricomi_psi requires a > 0, got a={a!r}")
    if not (z > 0) or not math.isfinite(z):
        raise DomainError(f"tricomi_psi requires finite z > 0, got z={z!r}")
    c = b - a - 1.0
    log_z = math.log(z)

    def logg(s: np.ndarray, log_s: np.ndarray) -> np.ndarray:
        # log1p(s/z) computed from logs so tiny s and tiny z stay accurate
        ratio_log = log_s - log_z
        l1p = np.where(ratio_log < 0, np.log1p(np.exp(np.minimum(ratio_log, 0.0))),
                       ratio_log + np.log1p(np.exp(-np.abs(ratio_log))))
        return -s + (a - 1.0) * log_s + c * l1p

    log_i, rel, _nodes, ok = quad.laplace_integral_log(logg, _PSI_TOL, scale=1.0)
    if not ok:
        raise QuadratureError(f"tricomi_psi({a}, {b}, {z}) did not converge (rel err {rel:.2e})")
    return log_i - a * log_z - math.lgamma(a), max(rel, 1e-15)


def tricomi_psi(a: float, b: float, z: float) -> SpecFunResult:
    """Tricomi ``Psi(a, b, z)`` (Kummer U) for ``a > 0``, ``z > 0``."""
    if b == a + 1.0:
        if not (a > 0) or not (z > 0):
            raise DomainError(f"tricomi_psi requires a > 0 and z > 0, got a={a!r}, z={z!r}")
        return SpecFunResult(z ** (-a), 0.0, Method.CLOSED_FORM)
    lv, rel = log_tricomi_psi(a, b, z)
    if lv < -745.0:
        return SpecFunResult(0.0, 0.0, Method.INTEGRAL_REP, "underflow")
    if lv > 709.0:
        return SpecFunResult(math.inf, 0.0, Method.INTEGRAL_REP, "overflow")
    value = math.exp(lv)
    return SpecFunResult(value, rel * value, Method.INTEGRAL_REP)


def whittaker_w(kappa: float, mu: float, z: float) -> SpecFunResult:
    """Whittaker ``W_{kappa,mu}(z) = e^{-z/2} z^{mu+1/2} Psi(mu-kappa+1/2, 1+2mu, z)``.

    Only the parameter range with a convergent Laplace representation is
    supported: ``mu - kappa + 1/2 > 0``.  Outside it an
    :class:`UnsupportedParameterError` is raised rather than continuing
    analytically.
    """
    if not (z > 0):
        raise DomainError(f"whittaker_w requires z > 0, got {z!r}")
    a = mu - kappa + 0.5
    if not (a > 0):
        raise UnsupportedParameterError(
            f"whittaker_w: mu - kappa + 1/2 = {a:.6g} <= 0 has no Laplace representation"
        )
    lv, rel = log_tricomi_psi(a, 1.0 + 2.0 * mu, z)
    lw = lv - 0.5 * z + (mu + 0.5) * math.log(z)
    if lw < -745.0:
        return SpecFunResult(0.0, 0.0, Method.INTEGRAL_REP, "underflow")
    if lw > 709.0:
        return SpecFunResult(math.inf, 0.0, Method.INTEGRAL_REP, "overflow")
    value = math.exp(lw)
    return SpecFunResult(value, rel * value, Method.INTEGRAL_REP)
