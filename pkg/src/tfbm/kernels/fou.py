"""Fractional Ornstein-Uhlenbeck covariance and its reduced process (TFBM).

The FOU process with order ``alpha`` and tempering ``lam`` has covariance

    C(tau) = (sqrt(pi) Gamma(alpha))^{-1} (|tau| / (2 lam))^{alpha - 1/2} K_{alpha - 1/2}(lam |tau|)

and variance ``Gamma(2 alpha - 1) / (Gamma(alpha)^2 (2 lam)^{2 alpha - 1})``.
The reduced process ``B(t) = X(t) - X(0)`` is tempered fractional Brownian
motion with Hurst index ``H = alpha - 1/2``.
"""

from __future__ import annotations

import enum
import math

import numpy as np

from tfbm.errors import DomainError
from tfbm.kernels.base import CovCoefficients, check_alpha, check_lambda
from tfbm.specfun import ln_gamma, log_bessel_k

__all__ = [
    "fou_variance",
    "fou_cov",
    "fou_spectral_density",
    "tfbm_cov",
    "tfbm_variance",
    "tfbm_coefficients",
    "tfbm_small_time_coeff",
    "increment_cov",
    "AuxKind",
    "aux_cov",
]

_LOG_SQRT_PI = 0.5 * math.log(math.pi)


def fou_variance(alpha: float, lam: float) -> float:
    """``Gamma(2 alpha - 1) / (Gamma(alpha)^2 (2 lam)^{2 alpha - 1})``."""
    check_alpha(alpha)
    check_lambda(lam)
    return math.exp(ln_gamma(2 * alpha - 1) - 2 * ln_gamma(alpha) - (2 * alpha - 1) * math.log(2 * lam))


def fou_cov(alpha: float, lam: float, tau):
    """Stationary FOU covariance ``C(tau)``; vectorized over ``tau``.

    ``tau == 0`` (or a lag whose product with ``lam`` is subnormal) uses the closed variance formula.
    """
    check_alpha(alpha)
    check_lambda(lam)
    tau = np.abs(np.asarray(tau, dtype=float))
    nu = alpha - 0.5
    out = np.empty(tau.shape)
    # below the smallest normal double lam*tau carries no precision; C(0) - C(tau) there is
    # O((lam tau)^{2H}), far below rounding for every admissible alpha
    zero = lam * tau < np.finfo(float).tiny
    out[zero] = fou_variance(alpha, lam)
    if np.any(~zero):
        x = tau[~zero]
        log_c = (-_LOG_SQRT_PI - ln_gamma(alpha) + nu * (np.log(x) - math.log(2 * lam))
                 + log_bessel_k(nu, lam * x))
        out[~zero] = np.exp(log_c)
    return float(out) if out.ndim == 0 else out


def fou_spectral_density(alpha: float, lam: float, k):
    """``(2 pi)^{-1} (k^2 + lam^2)^{-alpha}``."""
    check_alpha(alpha)
    check_lambda(lam)
    k = np.asarray(k, dtype=float)
    out = (k * k + lam * lam) ** (-alpha) / (2.0 * math.pi)
    return float(out) if out.ndim == 0 else out


def tfbm_cov(alpha: float, lam: float, t, s):
    """TFBM covariance ``C(0) - C(t) - C(s) + C(t - s)``; broadcasts over ``t, s``."""
    t = np.asarray(t, dtype=float)
    s = np.asarray(s, dtype=float)
    out = fou_variance(alpha, lam) - fou_cov(alpha, lam, t) - fou_cov(alpha, lam, s) + fou_cov(alpha, lam, t - s)
    out = np.asarray(out, dtype=float)
    # the pinned origin is exact, not just up to rounding
    out = np.where((t == 0.0) | (s == 0.0), 0.0, out)
    return float(out) if out.ndim == 0 else out


def tfbm_variance(alpha: float, lam: float, t):
    """``sigma_hat^2(t) = 2 [C(0) - C(t)]``."""
    t = np.asarray(t, dtype=float)
    out = np.asarray(2.0 * (fou_variance(alpha, lam) - fou_cov(alpha, lam, t)), dtype=float)
    out = np.where(t == 0.0, 0.0, out)
    return float(out) if out.ndim == 0 else out


def tfbm_small_time_coeff(alpha: float) -> float:
    """Limit of ``sigma_hat^2(t) / |t|^{2H}`` as ``t -> 0`` for ``H = alpha - 1/2 < 1``.

    Equals ``-Gamma(-H) 2^{-2H} / (sqrt(pi) Gamma(alpha))`` and does not depend on
    the tempering rate.
    """
    check_alpha(alpha)
    h = alpha - 0.5
    if not h < 1.0:
        raise DomainError("the t -> 0 limit of c_t is finite only for H < 1")
    return -math.gamma(-h) * 2.0 ** (-2 * h) / (math.sqrt(math.pi) * math.gamma(alpha))


def _coefficient(alpha: float, lam: float, x: float) -> float:
    h = alpha - 0.5
    if x == 0.0:
        return tfbm_small_time_coeff(alpha) if h < 1.0 else math.nan
    return tfbm_variance(alpha, lam, x) / abs(x) ** (2 * h)


def tfbm_coefficients(alpha: float, lam: float, t: float, s: float) -> CovCoefficients:
    """Coefficients ``c_t, c_s, c_{t-s}`` of the TFBM covariance with ``H = alpha - 1/2``.

    ``c_x = 2 Gamma(2H) / (Gamma(alpha)^2 (2 lam |x|)^{2H})
            - 2 / (sqrt(pi) Gamma(alpha)) K_H(lam |x|) / (2 lam |x|)^H``;
    at ``x = 0`` the finite small-time limit is returned.
    """
    return CovCoefficients(
        _coefficient(alpha, lam, t),
        _coefficient(alpha, lam, s),
        _coefficient(alpha, lam, t - s),
        alpha - 0.5,
    )


def increment_cov(alpha: float, lam: float, t, s, step: float):
    """Covariance of ``B(t + step) - B(t)`` and ``B(s + step) - B(s)``.

    Depends on ``t, s`` only through ``d = t - s``:
    ``2 C(d) - C(d + step) - C(d - step)``.
    """
    d = np.asarray(t, dtype=float) - np.asarray(s, dtype=float)
    out = 2.0 * fou_cov(alpha, lam, d) - fou_cov(alpha, lam, d + step) - fou_cov(alpha, lam, d - step)
    return float(out) if np.ndim(out) == 0 else out


class AuxKind(str, enum.Enum):
    STRETCHED_EXP = "stretched_exp"
    GEN_CAUCHY = "gen_cauchy"


def aux_cov(kind: AuxKind | str, exponent: float, lam: float, tau):
    """Auxiliary stationary covariances with a simple scaling law.

    ``stretched_exp``: ``lam^{-nu} exp(-(lam |tau|)^nu)``;
    ``gen_cauchy``:    ``lam^{-beta} (1 + lam^beta |tau|^beta)^{-1}``.
    """
    kind = AuxKind(kind)
    if not (0.0 < exponent <= 2.0):
        raise DomainError(f"exponent must lie in (0, 2], got {exponent!r}")
    check_lambda(lam)
    x = lam * np.abs(np.asarray(tau, dtype=float))
    if kind is AuxKind.STRETCHED_EXP:
        out = lam ** (-exponent) * np.exp(-(x**exponent))
    else:
        out = lam ** (-exponent) / (1.0 + x**exponent)
    return float(out) if np.ndim(out) == 0 else out
