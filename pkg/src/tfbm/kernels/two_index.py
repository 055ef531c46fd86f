"""Two-index (Riesz-type) FOU family.

Spectral density ``(2 pi)^{-1} (|k|^{2 beta} + lam^{2 beta})^{-alpha}``; the
covariance is ``C(tau) = pi^{-1} int_0^inf cos(k tau) (k^{2 beta} + lam^{2 beta})^{-alpha} dk``.
The Hurst index of the reduced process is ``H = alpha beta - 1/2``.
"""

from __future__ import annotations

import math
import warnings

import numpy as np

from tfbm import quad
from tfbm.errors import DegenerateCaseError, DomainError, SeriesDivergenceWarning
from tfbm.kernels.base import CovCoefficients, check_lambda, check_two_index
from tfbm.quad import QuadResult

__all__ = [
    "two_index_variance",
    "two_index_cov",
    "two_index_offdiag_cov",
    "two_index_increment_variance",
    "two_index_tfbm_cov",
    "two_index_coefficients",
    "two_index_tail_series",
    "two_index_leading_term",
    "two_index_small_time_coeff",
]

DEFAULT_RTOL = 1e-10
# Below this value of lam * tau the real-axis transform is used; above it the
# path is rotated onto the imaginary axis.
_ROTATE_THRESHOLD = 1.0


def two_index_variance(alpha: float, beta: float, lam: float) -> float:
    """``Gamma(1/(2b)) Gamma(a - 1/(2b)) lam^{1 - 2ab} / (2 pi b Gamma(a))``."""
    check_two_index(alpha, beta)
    check_lambda(lam)
    g = 0.5 / beta
    log_v = (math.lgamma(g) + math.lgamma(alpha - g) + (1 - 2 * alpha * beta) * math.log(lam)
             - math.log(2 * math.pi * beta) - math.lgamma(alpha))
    return math.exp(log_v)


def _density(alpha: float, beta: float, lam_b: float):
    """Real spectral factor ``(k^{2b} + lam^{2b})^{-a}`` (without the 1/pi)."""
    if beta == 1.0:
        return lambda k: (k * k + lam_b) ** (-alpha)
    two_b = 2.0 * beta
    return lambda k: (k**two_b + lam_b) ** (-alpha)


def _density_complex(alpha: float, beta: float, lam_b: float):
    """Analytic continuation of the spectral factor into the first quadrant."""
    if beta == 1.0:
        # k * k keeps an exact zero imaginary part on the imaginary axis
        return lambda k: (k * k + lam_b) ** (-alpha)
    two_b = 2.0 * beta
    return lambda k: np.exp(-alpha * np.log(np.exp(two_b * np.log(k)) + lam_b))


def two_index_cov(alpha: float, beta: float, lam: float, tau: float, *,
                  rtol: float = DEFAULT_RTOL) -> QuadResult:
    """Two-index covariance ``C(tau)`` by quadrature (relative tolerance ``rtol``).

    ``tau = 0`` returns the closed-form variance with zero error.
    """
    check_two_index(alpha, beta)
    check_lambda(lam)
    tau = abs(float(tau))
    if tau == 0.0:
        return QuadResult(two_index_variance(alpha, beta, lam), 0.0, 0, True)
    return two_index_offdiag_cov(alpha, beta, lam, tau, rtol=rtol)


def two_index_offdiag_cov(alpha: float, beta: float, lam: float, tau: float, *,
                          rtol: float = DEFAULT_RTOL) -> QuadResult:
    """The cosine integral defining ``C(tau)`` for ``tau != 0`` only.

    Requires just ``alpha > 0`` and ``beta`` in ``(0, 1]``.  When
    ``alpha beta <= 1/2`` the spectral density is not integrable, so there is no
    finite variance and no admissible process, but the integral still
    converges conditionally for ``tau != 0``; this lets the large-``tau``
    expansion be examined on its own.
    """
    if not (0.0 < beta <= 1.0) or not (alpha > 0):
        raise DomainError(f"need alpha > 0 and beta in (0, 1], got alpha={alpha!r}, beta={beta!r}")
    check_lambda(lam)
    tau = abs(float(tau))
    if tau == 0.0:
        raise DomainError("the off-diagonal evaluator needs tau != 0")
    lam_b = lam ** (2.0 * beta)
    if lam * tau < _ROTATE_THRESHOLD:
        res = quad.cosine_transform(_density(alpha, beta, lam_b), tau, 0.0, rtol=rtol, scale=lam, points=[lam])
    else:
        res = quad.rotated_cosine_transform(_density_complex(alpha, beta, lam_b), tau, [lam], 0.0, rtol=rtol)
    return res.scaled(1.0 / math.pi)


def two_index_increment_variance(alpha: float, beta: float, lam: float, t: float, *,
                                 rtol: float = DEFAULT_RTOL) -> QuadResult:
    """``sigma_hat^2(t) = 2 [C(0) - C(t)]`` of the reduced two-index process.

    For ``lam t < 1`` this is computed as
    ``(4/pi) t^{2ab-1} int_0^inf sin^2(x/2) (x^{2b} + (lam t)^{2b})^{-a} dx``,
    which has no cancellation at small ``t``.
    """
    check_two_index(alpha, beta)
    check_lambda(lam)
    t = abs(float(t))
    if t == 0.0:
        return QuadResult(0.0, 0.0, 0, True)
    if lam * t >= _ROTATE_THRESHOLD:
        c0 = two_index_variance(alpha, beta, lam)
        ct = two_index_cov(alpha, beta, lam, t, rtol=rtol)
        value = 2.0 * (c0 - ct.value)
        err = 2.0 * ct.abs_err
        return QuadResult(value, err, ct.nodes_used, err <= rtol * abs(value) or ct.converged)
    mu = lam * t
    res = quad.sine_squared_transform(_density(alpha, beta, mu ** (2.0 * beta)), 1.0, 0.0, rtol=rtol,
                                      scale=max(mu, 1e-300))
    return res.scaled(2.0 / math.pi * t ** (2.0 * alpha * beta - 1.0))


def two_index_tfbm_cov(alpha: float, beta: float, lam: float, t: float, s: float, *,
                       rtol: float = DEFAULT_RTOL) -> QuadResult:
    """Reduced two-index covariance ``C(t-s) - C(t) - C(s) + C(0)``.

    Evaluated in the equivalent form
    ``1/2 [sigma_hat^2(t) + sigma_hat^2(s) - sigma_hat^2(t - s)]`` so that small
    arguments do not lose digits to cancellation.
    """
    if t == 0.0 or s == 0.0:
        return QuadResult(0.0, 0.0, 0, True)
    vt = two_index_increment_variance(alpha, beta, lam, t, rtol=rtol)
    vs = vt if s == t else two_index_increment_variance(alpha, beta, lam, s, rtol=rtol)
    vd = two_index_increment_variance(alpha, beta, lam, t - s, rtol=rtol)
    value = 0.5 * (vt.value + vs.value - vd.value)
    err = 0.5 * (vt.abs_err + vs.abs_err + vd.abs_err)
    return QuadResult(value, err, vt.nodes_used + vs.nodes_used + vd.nodes_used,
                      vt.converged and vs.converged and vd.converged)


def two_index_coefficients(alpha: float, beta: float, lam: float, t: float, s: float, *,
                           rtol: float = DEFAULT_RTOL) -> CovCoefficients:
    """``c_x = sigma_hat^2(x) / |x|^{2H}`` with ``H = alpha beta - 1/2``."""
    h = alpha * beta - 0.5

    def coef(x: float) -> float:
        if x == 0.0:
            return two_index_small_time_coeff(alpha, beta) if h < 1.0 else math.nan
        return two_index_increment_variance(alpha, beta, lam, x, rtol=rtol).value / abs(x) ** (2 * h)

    return CovCoefficients(coef(t), coef(s), coef(t - s), h)


def _tail_terms(alpha: float, beta: float, lam: float, tau: float, n_terms: int) -> tuple[np.ndarray, np.ndarray]:
    """Signed terms and their magnitudes without the sine factor."""
    j = np.arange(1, n_terms + 1, dtype=float)
    log_mag = (np.array([math.lgamma(alpha + x) + math.lgamma(2 * beta * x + 1) - math.lgamma(x + 1) for x in j])
               - math.lgamma(alpha) - 2 * beta * (alpha + j) * math.log(lam) - (2 * beta * j + 1) * math.log(tau)
               - math.log(math.pi))
    mag = np.exp(log_mag)
    sign = np.where(j % 2 == 1, 1.0, -1.0)
    return sign * np.sin(beta * j * math.pi) * mag, mag


def two_index_tail_series(alpha: float, beta: float, lam: float, tau: float, n_terms: int) -> float:
    """Partial sum of the large-``tau`` expansion of ``C(tau)``.

    ``C(tau) ~ pi^{-1} sum_{j>=1} (-1)^{j+1} Gamma(a+j) Gamma(2bj+1) / (j! Gamma(a))
               sin(b j pi) lam^{-2b(a+j)} tau^{-(2bj+1)}``.

    The series is asymptotic; a :class:`SeriesDivergenceWarning` is issued if
    the term magnitudes start growing before ``n_terms``.
    """
    check_lambda(lam)
    if not (0.0 < beta < 1.0) or not (alpha > 0):
        raise DomainError("the algebraic tail needs alpha > 0 and beta in (0, 1)")
    if n_terms < 1:
        raise DomainError("n_terms must be at least 1")
    tau = abs(float(tau))
    terms, mag = _tail_terms(alpha, beta, lam, tau, n_terms)
    growing = np.nonzero(np.diff(mag) > 0)[0]
    if growing.size:
        warnings.warn(
            f"tail series terms grow from j={growing[0] + 2} on (lam*tau={lam * tau:.3g}); "
            "the partial sum is past its optimal truncation",
            SeriesDivergenceWarning,
            stacklevel=2,
        )
    return float(np.sum(terms))


def two_index_leading_term(alpha: float, beta: float, lam: float, tau: float) -> float:
    """``alpha Gamma(1+2b) sin(b pi) lam^{-2b(a+1)} tau^{-(2b+1)} / pi``."""
    return two_index_tail_series(alpha, beta, lam, tau, 1)


def two_index_small_time_coeff(alpha: float, beta: float) -> float:
    """Coefficient ``A`` of ``sigma_hat^2(t) ~ A |t|^{2 alpha beta - 1}`` as ``t -> 0``.

    ``A = -1 / (Gamma(2 alpha beta) cos(alpha beta pi))``.  It depends on the
    indices only through their product and equals 1 at ``alpha beta = 1``
    (Brownian scaling).
    """
    check_two_index(alpha, beta)
    ab = alpha * beta
    if not (0.5 < ab < 1.5):
        raise DomainError(f"small-time law needs 1/2 < alpha*beta < 3/2, got {ab}")
    c = math.cos(ab * math.pi)
    if abs(c) < 1e-12:
        raise DegenerateCaseError(f"cos(alpha*beta*pi) vanishes at alpha*beta={ab}")
    return -1.0 / (math.gamma(2.0 * ab) * c)
