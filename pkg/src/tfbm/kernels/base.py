"""Shared kernel types, the generic reduction and parameter checks."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from tfbm.errors import DomainError
from tfbm.kernels.curves import ParamCurve, as_curve

__all__ = ["PairParams", "CovCoefficients", "reduce_kernel", "pair_params"]


@dataclass(frozen=True)
class PairParams:
    """Symmetric and antisymmetric combinations of curve values at a pair ``(t, s)``.

    ``lambda_minus_star`` is half the difference of tempering rates taken with
    the later time first, so it is symmetric in ``(t, s)``.  ``alpha_minus`` is
    ``(alpha(t) - alpha(s)) / 2`` in the argument order given.
    """

    lambda_plus: float
    lambda_minus_star: float
    alpha_plus: float
    alpha_minus: float


@dataclass(frozen=True)
class CovCoefficients:
    """Coefficients of ``1/2 [c_t |t|^{2H} + c_s |s|^{2H} - c_ts |t-s|^{2H}]``."""

    c_t: float
    c_s: float
    c_ts: float
    hurst_eff: float

    def assemble(self, t: float, s: float) -> float:
        h2 = 2.0 * self.hurst_eff
        return 0.5 * (self.c_t * abs(t) ** h2 + self.c_s * abs(s) ** h2 - self.c_ts * abs(t - s) ** h2)


def pair_params(t: float, s: float, alpha: float | ParamCurve = 1.0,
                lam: float | ParamCurve = 1.0) -> PairParams:
    a, lc = as_curve(alpha), as_curve(lam)
    lt, ls = lc(t), lc(s)
    at, as_ = a(t), a(s)
    late, early = (lt, ls) if t >= s else (ls, lt)
    return PairParams(0.5 * (lt + ls), 0.5 * (late - early), 0.5 * (at + as_), 0.5 * (at - as_))


def reduce_kernel(base_cov: Callable[[float, float], float], t: float, s: float) -> float:
    """Covariance of ``X(t) - X(0)`` given the covariance of ``X``."""
    return base_cov(t, s) - base_cov(t, 0.0) - base_cov(0.0, s) + base_cov(0.0, 0.0)


def check_alpha(alpha: float) -> None:
    if not (alpha > 0.5) or not math.isfinite(alpha):
        raise DomainError(f"alpha must exceed 1/2, got {alpha!r}")


def check_lambda(lam: float) -> None:
    if not (lam > 0) or not math.isfinite(lam):
        raise DomainError(f"lambda must be positive, got {lam!r}")


def check_two_index(alpha: float, beta: float) -> None:
    if not (0.0 < beta <= 1.0):
        raise DomainError(f"beta must lie in (0, 1], got {beta!r}")
    if not (alpha > 0) or not (alpha * beta > 0.5):
        raise DomainError(f"two-index family needs alpha*beta > 1/2, got alpha={alpha!r}, beta={beta!r}")
