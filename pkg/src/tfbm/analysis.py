"""Statistical property checks on kernels and sampled ensembles.

Every check returns a :class:`PropertyReport`.  A report passes exactly when
``|measured - expected| <= tolerance`` (relative to ``|expected|`` when
``relative`` is set).  Checks with side conditions (positivity, monotone
convergence) fold a failed condition into ``measured = inf`` and keep the
raw number in ``extras``.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from tfbm.errors import DomainError, RegimeWarning
from tfbm.gp import Ensemble
from tfbm.kernels.curves import ParamCurve, as_curve
from tfbm.kernels.fou import fou_cov, tfbm_cov, tfbm_small_time_coeff, tfbm_variance
from tfbm.kernels.multifractional import riesz_mou_cov
from tfbm.kernels.spec import Family, KernelSpec
from tfbm.kernels.two_index import two_index_leading_term, two_index_offdiag_cov
from tfbm.quad import loglog_power_fit

__all__ = [
    "PropertyReport",
    "VariogramFit",
    "empirical_cov",
    "variogram_hurst",
    "geometric_lags",
    "scaling_check",
    "lrd_check",
    "correlation_tfbm",
    "tail_asymptote_check",
    "lass_check",
    "lass_prefactor",
    "tmbm_fractal_report",
]


@dataclass
class PropertyReport:
    name: str
    measured: float
    expected: float
    tolerance: float
    passed: bool
    details: str = ""
    relative: bool = False
    extras: dict = field(default_factory=dict)

    @classmethod
    def make(cls, name: str, measured: float, expected: float, tolerance: float, *,
             relative: bool = False, details: str = "", extras: dict | None = None) -> "PropertyReport":
        gap = abs(measured - expected)
        bound = tolerance * abs(expected) if relative else tolerance
        passed = bool(gap <= bound)  # False for NaN or infinite measurements
        return cls(name, float(measured), float(expected), float(tolerance), passed, details, relative,
                   dict(extras or {}))

    def to_line(self) -> str:
        mode = "rel" if self.relative else "abs"
        text = (f"{'PASS' if self.passed else 'FAIL'} {self.name}: measured={self.measured!r} "
                f"expected={self.expected!r} tol={self.tolerance!r} ({mode})")
        return f"{text} {self.details}" if self.details else text

    def to_json(self) -> dict:
        def clean(x):
            if isinstance(x, float) and not math.isfinite(x):
                return repr(x)
            if isinstance(x, (np.floating, np.integer)):
                return clean(x.item())
            if isinstance(x, (list, tuple)):
                return [clean(v) for v in x]
            if isinstance(x, dict):
                return {k: clean(v) for k, v in x.items()}
            return x

        return clean({
            "name": self.name, "measured": self.measured, "expected": self.expected,
            "tolerance": self.tolerance, "relative": self.relative, "passed": self.passed,
            "details": self.details, "extras": self.extras,
        })

    def to_json_text(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


# ---------------------------------------------------------------------------
# ensembles
# ---------------------------------------------------------------------------

def empirical_cov(e: Ensemble, i: int, j: int) -> tuple[float, float]:
    """Unbiased sample covariance of coordinates ``i, j`` and its Wick standard error.

    ``SE = sqrt((C_ii C_jj + C_ij^2) / n)`` with plug-in sample estimates.
    """
    if e.n_paths < 2:
        raise DomainError("empirical covariance needs at least two paths")
    n_pts = e.paths.shape[1]
    for k in (i, j):
        if not (-n_pts <= k < n_pts):
            raise IndexError(f"coordinate {k} out of range for {n_pts} grid points")
    x = e.paths[:, i] - e.paths[:, i].mean()
    y = e.paths[:, j] - e.paths[:, j].mean()
    n = e.n_paths
    cij = float(x @ y) / (n - 1)
    cii = float(x @ x) / (n - 1)
    cjj = float(y @ y) / (n - 1)
    return cij, math.sqrt((cii * cjj + cij * cij) / n)


def ensemble_cov_report(e: Ensemble, analytic: np.ndarray, *, n_se: float = 3.0, min_fraction: float = 0.95,
                        name: str = "ensemble covariance") -> PropertyReport:
    """Fraction of covariance entries within ``n_se`` Wick standard errors of ``analytic``."""
    n = e.n_paths
    if n < 2:
        raise DomainError("empirical covariance needs at least two paths")
    x = e.paths - e.paths.mean(axis=0)
    c = (x.T @ x) / (n - 1)
    d = np.diag(c)
    se = np.sqrt((np.outer(d, d) + c * c) / n)
    gap = np.abs(c - analytic)
    # zero-variance coordinates (a pinned origin) must match exactly
    ok = np.where(se > 0, gap <= n_se * se, gap == 0.0)
    iu = np.triu_indices(c.shape[0])
    frac = float(np.mean(ok[iu]))
    z = np.divide(gap, se, out=np.zeros_like(gap), where=se > 0)
    # frac >= min_fraction  <=>  |frac - 1| <= 1 - min_fraction
    return PropertyReport.make(
        name, frac, 1.0, 1.0 - min_fraction,
        details=f"fraction of {iu[0].size} entries within {n_se:g} SE, n_paths={n}",
        extras={"max_z": float(np.max(z))},
    )


# ---------------------------------------------------------------------------
# variogram Hurst estimation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class VariogramFit:
    hurst: float
    prefactor: float
    fractal_dimension: float
    r2: float
    lags: tuple[float, ...]
    values: tuple[float, ...]

    def __iter__(self):
        # unpacks as (H_hat, prefactor)
        return iter((self.hurst, self.prefactor))


def geometric_lags(max_lag: float, n: int = 8, ratio: float = 2.0) -> np.ndarray:
    """``max_lag / ratio^k`` for ``k = n-1, ..., 0`` (increasing)."""
    return max_lag / ratio ** np.arange(n - 1, -1, -1, dtype=float)


def variogram_hurst(source: KernelSpec | Ensemble, lags: Iterable[float], *, t0: float = 0.0,
                    lam_scale: float | None = None) -> VariogramFit:
    """Fit ``E[(X(t0 + tau) - X(t0))^2] ~ A tau^{2H}`` on ``lags``.

    Analytic mode (``source`` a :class:`KernelSpec`) evaluates the increment
    variance from the kernel at base time ``t0``.  Ensemble mode pools the
    sample mean square of all increments of each lag over the grid; lags
    are rounded to multiples of the (uniform) grid step.  A
    :class:`RegimeWarning` is issued when ``lambda * max(lags) > 0.1``.
    """
    lags = np.asarray(sorted(float(x) for x in lags))
    if lags.size < 4 or np.any(lags <= 0):
        raise DomainError("variogram fit needs at least four positive lags")
    if isinstance(source, KernelSpec):
        spec = source
        values = np.array([spec.increment_variance(float(x), t0) for x in lags])
    elif isinstance(source, Ensemble):
        spec = source.spec
        grid = source.grid
        if not grid.uniform:
            raise DomainError("ensemble variograms need a uniform grid")
        steps = np.rint(lags / grid.dt).astype(int)
        if np.any(steps < 1) or np.any(np.abs(steps * grid.dt - lags) > 1e-9 * lags):
            raise DomainError("ensemble lags must be positive multiples of the grid step")
        if np.any(steps >= grid.n):
            raise DomainError("lag exceeds the grid span")
        p = source.paths
        values = np.array([float(np.mean((p[:, k:] - p[:, :-k]) ** 2)) for k in steps])
    else:
        raise TypeError("variogram_hurst takes a KernelSpec or an Ensemble")
    scale = lam_scale if lam_scale is not None else (spec.lambda_scale if spec is not None else None)
    if scale is not None and scale * lags[-1] > 0.1:
        warnings.warn(f"lambda * max lag = {scale * lags[-1]:.3g} > 0.1: outside the small-lag regime",
                      RegimeWarning, stacklevel=2)
    slope, pref, r2 = loglog_power_fit(lags, values)
    h = 0.5 * slope
    return VariogramFit(h, pref, 2.0 - h, r2, tuple(lags.tolist()), tuple(values.tolist()))


# ---------------------------------------------------------------------------
# scaling, long-range dependence, tails
# ---------------------------------------------------------------------------

def scaling_check(family: Family | str, alpha: float, beta: float | None, lam: float, r: float,
                  pairs: Sequence[tuple[float, float]], *, exponent: float | None = None,
                  tol: float | None = None, reduced: bool | None = None) -> PropertyReport:
    """Max relative gap of ``C(rt, rs; lam) = r^{2H} C(t, s; r lam)`` over ``pairs``.

    Default tolerance is 1e-8, or 1e-6 for the quadrature-backed two-index families.
    """
    if not r > 0:
        raise DomainError("scale factor r must be positive")
    fam = Family(family)
    kw = dict(family=fam, alpha=alpha, lam=lam, beta=beta, exponent=exponent, reduced=reduced)
    spec = KernelSpec(**kw)
    spec_r = KernelSpec(**{**kw, "lam": r * lam})
    h = spec.hurst
    if h is None:
        raise DomainError(f"family {fam.value} has no global Hurst index")
    if tol is None:
        tol = 1e-6 if fam in (Family.TWO_INDEX_FOU, Family.TWO_INDEX_TFBM) else 1e-8
    gap = 0.0
    worst = None
    for t, s in pairs:
        lhs = spec.cov(r * t, r * s)
        rhs = r ** (2 * h) * spec_r.cov(t, s)
        if lhs == 0.0 and rhs == 0.0:
            continue
        g = abs(lhs - rhs) / abs(lhs)
        if g > gap or worst is None:
            gap = max(gap, g)
            worst = (t, s)
    return PropertyReport.make(
        f"scaling {fam.value} r={r:g}", gap, 0.0, tol,
        details=f"max relative gap over {len(pairs)} pairs, H={h:.6g}",
        extras={"worst_pair": worst, "hurst": h},
    )


def correlation_tfbm(alpha: float, lam: float, t: float, s: float) -> float:
    """``R(t, s) = C(t, s) / sqrt(sigma^2(t) sigma^2(s))`` of TFBM."""
    if t <= 0 or s <= 0:
        raise DomainError("TFBM correlation is undefined at the pinned origin (zero variance)")
    return float(tfbm_cov(alpha, lam, t, s)) / math.sqrt(
        float(tfbm_variance(alpha, lam, t)) * float(tfbm_variance(alpha, lam, s)))


def lrd_check(alpha: float, lam: float, t: float, tau_grid: Sequence[float], *, family: str = "TFBM",
              drift_tol: float = 0.01) -> PropertyReport:
    """Plateau of the correlation ``R(t, t + tau)`` at large lags.

    Measured is the relative drift ``|R(tmax) - R(tmax/2)| / R(tmax)``; it is
    replaced by ``inf`` if any correlation on ``tau_grid`` is not strictly
    positive.  ``family = "FOU"`` runs the same test on the stationary
    correlation ``C(tau)/C(0)``, which decays to zero instead.
    """
    if not t > 0:
        raise DomainError("lrd_check needs t > 0: the correlation is undefined at the pinned origin")
    taus = np.asarray(tau_grid, dtype=float)
    if taus.size < 1 or np.any(np.diff(taus) <= 0) or taus[0] <= 0:
        raise DomainError("tau_grid must be positive and increasing")
    tmax = float(taus[-1])
    if family == "TFBM":
        corr = lambda tau: correlation_tfbm(alpha, lam, t, t + tau)  # noqa: E731
        var0 = 2.0 * float(fou_cov(alpha, lam, 0.0))
        plateau = 0.5 * math.sqrt(float(tfbm_variance(alpha, lam, t)) / var0)
    elif family == "FOU":
        c0 = float(fou_cov(alpha, lam, 0.0))
        corr = lambda tau: float(fou_cov(alpha, lam, tau)) / c0  # noqa: E731
        plateau = 0.0
    else:
        raise DomainError(f"lrd_check supports TFBM and FOU, got {family!r}")
    values = np.array([corr(float(x)) for x in taus])
    r_max, r_half = corr(tmax), corr(0.5 * tmax)
    positive = bool(np.all(values > 0)) and r_max > 0 and r_half > 0
    drift = abs(r_max - r_half) / r_max if r_max > 0 else math.inf
    measured = drift if positive else math.inf
    return PropertyReport.make(
        f"lrd {family} t={t:g}", measured, 0.0, drift_tol,
        details=f"relative drift of R(t,t+tau) between tau={0.5 * tmax:g} and {tmax:g}; all positive={positive}",
        extras={"R_max": r_max, "R_half": r_half, "drift": drift, "limit": plateau, "positive": positive,
                "R_grid": values.tolist()},
    )


def tail_asymptote_check(alpha: float, beta: float, lam: float, tau: float, *, tol: float = 0.05,
                         rtol: float = 1e-10) -> PropertyReport:
    """Ratio of the two-index covariance to the leading algebraic tail term at ``tau``."""
    name = f"tail alpha={alpha:g} beta={beta:g} lam*tau={lam * tau:g}"
    if not (0.0 < beta <= 1.0):
        raise DomainError("beta must lie in (0, 1]")
    if beta >= 1.0 or abs(math.sin(beta * math.pi)) < 1e-12:
        return PropertyReport.make(name, math.nan, 1.0, tol,
                                   details="inapplicable: the leading tail term vanishes (sin(beta pi) = 0)",
                                   extras={"inapplicable": True})
    if lam * tau < 30:
        warnings.warn(f"lambda*tau = {lam * tau:g} < 30: the algebraic tail need not dominate yet",
                      RegimeWarning, stacklevel=2)
    cov = two_index_offdiag_cov(alpha, beta, lam, tau, rtol=rtol)
    lead = two_index_leading_term(alpha, beta, lam, tau)
    ratio = cov.value / lead
    note = "" if alpha * beta > 0.5 else " (alpha*beta <= 1/2: no finite variance; off-diagonal integral only)"
    return PropertyReport.make(name, ratio, 1.0, tol, details="C(tau) / leading term" + note,
                               extras={"cov": cov.value, "cov_abs_err": cov.abs_err, "leading": lead})


# ---------------------------------------------------------------------------
# multifractional checks
# ---------------------------------------------------------------------------

def lass_prefactor(alpha0: float) -> float:
    """``D = -Gamma(1/2 - alpha) / (2^{2 alpha - 1} sqrt(pi) Gamma(alpha))``: small-lag increment-variance constant."""
    return tfbm_small_time_coeff(alpha0)


def _rescaled_increment_cov(curve: ParamCurve, lam: float, t0: float, eps: float, u: float, v: float,
                            h2: float) -> float:
    k = lambda a, b: riesz_mou_cov(curve, lam, a, b)  # noqa: E731
    a, b = t0 + eps * u, t0 + eps * v
    return (k(a, b) - k(a, t0) - k(t0, b) + k(t0, t0)) / eps**h2


def lass_check(alpha_curve: float | ParamCurve, lam: float, t0: float, eps_grid: Sequence[float],
               uv_pairs: Sequence[tuple[float, float]], *, tol: float = 0.02, hurst_tol: float = 0.01,
               name: str | None = None) -> PropertyReport:
    """Local asymptotic self-similarity of the Riesz MOU/TMBM at ``t0``.

    The increment covariance ``C_eps(u, v)`` of ``X(t0 + eps u) - X(t0)`` and
    ``X(t0 + eps v) - X(t0)``, rescaled by ``eps^{2 alpha(t0) - 1}``, is
    compared with the FBM form ``D/2 (|u|^{2H} + |v|^{2H} - |u - v|^{2H})``,
    ``H = alpha(t0) - 1/2``.  Gaps are scaled by
    ``sqrt(F(u, u) F(v, v))`` of the FBM form ``F``.  Measured is the largest
    gap at the smallest ``eps``; it is replaced by ``inf`` when the gaps do not decrease
    monotonically or the Hurst index recovered from ``C_eps(u, u)`` misses
    ``H`` by more than ``hurst_tol``.
    """
    curve = as_curve(alpha_curve)
    curve.require_alpha(holder_cap=True)
    eps = np.asarray(eps_grid, dtype=float)
    if eps.size < 1 or np.any(eps <= 0) or np.any(np.diff(eps) >= 0):
        raise DomainError("eps_grid must be positive and strictly decreasing")
    a0 = float(curve(t0))
    h = a0 - 0.5
    h2 = 2 * h
    d = lass_prefactor(a0)

    def fbm_form(u: float, v: float) -> float:
        return 0.5 * d * (abs(u) ** h2 + abs(v) ** h2 - abs(u - v) ** h2)

    gaps = []
    for e in eps:
        g = 0.0
        for u, v in uv_pairs:
            ref = fbm_form(u, v)
            val = _rescaled_increment_cov(curve, lam, t0, float(e), u, v, h2)
            # normalized like a correlation, so pairs with ref == 0 stay meaningful
            g = max(g, abs(val - ref) / math.sqrt(fbm_form(u, u) * fbm_form(v, v)))
        gaps.append(g)
    monotone = all(b <= a for a, b in zip(gaps, gaps[1:]))
    if not monotone:
        warnings.warn("lass gaps do not decrease with eps: eps not yet in the asymptotic regime",
                      RegimeWarning, stacklevel=2)
    # recovered Hurst: variogram of the rescaled increments at the smallest eps
    e_min = float(eps[-1])
    us = np.array([0.125, 0.25, 0.5, 1.0])
    var_u = np.array([_rescaled_increment_cov(curve, lam, t0, e_min, u, u, h2) for u in us])
    slope, pref, _ = loglog_power_fit(us, var_u)
    h_hat = 0.5 * slope
    hurst_ok = abs(h_hat - h) <= hurst_tol
    measured = gaps[-1] if (monotone and hurst_ok) else math.inf
    return PropertyReport.make(
        name or f"lass t0={t0:g}", measured, 0.0, tol,
        details=(f"relative gap to FBM form at lam*eps={lam * e_min:.3g}; monotone={monotone}; "
                 f"recovered H={h_hat:.6f} vs {h:.6f}"),
        extras={"gaps": gaps, "eps": eps.tolist(), "hurst_expected": h, "hurst_recovered": h_hat,
                "prefactor_expected": d, "prefactor_recovered": pref, "monotone": monotone},
    )


def tmbm_fractal_report(alpha_curve: float | ParamCurve, interval: tuple[float, float], *, lam: float = 0.5,
                        n_dense: int = 2001, tol: float = 0.05, max_lag: float | None = None
                        ) -> PropertyReport:
    """Expected graph dimension ``5/2 - min alpha`` on ``interval`` and a local variogram check.

    The local Hurst index is estimated by the analytic variogram of TMBM
    based at the minimizing time; the report passes if it is within ``tol``
    of ``min alpha - 1/2``.
    """
    curve = as_curve(alpha_curve)
    curve.require_alpha(holder_cap=True)
    lo, hi = float(interval[0]), float(interval[1])
    if not hi > lo:
        raise DomainError("interval must have positive length")
    ts = np.linspace(lo, hi, n_dense)
    vals = np.asarray(curve(ts), dtype=float)
    k = int(np.argmin(vals))
    t_min, a_min = float(ts[k]), float(vals[k])
    expected_h = a_min - 0.5
    dim = 2.5 - a_min
    spec = KernelSpec(Family.TMBM, alpha=curve, lam=lam)
    if max_lag is None:
        max_lag = min(0.1 / lam, 1e-2 * (hi - lo))
    lags = geometric_lags(max_lag, 8)
    # look forward from the minimizer unless it is the right end point
    base = t_min if t_min + lags[-1] <= hi else t_min - lags[-1]
    fit = variogram_hurst(spec, lags, t0=base)
    return PropertyReport.make(
        "tmbm fractal dimension", fit.hurst, expected_h, tol,
        details=f"local H at t={t_min:g}; expected graph dimension 5/2 - min alpha = {dim:.6g}",
        extras={"expected_dimension": dim, "t_min": t_min, "alpha_min": a_min,
                "local_dimension": 2.0 - fit.hurst, "r2": fit.r2},
    )
