"""The acceptance suite: fourteen criteria, each a list of property reports.

A criterion passes when all its scored reports pass.  Informational reports
are computed and printed alongside but do not decide the outcome.  Suites
group criteria by theme; ``all`` runs every criterion.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate

from tfbm.analysis import (
    PropertyReport,
    ensemble_cov_report,
    geometric_lags,
    lass_check,
    lrd_check,
    scaling_check,
    tail_asymptote_check,
    variogram_hurst,
)
from tfbm.errors import UnsupportedParameterError
from tfbm.gp import TimeGrid, build_cov_matrix, cholesky_psd, sample_paths
from tfbm.kernels.base import reduce_kernel
from tfbm.kernels.curves import ParamCurve
from tfbm.kernels.fou import fou_cov, tfbm_coefficients, tfbm_cov, tfbm_variance
from tfbm.kernels.multifractional import (
    mou_spectral_cov,
    tmbm_coefficients,
    tmbm_cov,
    var_temper_mou_pair_kernel,
    var_temper_tmbm_cov,
    weyl_mou_cov,
)
from tfbm.kernels.spec import KernelSpec
from tfbm.kernels.tempering import (
    riesz_var_temper_cov,
    var_temper_cov,
    var_temper_pair_kernel,
    var_temper_tfbm_cov,
)
from tfbm.kernels.two_index import (
    two_index_cov,
    two_index_increment_variance,
    two_index_small_time_coeff,
    two_index_tfbm_cov,
)
from tfbm.quad import loglog_power_fit
from tfbm.tables import format_table

__all__ = [
    "CriterionResult",
    "CRITERIA",
    "SUITES",
    "run_criterion",
    "run_suite",
    "fig1_table",
    "FIG1_HEADER",
    "moving_average_oracle",
]

ALPHAS = (0.75, 1.0, 1.25, 2.0)
LAMBDAS = (0.5, 1.0, 2.0)
TAU_GRID = tuple(np.geomspace(1e-3, 20.0, 60).tolist())
PAIR_TIMES = (0.3, 1.1, 2.5, 4.0, 7.5)
PAIRS_25 = tuple((t, s) for t in PAIR_TIMES for s in PAIR_TIMES)


@dataclass
class CriterionResult:
    number: int
    title: str
    reports: list[PropertyReport]
    informational: list[PropertyReport] = field(default_factory=list)
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.reports)

    def summary_line(self) -> str:
        worst = [r.name for r in self.reports if not r.passed]
        tail = f" (failed: {', '.join(worst)})" if worst else ""
        return f"criterion {self.number:2d} {'PASS' if self.passed else 'FAIL'} {self.title} [{self.seconds:.2f} s]{tail}"

    def lines(self) -> list[str]:
        out = [self.summary_line()]
        out += ["    " + r.to_line() for r in self.reports]
        out += ["    info " + r.to_line() for r in self.informational]
        return out

    def to_json(self) -> dict:
        return {
            "criterion": self.number,
            "title": self.title,
            "passed": self.passed,
            "seconds": self.seconds,
            "reports": [r.to_json() for r in self.reports],
            "informational": [r.to_json() for r in self.informational],
        }


def _rel(a: float, b: float) -> float:
    if a == b:
        return 0.0
    return abs(a - b) / max(abs(a), abs(b))


def _max_rel_report(name: str, pairs, f_test: Callable, f_ref: Callable, tol: float) -> PropertyReport:
    worst, where = 0.0, None
    for p in pairs:
        g = _rel(f_test(*p), f_ref(*p))
        if g > worst or where is None:
            worst, where = max(worst, g), p
    return PropertyReport.make(name, worst, 0.0, tol, details=f"max relative gap over {len(pairs)} points",
                               extras={"worst_at": where})


# ---------------------------------------------------------------------------
# criteria
# ---------------------------------------------------------------------------

def criterion_1() -> tuple[list, list]:
    start = time.perf_counter()
    pts = [(a, lam, tau) for a in ALPHAS for lam in LAMBDAS for tau in TAU_GRID]
    rep = _max_rel_report(
        "two_index_cov(beta=1) vs fou_cov", pts,
        lambda a, lam, tau: two_index_cov(a, 1.0, lam, tau).value,
        lambda a, lam, tau: fou_cov(a, lam, tau), 1e-8)
    elapsed = time.perf_counter() - start
    return [rep, PropertyReport.make("runtime seconds", elapsed, 0.0, 10.0, details="wall clock for 720 points")], []


def criterion_2() -> tuple[list, list]:
    s0 = 1.0
    pts = [(a, lam, tau) for a in ALPHAS for lam in LAMBDAS for tau in TAU_GRID]
    rep = _max_rel_report(
        "weyl_mou_cov(constant alpha) vs fou_cov", pts,
        lambda a, lam, tau: weyl_mou_cov(ParamCurve.constant(a), lam, s0 + tau, s0),
        lambda a, lam, tau: fou_cov(a, lam, tau), 1e-9)
    return [rep], []


def criterion_3() -> tuple[list, list]:
    curves = {
        "rising 0.65->0.9": ParamCurve.logistic(0.65, 0.9, 5.0, 1.0),
        "falling 0.93->0.62": ParamCurve.logistic(0.93, 0.62, 4.0, 2.0),
    }
    times = np.linspace(0.25, 9.75, 8)
    reports = []
    for label, curve in curves.items():
        for lam in (0.5, 1.0):
            checked, unsupported, worst = 0, [], 0.0
            for t in times:
                for s in times:
                    if t == s:
                        continue
                    try:
                        w = mou_spectral_cov(curve, lam, float(t), float(s))
                    except UnsupportedParameterError:
                        unsupported.append((float(t), float(s)))
                        continue
                    checked += 1
                    worst = max(worst, _rel(w, weyl_mou_cov(curve, lam, float(t), float(s))))
            reports.append(PropertyReport.make(
                f"Whittaker vs Psi, {label}, lam={lam:g}", worst, 0.0, 1e-6,
                details=f"{checked} pairs compared, {len(unsupported)} unsupported by the Whittaker route",
                extras={"unsupported": unsupported, "checked": checked}))
    return reports, []


def criterion_4() -> tuple[list, list]:
    reports = []
    a, lam = 1.25, 0.5
    reports.append(_max_rel_report(
        "TFBM explicit vs reduced FOU", PAIRS_25, lambda t, s: tfbm_cov(a, lam, t, s),
        lambda t, s: reduce_kernel(lambda u, v: fou_cov(a, lam, u - v), t, s), 1e-10))
    reports.append(_max_rel_report(
        "TFBM coefficient form vs reduced FOU", PAIRS_25,
        lambda t, s: tfbm_coefficients(a, lam, t, s).assemble(t, s),
        lambda t, s: reduce_kernel(lambda u, v: fou_cov(a, lam, u - v), t, s), 1e-10))
    ta, tb = 1.5, 0.8
    reports.append(_max_rel_report(
        "two-index explicit vs reduced base", PAIRS_25,
        lambda t, s: two_index_tfbm_cov(ta, tb, lam, t, s).value,
        lambda t, s: reduce_kernel(lambda u, v: two_index_cov(ta, tb, lam, u - v).value, t, s), 1e-6))
    lam_curve = ParamCurve.logistic(0.3, 0.8, 3.0, 1.0)
    reports.append(_max_rel_report(
        "variable tempering explicit vs reduced base", PAIRS_25,
        lambda t, s: var_temper_tfbm_cov(a, lam_curve, t, s),
        lambda t, s: reduce_kernel(var_temper_pair_kernel(a, lam_curve, t, s), t, s), 1e-10))
    a_curve = ParamCurve.logistic(0.8, 1.2, 3.0, 1.0)

    def riesz_pair(t, s):
        ap = 0.5 * (a_curve(t) + a_curve(s))
        return lambda u, v: fou_cov(ap, lam, u - v)

    reports.append(_max_rel_report(
        "TMBM explicit vs reduced base", PAIRS_25, lambda t, s: tmbm_cov(a_curve, lam, t, s),
        lambda t, s: reduce_kernel(riesz_pair(t, s), t, s), 1e-10))
    reports.append(_max_rel_report(
        "TMBM coefficient form vs reduced base", PAIRS_25,
        lambda t, s: tmbm_coefficients(a_curve, lam, t, s).assemble(t, s),
        lambda t, s: reduce_kernel(riesz_pair(t, s), t, s), 1e-10))
    reports.append(_max_rel_report(
        "variable-tempering TMBM coefficient form vs reduced base", PAIRS_25,
        lambda t, s: var_temper_tmbm_cov(a_curve, lam_curve, t, s),
        lambda t, s: reduce_kernel(var_temper_mou_pair_kernel(a_curve, lam_curve, t, s), t, s), 1e-10))
    return reports, []


def criterion_5() -> tuple[list, list]:
    grid = np.linspace(0.1, 5.0, 5)
    pairs = [(float(t), float(s)) for t in grid for s in grid]
    reports = []
    for r in (0.5, 2.0, 5.0):
        reports.append(scaling_check("FOU", 1.25, None, 0.5, r, pairs))
        reports.append(scaling_check("TFBM", 1.25, None, 0.5, r, pairs))
        reports.append(scaling_check("StretchedExp", 1.0, None, 0.5, r, pairs, exponent=1.3))
        reports.append(scaling_check("GenCauchy", 1.0, None, 0.5, r, pairs, exponent=0.7, reduced=True))
        reports.append(scaling_check("TwoIndexTFBM", 1.5, 0.8, 0.5, r, pairs))
    return reports, []


SMALL_TIME_CASES = ((1.1, 1.0), (1.5, 0.8), (2.0, 0.55))
SMALL_TIME_LAMBDA = 1.0


def printed_small_time_prefactor(alpha: float, beta: float) -> float:
    """``-1 / (Gamma(alpha beta) cos(alpha beta pi))`` as stated in the criterion."""
    ab = alpha * beta
    return -1.0 / (math.gamma(ab) * math.cos(ab * math.pi))


def criterion_6() -> tuple[list, list]:
    ts = np.geomspace(1e-4, 1e-2, 9)
    reports, info = [], []
    for a, b in SMALL_TIME_CASES:
        h2 = 2 * a * b - 1
        v = np.array([two_index_increment_variance(a, b, SMALL_TIME_LAMBDA, float(t)).value for t in ts])
        slope, free_pref, _ = loglog_power_fit(ts, v)
        reports.append(PropertyReport.make(
            f"slope (alpha, beta)=({a:g}, {b:g})", slope, h2, 0.01, relative=True,
            details=f"log-log fit of sigma_hat^2 on t in [1e-4, 1e-2], lambda={SMALL_TIME_LAMBDA:g}"))
        measured = float(v[0] / ts[0] ** h2)
        reports.append(PropertyReport.make(
            f"prefactor vs -1/(Gamma(ab)cos(ab pi)) (alpha, beta)=({a:g}, {b:g})", measured,
            printed_small_time_prefactor(a, b), 0.02, relative=True,
            details="measured as sigma_hat^2(t)/t^{2ab-1} at t=1e-4",
            extras={"free_fit_prefactor": free_pref}))
        info.append(PropertyReport.make(
            f"prefactor vs -1/(Gamma(2ab)cos(ab pi)) (alpha, beta)=({a:g}, {b:g})", measured,
            two_index_small_time_coeff(a, b), 0.02, relative=True,
            details="same measurement against the coefficient of the exact small-t law"))
    return reports, info


def criterion_7() -> tuple[list, list]:
    reports = [tail_asymptote_check(1.2, b, 1.0, 40.0) for b in (0.4, 0.7)]
    info = [tail_asymptote_check(1.2, b, 1.0, 100.0) for b in (0.4, 0.7, 0.9)]
    return reports, info


def criterion_8(n_paths: int = 20000, seed: int = 20240611) -> tuple[list, list]:
    start = time.perf_counter()
    grid = TimeGrid.uniform_grid(0.0, 10.0, 64)
    reports = []
    for fam in ("FOU", "TFBM"):
        spec = KernelSpec(fam, alpha=1.25, lam=0.5)
        m = build_cov_matrix(spec, grid)
        ens = sample_paths(cholesky_psd(m), n_paths, seed)
        reports.append(ensemble_cov_report(ens, m.entries, name=f"{fam} entries within 3 SE"))
    elapsed = time.perf_counter() - start
    reports.append(PropertyReport.make("runtime seconds", elapsed, 0.0, 60.0, details="build, factor, sample, compare"))
    return reports, []


HURST_LAG_RANGE = 1e-3  # lambda * max lag for the analytic variogram


def criterion_9(n_paths: int = 20000, seed: int = 7) -> tuple[list, list]:
    reports = []
    tfbm = KernelSpec("TFBM", alpha=1.25, lam=0.5)
    fit = variogram_hurst(tfbm, geometric_lags(HURST_LAG_RANGE / 0.5, 8))
    reports.append(PropertyReport.make("analytic H, TFBM alpha=1.25", fit.hurst, 0.75, 0.01,
                                       details=f"fractal dimension 2 - H_hat = {fit.fractal_dimension:.6f}",
                                       extras={"fractal_dimension": fit.fractal_dimension}))
    reports.append(PropertyReport.make("fractal dimension, TFBM alpha=1.25", fit.fractal_dimension, 2.5 - 1.25, 0.01,
                                       details="2 - H_hat against 5/2 - alpha"))
    for a, b in ((1.1, 1.0), (1.375, 0.8), (2.2, 0.5)):
        spec = KernelSpec("TwoIndexTFBM", alpha=a, beta=b, lam=0.5)
        f2 = variogram_hurst(spec, geometric_lags(HURST_LAG_RANGE / 0.5, 8))
        reports.append(PropertyReport.make(f"analytic H, two-index ({a:g}, {b:g})", f2.hurst, a * b - 0.5, 0.01,
                                           details=f"fractal dimension {f2.fractal_dimension:.6f}",
                                           extras={"fractal_dimension": f2.fractal_dimension}))
    grid = TimeGrid.uniform_grid(0.0, 0.2, 65)
    m = build_cov_matrix(tfbm, grid)
    ens = sample_paths(cholesky_psd(m), n_paths, seed)
    fe = variogram_hurst(ens, [grid.dt * k for k in (1, 2, 4, 8, 16, 32)])
    reports.append(PropertyReport.make("ensemble H, TFBM alpha=1.25", fe.hurst, 0.75, 0.05,
                                       details=f"{n_paths} paths on [0, 0.2]; fractal dimension {fe.fractal_dimension:.4f}",
                                       extras={"fractal_dimension": fe.fractal_dimension}))
    return reports, []


def criterion_10() -> tuple[list, list]:
    a, lam = 1.25, 0.5
    taus = np.linspace(1.0, 100.0 / lam, 40)
    reports = [lrd_check(a, lam, t, taus) for t in (0.5, 1.0, 5.0)]
    c0 = float(fou_cov(a, lam, 0.0))
    r_fou = float(fou_cov(a, lam, 50.0 / lam)) / c0
    reports.append(PropertyReport.make("FOU correlation at tau=50/lambda", r_fou, 0.0, 1e-6,
                                       details="short-range contrast: must decay below 1e-6"))
    return reports, []


def moving_average_oracle(alpha: float, lam_t: float, lam_s: float, t: float, s: float) -> float:
    """``Gamma(alpha)^{-2} int_{-inf}^{min(t,s)} k_t(t-u) k_s(s-u) du`` with ``k(x) = e^{-lam x} x^{alpha-1}``.

    Independent brute-force reference using scipy's adaptive quadrature.
    """
    d = abs(t - s)
    la, lb = (lam_t, lam_s) if t >= s else (lam_s, lam_t)  # la belongs to the later time

    def f(x):
        return math.exp(-la * (d + x) - lb * x) * (d + x) ** (alpha - 1) * x ** (alpha - 1)

    scale = 1.0 / (la + lb)
    head, _ = integrate.quad(f, 0.0, scale, epsabs=0.0, epsrel=1e-13, limit=400)
    tail, _ = integrate.quad(f, scale, math.inf, epsabs=0.0, epsrel=1e-13, limit=400)
    return (head + tail) / math.gamma(alpha) ** 2


def criterion_11() -> tuple[list, list]:
    curve = ParamCurve.logistic(0.3, 0.8, 5.0, 1.0)
    pairs = [(0.5, 0.5), (1.0, 3.0), (4.0, 2.5), (5.0, 5.5), (6.0, 9.0), (8.0, 1.0), (2.0, 7.0), (9.5, 9.5),
             (3.3, 4.4), (7.0, 6.0)]
    reports = []
    for a in (0.8, 1.25):
        reports.append(_max_rel_report(
            f"var_temper_cov vs moving-average integral, alpha={a:g}", pairs,
            lambda t, s: var_temper_cov(a, curve, t, s),
            lambda t, s: moving_average_oracle(a, curve(t), curve(s), t, s), 1e-6))
    pts = [(a, lam, tau) for a in ALPHAS for lam in LAMBDAS for tau in TAU_GRID[::6]]
    reports.append(_max_rel_report(
        "constant curve vs fou_cov", pts,
        lambda a, lam, tau: var_temper_cov(a, ParamCurve.constant(lam), 2.0 + tau, 2.0),
        lambda a, lam, tau: fou_cov(a, lam, tau), 1e-12))
    return reports, []


LASS_LAMBDA = 0.5
LASS_PAIRS = ((1.0, 1.0), (1.0, 0.5), (0.5, 1.0), (1.0, -1.0), (0.25, 0.75), (-0.5, 0.5))


def criterion_12() -> tuple[list, list]:
    eps3 = [x / LASS_LAMBDA for x in (1e-1, 1e-2, 1e-3)]
    eps4 = [x / LASS_LAMBDA for x in (1e-1, 1e-2, 1e-3, 1e-4)]
    logistic = ParamCurve.logistic(0.8, 1.2, 5.0, 1.0)
    reports = [
        lass_check(logistic, LASS_LAMBDA, 5.0, eps3, LASS_PAIRS, name="lass logistic 0.8->1.2 at t0=5"),
        lass_check(logistic, LASS_LAMBDA, 6.5, eps3, LASS_PAIRS, name="lass logistic 0.8->1.2 at t0=6.5"),
        lass_check(0.8, LASS_LAMBDA, 1.0, eps3, LASS_PAIRS, name="lass constant alpha=0.8"),
        # H = 0.75 converges like (lambda eps)^{1/2}: 2.3% at 1e-3, 0.7% at 1e-4
        lass_check(1.25, LASS_LAMBDA, 1.0, eps4, LASS_PAIRS, name="lass constant alpha=1.25"),
    ]
    return reports, []


FIG1_ALPHA = 1.25
FIG1_LAMBDA = 0.5
FIG1_S = 0.5
FIG1_HEADER = ("t", "C_FOU(t-s)", "C_RFOU(t,s)")


def fig1_table() -> np.ndarray:
    """Rows ``(t, C_FOU(t - s), C_RFOU(t, s))`` for ``s = 0.5``, ``lambda = 0.5``, ``alpha = 1.25``."""
    t = np.linspace(0.0, 10.0, 201)
    fou = np.asarray(fou_cov(FIG1_ALPHA, FIG1_LAMBDA, t - FIG1_S))
    rfou = np.asarray(tfbm_cov(FIG1_ALPHA, FIG1_LAMBDA, t, FIG1_S))
    return np.column_stack([t, fou, rfou])


def criterion_13() -> tuple[list, list]:
    tab = fig1_table()
    t, fou, rfou = tab[:, 0], tab[:, 1], tab[:, 2]
    reports = [PropertyReport.make("RFOU at t=0", float(rfou[0]), 0.0, 0.0)]
    k = int(np.argmin(np.abs(t - FIG1_S)))
    reports.append(PropertyReport.make("RFOU(s,s) vs tfbm_variance(s)", float(rfou[k]),
                                       float(tfbm_variance(FIG1_ALPHA, FIG1_LAMBDA, FIG1_S)), 1e-14, relative=True))
    reports.append(PropertyReport.make("FOU peak at t=s vs variance", float(fou[k]),
                                       float(fou_cov(FIG1_ALPHA, FIG1_LAMBDA, 0.0)), 1e-14, relative=True))
    gap = max(_rel(fou[k - j], fou[k + j]) for j in range(1, k + 1))
    reports.append(PropertyReport.make("FOU symmetric about t=s", gap, 0.0, 1e-12,
                                       details=f"{k} mirrored pairs"))
    first = format_table(FIG1_HEADER, fig1_table())
    second = format_table(FIG1_HEADER, fig1_table())
    reports.append(PropertyReport.make("file identical across runs", 0.0 if first == second else 1.0, 0.0, 0.0))
    return reports, []


def criterion_14() -> tuple[list, list]:
    pts = [(a, lam, tau) for a in ALPHAS for lam in LAMBDAS for tau in TAU_GRID[::6]]
    reports = [_max_rel_report(
        "riesz_var_temper_cov(constant lambda) vs fou_cov", pts,
        lambda a, lam, tau: riesz_var_temper_cov(a, ParamCurve.constant(lam), 1.0 + tau, 1.0).value,
        lambda a, lam, tau: fou_cov(a, lam, tau), 1e-8)]
    curve = ParamCurve.logistic(0.3, 0.8, 5.0, 1.0)
    pairs = [(1.0, 3.0), (4.0, 2.5), (5.0, 5.5), (6.0, 9.0), (8.0, 1.0), (0.2, 7.0), (9.5, 0.1), (3.3, 4.4)]
    reports.append(_max_rel_report(
        "riesz_var_temper_cov symmetric in (t, s)", pairs,
        lambda t, s: riesz_var_temper_cov(1.25, curve, t, s).value,
        lambda t, s: riesz_var_temper_cov(1.25, curve, s, t).value, 1e-12))
    return reports, []


CRITERIA: dict[int, tuple[str, Callable[[], tuple[list, list]]]] = {
    1: ("Bessel reduction of the two-index kernel", criterion_1),
    2: ("Kummer identity for constant alpha", criterion_2),
    3: ("Psi / Whittaker equivalence", criterion_3),
    4: ("reduction consistency", criterion_4),
    5: ("scaling identity", criterion_5),
    6: ("two-index small-time law", criterion_6),
    7: ("two-index long-time tail", criterion_7),
    8: ("Monte-Carlo covariance law", criterion_8),
    9: ("Hurst index and fractal dimension", criterion_9),
    10: ("long-range dependence plateau", criterion_10),
    11: ("variable tempering against the moving-average integral", criterion_11),
    12: ("TMBM local self-similarity", criterion_12),
    13: ("FOU versus reduced FOU comparison table", criterion_13),
    14: ("Riesz variable-tempering quadrature kernel", criterion_14),
}

SUITES: dict[str, tuple[int, ...]] = {
    "identities": (1, 2, 3, 4, 14),
    "scaling": (5,),
    "asymptotics": (6, 7),
    "montecarlo": (8,),
    "hurst": (9,),
    "lrd": (10,),
    "variable": (11,),
    "lass": (12,),
    "fig1": (13,),
    "appendix": (14,),
    "all": tuple(range(1, 15)),
}


def run_criterion(number: int) -> CriterionResult:
    title, fn = CRITERIA[number]
    start = time.perf_counter()
    reports, info = fn()
    return CriterionResult(number, title, reports, info, time.perf_counter() - start)


def run_suite(name: str) -> list[CriterionResult]:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    return [run_criterion(n) for n in SUITES[name]]
