"""Numerical integration engine.

Three building blocks cover every integral the kernels need:

* :func:`integrate` -- adaptive, vectorized Gauss-Kronrod (7/15) on a finite
  interval with optional breakpoints.
* :func:`laplace_integral` -- double-exponential (exp-sinh) rule for
  integrals over ``(0, inf)`` with an integrable endpoint singularity.
* :func:`cosine_transform` -- Fourier cosine integrals of slowly decaying
  spectral densities, using adaptive panels on ``[0, k0]`` followed by
  half-period segment summation with iterated Aitken acceleration.

:func:`rotated_cosine_transform` is an alternative route for spectral
densities that continue analytically into the first quadrant; it rotates the
path onto the imaginary axis where the oscillation becomes exponential decay,
which keeps relative accuracy when the transform itself is exponentially
small.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "QuadResult",
    "integrate",
    "laplace_integral",
    "laplace_integral_log",
    "cosine_transform",
    "sine_squared_transform",
    "rotated_cosine_transform",
    "loglog_power_fit",
]


@dataclass(frozen=True)
class QuadResult:
    """Value of one numerical integral with its error bookkeeping."""

    value: float
    abs_err: float
    nodes_used: int
    converged: bool

    def __float__(self) -> float:
        return float(self.value)

    def __add__(self, other: "QuadResult") -> "QuadResult":
        return QuadResult(
            self.value + other.value,
            self.abs_err + other.abs_err,
            self.nodes_used + other.nodes_used,
            self.converged and other.converged,
        )

    def scaled(self, factor: float) -> "QuadResult":
        return QuadResult(self.value * factor, self.abs_err * abs(factor), self.nodes_used, self.converged)


# Gauss-Kronrod 7/15 abscissae and weights on [-1, 1] (positive half).
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])
_X15 = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_W15 = np.concatenate([_WGK[:-1], _WGK[::-1]])
_W7 = np.zeros(15)
# Gauss nodes are the odd-indexed Kronrod nodes: xgk[1], xgk[3], xgk[5], xgk[7].
for _i, _w in zip((1, 3, 5), _WG[:3]):
    _W7[_i] = _w
    _W7[14 - _i] = _w
_W7[7] = _WG[3]

_EPS = np.finfo(float).eps


def _gk15(f: Callable, lo: np.ndarray, hi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Kronrod estimate and QUADPACK-style error for each interval."""
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    x = mid[:, None] + half[:, None] * _X15[None, :]
    fx = np.asarray(f(x), dtype=float).reshape(x.shape)
    kron = half * (fx @ _W15)
    gauss = half * (fx @ _W7)
    mean = kron / (2.0 * half)
    resasc = half * (np.abs(fx - mean[:, None]) @ _W15)
    resabs = half * (np.abs(fx) @ _W15)
    err = np.abs(kron - gauss)
    with np.errstate(divide="ignore", invalid="ignore"):
        scaled = np.where(
            (resasc > 0) & (err > 0),
            resasc * np.minimum(1.0, (200.0 * err / np.where(resasc > 0, resasc, 1.0)) ** 1.5),
            err,
        )
    floor = 50.0 * _EPS * resabs
    err = np.maximum(scaled, floor)
    if not np.all(np.isfinite(kron)):
        err = np.where(np.isfinite(kron), err, np.inf)
    return kron, err


def integrate(
    f: Callable,
    a: float,
    b: float,
    tol: float = 1e-10,
    *,
    rtol: float = 0.0,
    points: Sequence[float] = (),
    limit: int = 4000,
) -> QuadResult:
    """Adaptive Gauss-Kronrod quadrature of ``f`` over ``[a, b]``.

    ``f`` receives numpy arrays of abscissae and must return an array of the
    same shape. Convergence means the summed error estimate is below
    ``max(tol, rtol * |value|)``.
    """
    if b < a:
        res = integrate(f, b, a, tol, rtol=rtol, points=points, limit=limit)
        return QuadResult(-res.value, res.abs_err, res.nodes_used, res.converged)
    if a == b:
        return QuadResult(0.0, 0.0, 0, True)
    edges = np.unique(np.array([a, *[p for p in points if a < p < b], b], dtype=float))
    lo, hi = edges[:-1], edges[1:]
    val, err = _gk15(f, lo, hi)
    nodes = 15 * lo.size
    while True:
        total = float(np.sum(val))
        total_err = float(np.sum(err))
        target = max(tol, rtol * abs(total))
        if total_err <= target:
            return QuadResult(total, total_err, nodes, True)
        if lo.size >= limit:
            return QuadResult(total, total_err, nodes, False)
        split = err > target / (2.0 * lo.size)
        split[np.argmax(err)] = True
        # Stop subdividing intervals that have shrunk to rounding level.
        width_ok = (hi - lo) > 64.0 * _EPS * np.maximum(np.abs(lo), np.abs(hi))
        split &= width_ok
        if not np.any(split):
            return QuadResult(total, total_err, nodes, False)
        mid = 0.5 * (lo[split] + hi[split])
        new_lo = np.concatenate([lo[split], mid])
        new_hi = np.concatenate([mid, hi[split]])
        nv, ne = _gk15(f, new_lo, new_hi)
        nodes += 15 * new_lo.size
        keep = ~split
        lo = np.concatenate([lo[keep], new_lo])
        hi = np.concatenate([hi[keep], new_hi])
        val = np.concatenate([val[keep], nv])
        err = np.concatenate([err[keep], ne])


# Double-exponential (exp-sinh) rule.  u = scale * exp(pi/2 sinh x); the x
# range keeps u within roughly [1e-300, 1e300] times the scale.
_DE_XMAX = 6.75
_DE_LEVELS = 9


def _de_new_nodes(h: float) -> np.ndarray:
    """Nodes added when the step is halved to ``h``: the odd multiples of ``h``."""
    n = math.floor(_DE_XMAX / h)
    j = np.arange(-n, n + 1)
    return j[j % 2 != 0] * h


def _de_terms_log(logg: Callable, x: np.ndarray, scale: float) -> np.ndarray:
    s = 0.5 * math.pi * np.sinh(x)
    log_u = math.log(scale) + s
    u = np.exp(log_u)
    with np.errstate(over="ignore", under="ignore", invalid="ignore", divide="ignore"):
        lw = np.log(0.5 * math.pi) + np.log(np.cosh(x)) + log_u
        lt = logg(u, log_u) + lw
    lt = np.where(np.isnan(lt), -np.inf, lt)
    return lt


def laplace_integral_log(
    logg: Callable[[np.ndarray, np.ndarray], np.ndarray],
    tol: float = 1e-12,
    *,
    scale: float = 1.0,
) -> tuple[float, float, int, bool]:
    """Logarithm of ``int_0^inf g(u) du`` for positive ``g`` given in log form.

    ``logg(u, log_u)`` returns ``log g(u)``; passing ``log u`` separately keeps
    the integrand accurate when ``u`` underflows.  Returns
    ``(log_value, rel_err, nodes_used, converged)``.
    """
    h = 0.5
    x = np.arange(-math.floor(_DE_XMAX / h), math.floor(_DE_XMAX / h) + 1) * h
    lt = _de_terms_log(logg, x, scale)
    nodes = x.size
    shift = float(np.max(lt))
    if not np.isfinite(shift):
        return -math.inf, 0.0, nodes, shift == -math.inf
    acc = float(np.sum(np.exp(lt - shift)))
    prev_log = shift + math.log(h * acc)
    rel = math.inf
    for _level in range(1, _DE_LEVELS):
        h *= 0.5
        xo = _de_new_nodes(h)
        lo_ = _de_terms_log(logg, xo, scale)
        nodes += xo.size
        new_max = float(np.max(lo_))
        if new_max > shift:
            acc *= math.exp(shift - new_max)
            shift = new_max
        acc += float(np.sum(np.exp(lo_ - shift)))
        # compare in log space: ``shift`` may have moved since the last level
        cur_log = shift + math.log(h * acc)
        rel = abs(math.expm1(cur_log - prev_log))
        prev_log = cur_log
        if rel <= tol and _level >= 3:
            return cur_log, rel, nodes, True
    return prev_log, rel, nodes, rel <= tol


def laplace_integral(g: Callable, tol: float = 1e-10, *, rtol: float = 0.0, scale: float = 1.0) -> QuadResult:
    """``int_0^inf g(u) du`` by the exp-sinh double-exponential rule.

    ``g`` may have an integrable singularity at 0 and must decay at infinity.
    It is evaluated on numpy arrays; non-finite values are treated as zero,
    which covers overflow of factors multiplied by an underflowed exponential.
    """
    h = 0.5

    def terms(x: np.ndarray) -> np.ndarray:
        s = 0.5 * math.pi * np.sinh(x)
        u = scale * np.exp(s)
        with np.errstate(all="ignore"):
            t = np.asarray(g(u), dtype=float) * u * (0.5 * math.pi) * np.cosh(x)
        return np.where(np.isfinite(t), t, 0.0)

    n = math.floor(_DE_XMAX / h)
    x = np.arange(-n, n + 1) * h
    acc = float(np.sum(terms(x)))
    nodes = x.size
    prev = h * acc
    err = math.inf
    for level in range(1, _DE_LEVELS):
        h *= 0.5
        xo = _de_new_nodes(h)
        acc += float(np.sum(terms(xo)))
        nodes += xo.size
        cur = h * acc
        err = abs(cur - prev)
        prev = cur
        if level >= 3 and err <= max(tol, rtol * abs(cur)):
            return QuadResult(cur, err, nodes, True)
    return QuadResult(prev, err, nodes, err <= max(tol, rtol * abs(prev)))


# Gauss-Legendre rule for the half-period segments of the oscillatory tail.
_GL_X, _GL_W = np.polynomial.legendre.leggauss(24)


def _aitken_limit(partial: np.ndarray) -> tuple[float, float]:
    """Iterated Aitken extrapolation; returns (estimate, change of last step)."""
    s = np.asarray(partial, dtype=float)
    est_prev = s[-1]
    est = s[-1]
    change = abs(s[-1] - s[-2]) if s.size >= 2 else math.inf
    while s.size >= 3:
        d1 = s[1:-1] - s[:-2]
        d2 = s[2:] - s[1:-1]
        den = d2 - d1
        with np.errstate(divide="ignore", invalid="ignore"):
            nxt = np.where(den != 0, s[2:] - d2 * d2 / den, s[2:])
        if not np.all(np.isfinite(nxt)):
            break
        s = nxt
        est_prev, est = est, s[-1]
        change = abs(est - est_prev)
    return float(est), float(change)


def _oscillatory_tail(
    f: Callable, start: float, tau: float, target: float, *, max_segments: int = 4096
) -> QuadResult:
    """``int_start^inf cos(k tau) f(k) dk`` with ``start`` a zero of the cosine."""
    half = math.pi / tau
    batch = 32
    seg_vals: list[np.ndarray] = []
    count = 0
    best = (math.nan, math.inf)
    while count < max_segments:
        j = np.arange(count, count + batch, dtype=float)
        a = start + j * half
        x = a[:, None] + 0.5 * half * (_GL_X[None, :] + 1.0)
        vals = 0.5 * half * ((np.cos(x * tau) * np.asarray(f(x), dtype=float)) @ _GL_W)
        seg_vals.append(vals)
        count += batch
        partial = np.cumsum(np.concatenate(seg_vals))
        window = partial[-min(partial.size, 24):]
        est, change = _aitken_limit(window)
        if change < best[1]:
            best = (est, change)
        if change <= 0.5 * target:
            return QuadResult(est, change, count * _GL_X.size, True)
        batch = count
    return QuadResult(best[0], best[1], count * _GL_X.size, False)


def _semi_infinite_tail(f: Callable, start: float, tol: float, rtol: float) -> QuadResult:
    """``int_start^inf f(k) dk`` for a non-oscillatory decaying ``f``."""
    return laplace_integral(lambda u: f(start + u), tol, rtol=rtol, scale=max(start, 1e-300))


def cosine_transform(
    f: Callable,
    tau: float,
    tol: float = 1e-10,
    *,
    rtol: float = 0.0,
    scale: float = 1.0,
    points: Sequence[float] = (),
) -> QuadResult:
    """``int_0^inf cos(k tau) f(k) dk`` for a positive, eventually decreasing ``f``.

    ``scale`` is the characteristic wavenumber of ``f`` (the tempering rate for
    the spectral densities used here).  The split point is
    ``k0 = max(10 scale, 10 / tau)`` moved up to the next zero of the cosine.
    """
    tau = abs(float(tau))
    if tau == 0.0:
        k0 = 10.0 * scale
        head = integrate(f, 0.0, k0, tol / 2, rtol=rtol / 2, points=points)
        tail = _semi_infinite_tail(f, k0, tol / 2, rtol / 2)
        return head + tail
    k0 = max(10.0 * scale, 10.0 / tau)
    m = math.floor(k0 * tau / math.pi - 0.5) + 1
    kz = (m + 0.5) * math.pi / tau
    head = integrate(lambda k: np.cos(k * tau) * f(k), 0.0, kz, tol / 2, rtol=rtol / 2,
                     points=[p for p in points if p < kz])
    target = max(tol / 2, rtol / 2 * abs(head.value))
    tail = _oscillatory_tail(f, kz, tau, target)
    total = head + tail
    want = max(tol, rtol * abs(total.value))
    return QuadResult(total.value, total.abs_err, total.nodes_used, total.abs_err <= want)


def sine_squared_transform(
    f: Callable,
    tau: float,
    tol: float = 1e-10,
    *,
    rtol: float = 0.0,
    scale: float = 1.0,
) -> QuadResult:
    """``int_0^inf 2 sin^2(k tau / 2) f(k) dk`` without the ``C(0) - C(tau)`` cancellation."""
    tau = abs(float(tau))
    if tau == 0.0:
        return QuadResult(0.0, 0.0, 0, True)
    k0 = max(10.0 * scale, 10.0 / tau)
    m = math.floor(k0 * tau / math.pi - 0.5) + 1
    kz = (m + 0.5) * math.pi / tau
    head = integrate(lambda k: 2.0 * np.sin(0.5 * k * tau) ** 2 * f(k), 0.0, kz, tol / 3, rtol=rtol / 3,
                     points=[scale] if scale < kz else ())
    target = max(tol / 3, rtol / 3 * abs(head.value))
    plain = _semi_infinite_tail(f, kz, target, 0.0)
    osc = _oscillatory_tail(f, kz, tau, target)
    value = head.value + plain.value - osc.value
    err = head.abs_err + plain.abs_err + osc.abs_err
    want = max(tol, rtol * abs(value))
    return QuadResult(value, err, head.nodes_used + plain.nodes_used + osc.nodes_used, err <= want)


def rotated_cosine_transform(
    f_complex: Callable[[np.ndarray], np.ndarray],
    tau: float,
    branch_heights: Sequence[float],
    tol: float = 1e-10,
    *,
    rtol: float = 0.0,
) -> QuadResult:
    """``int_0^inf cos(k tau) f(k) dk`` by rotating the path onto the imaginary axis.

    ``f_complex`` must be the analytic continuation of the (real, even in k)
    spectral density into the closed first quadrant, decaying at infinity,
    whose only singularities on the imaginary axis are branch points at
    ``i * h`` for ``h`` in ``branch_heights``.  On the imaginary axis it is
    evaluated at ``0.0 + i u`` so that signed zeros select the branch seen
    from the right half plane.  The path runs up the imaginary axis and
    passes each branch point on a small semicircle to its right.

    The real part of ``i * int e^{-u tau} f(iu) du`` is
    ``-int e^{-u tau} Im f(iu) du``, so only ``Im f`` on the axis matters.
    """
    tau = abs(float(tau))
    if tau <= 0.0:
        raise ValueError("rotated route requires tau > 0")
    heights = sorted(float(h) for h in branch_heights)
    rho = min(0.5 * heights[0], 1.0 / tau)
    # merge overlapping detours into single semicircles
    detours: list[list[float]] = []
    for h in heights:
        if detours and h - rho <= detours[-1][1]:
            detours[-1][1] = h + rho
        else:
            detours.append([h - rho, h + rho])

    def axis_integrand(u: np.ndarray) -> np.ndarray:
        k = np.zeros(u.shape) + 1j * u
        k = np.asarray(k, dtype=complex)
        val = f_complex(k)
        return -np.exp(-u * tau) * np.imag(val)

    def circle_integrand(center: float, radius: float) -> Callable:
        def g(phi: np.ndarray) -> np.ndarray:
            e = np.exp(1j * phi)
            k = 1j * center + radius * e
            dk = 1j * radius * e
            return np.real(np.exp(1j * k * tau) * f_complex(k) * dk)

        return g

    # Budget the tolerance across the pieces.
    n_pieces = 2 * len(detours) + 1
    ptol, prtol = tol / n_pieces, rtol / n_pieces
    total = QuadResult(0.0, 0.0, 0, True)
    u_prev = 0.0
    for lo, hi in detours:
        if lo > u_prev:
            total = total + integrate(axis_integrand, u_prev, lo, ptol, rtol=prtol)
        center, radius = 0.5 * (lo + hi), 0.5 * (hi - lo)
        total = total + integrate(circle_integrand(center, radius), -0.5 * math.pi, 0.5 * math.pi, ptol,
                                  rtol=prtol)
        u_prev = hi
    last = laplace_integral(lambda v: axis_integrand(u_prev + v), ptol, rtol=prtol, scale=1.0 / tau)
    total = total + last
    want = max(tol, rtol * abs(total.value))
    return QuadResult(total.value, total.abs_err, total.nodes_used, total.abs_err <= want)


def loglog_power_fit(xs: Sequence[float], ys: Sequence[float]) -> tuple[float, float, float]:
    """Least-squares line through ``(log x, log y)``.

    Returns ``(exponent, prefactor, r2)`` where ``y ~ prefactor * x**exponent``.
    A perfectly flat ``y`` yields ``r2 = 1``.
    """
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("xs and ys must be one-dimensional and of equal length")
    if x.size < 4:
        raise ValueError("need at least 4 points for a power-law fit")
    if np.any(x <= 0) or np.any(y <= 0):
        raise ValueError("power-law fit needs strictly positive data")
    lx, ly = np.log(x), np.log(y)
    if np.ptp(lx) == 0.0:
        raise ValueError("xs are constant; slope undefined")
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + intercept)
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    ss_res = float(np.sum(resid**2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return float(slope), float(math.exp(intercept)), float(r2)
