"""Covariance matrices on time grids, PSD-repaired Cholesky factors, and seeded Gaussian paths.

Sampling draws each path from its own counter-based Philox stream keyed by
``(seed, path_index)``, so a path does not depend on how many other paths
are drawn or in what order.  Standard normals come from 53-bit uniforms
pushed through the inverse normal CDF.

Binary ensemble layout (all little-endian)::

    magic    8 bytes  b"TFBMENS\\0"
    version  uint32   1
    seed     uint64
    n_paths  uint64
    n_points uint64
    times    n_points float64
    paths    n_paths * n_points float64, row-major (one path per row)
"""

from __future__ import annotations

import csv
import io
import math
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.linalg import eigh
from scipy.special import ndtri

from tfbm.errors import KernelEvaluationError, NotPSDError, QuadratureError, TfbmError
from tfbm.kernels.fou import fou_cov, tfbm_cov
from tfbm.kernels.spec import Family, KernelSpec, unique_lag_values

__all__ = [
    "TimeGrid",
    "CovMatrix",
    "CholeskyFactor",
    "Ensemble",
    "build_cov_matrix",
    "cholesky_psd",
    "sample_paths",
    "BIN_MAGIC",
    "BIN_VERSION",
]

BIN_MAGIC = b"TFBMENS\0"
BIN_VERSION = 1
_HEADER = struct.Struct("<8sIQQQ")
_SEED_MASK = (1 << 64) - 1


@dataclass(frozen=True)
class TimeGrid:
    """Strictly increasing time points (at least two)."""

    points: np.ndarray
    uniform: bool = False
    dt: float | None = None

    def __post_init__(self) -> None:
        pts = np.array(self.points, dtype=float).ravel()
        if pts.size < 2:
            raise ValueError("a time grid needs at least two points")
        if not np.all(np.isfinite(pts)):
            raise ValueError("grid points must be finite")
        if np.any(np.diff(pts) <= 0):
            raise ValueError("grid points must be strictly increasing")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @classmethod
    def uniform_grid(cls, start: float, stop: float, n: int) -> "TimeGrid":
        pts = np.linspace(float(start), float(stop), int(n))
        return cls(pts, True, float(pts[1] - pts[0]) if n >= 2 else None)

    @classmethod
    def from_points(cls, points) -> "TimeGrid":
        pts = np.asarray(points, dtype=float)
        d = np.diff(pts)
        uniform = d.size > 0 and bool(np.allclose(d, d[0], rtol=1e-12, atol=0.0))
        return cls(pts, uniform, float(d[0]) if uniform else None)

    @property
    def n(self) -> int:
        return int(self.points.size)

    def with_origin(self) -> tuple["TimeGrid", bool]:
        """The grid with ``t = 0`` inserted if absent, and whether it was inserted."""
        if np.any(self.points == 0.0):
            return self, False
        pts = np.sort(np.append(self.points, 0.0))
        return TimeGrid.from_points(pts), True


@dataclass(frozen=True)
class CovMatrix:
    """Covariance matrix on ``grid``; ``origin_inserted`` flags an added ``t = 0``."""

    entries: np.ndarray
    grid: TimeGrid
    spec: KernelSpec | None = None
    jitter_applied: float = 0.0
    min_eig_estimate: float = math.nan
    origin_inserted: bool = False

    @property
    def n(self) -> int:
        return int(self.entries.shape[0])


@dataclass(frozen=True)
class CholeskyFactor:
    """Lower factor with ``L L^T = M + jitter I`` on the non-pinned coordinates.

    Rows and columns of pinned coordinates (identically zero variance) are zero.
    """

    lower: np.ndarray
    jitter_applied: float
    pinned: np.ndarray
    grid: TimeGrid | None = None
    spec: KernelSpec | None = None


@dataclass(frozen=True)
class Ensemble:
    spec: KernelSpec | None
    grid: TimeGrid
    n_paths: int
    seed: int
    paths: np.ndarray = field(repr=False)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow([repr(float(t)) for t in self.grid.points])
        for row in self.paths:
            writer.writerow([repr(float(x)) for x in row])
        return buf.getvalue()

    def to_bytes(self) -> bytes:
        head = _HEADER.pack(BIN_MAGIC, BIN_VERSION, self.seed & _SEED_MASK, self.n_paths, self.grid.n)
        body = np.ascontiguousarray(self.grid.points, dtype="<f8").tobytes()
        body += np.ascontiguousarray(self.paths, dtype="<f8").tobytes()
        return head + body

    def save(self, path: str | Path, fmt: str = "csv") -> None:
        path = Path(path)
        if fmt == "csv":
            path.write_text(self.to_csv())
        elif fmt == "bin":
            path.write_bytes(self.to_bytes())
        else:
            raise ValueError(f"unknown ensemble format {fmt!r}")

    @staticmethod
    def from_bytes(data: bytes, spec: KernelSpec | None = None) -> "Ensemble":
        magic, version, seed, n_paths, n = _HEADER.unpack_from(data, 0)
        if magic != BIN_MAGIC:
            raise ValueError("not an ensemble file (bad magic)")
        if version != BIN_VERSION:
            raise ValueError(f"unsupported ensemble version {version}")
        off = _HEADER.size
        times = np.frombuffer(data, dtype="<f8", count=n, offset=off)
        paths = np.frombuffer(data, dtype="<f8", count=n_paths * n, offset=off + 8 * n).reshape(n_paths, n)
        return Ensemble(spec, TimeGrid.from_points(times.astype(float)), int(n_paths), int(seed), paths.astype(float))


# ---------------------------------------------------------------------------
# matrix build
# ---------------------------------------------------------------------------

def _min_eig(m: np.ndarray) -> float:
    return float(eigh(m, eigvals_only=True, subset_by_index=[0, 0])[0])


def _annotate(exc: Exception, i: int, j: int, t: float, s: float) -> KernelEvaluationError:
    return KernelEvaluationError(f"kernel evaluation failed at (i, j) = ({i}, {j}), (t, s) = ({t}, {s}): {exc}",
                                 index=(i, j))


def _entries(spec: KernelSpec, pts: np.ndarray) -> np.ndarray:
    n = pts.size
    ti, tj = np.meshgrid(pts, pts, indexing="ij")
    if spec.family is Family.FOU:
        lags = np.abs(ti - tj)
        return unique_lag_values(lambda x: float(fou_cov(spec.alpha, spec.lam, x)), lags)
    if spec.family is Family.TFBM:
        return np.asarray(tfbm_cov(spec.alpha, spec.lam, ti, tj), dtype=float)
    if spec.is_stationary:
        def base(x: float) -> float:
            try:
                return spec.stationary_cov(x)
            except QuadratureError as exc:
                raise QuadratureError(f"{exc} (lag {x})", tau=x, estimate=exc.estimate, abs_err=exc.abs_err) from exc
        return unique_lag_values(base, np.abs(ti - tj))
    if spec.has_stationary_increments:
        # C(t,s) = 1/2 [v(t) + v(s) - v(t - s)] with v the increment variance
        def incr(x: float) -> float:
            try:
                return spec.increment_variance(x)
            except QuadratureError as exc:
                raise QuadratureError(f"{exc} (lag {x})", tau=x, estimate=exc.estimate, abs_err=exc.abs_err) from exc
        v_pts = unique_lag_values(lambda x: 0.0 if x == 0.0 else incr(x), np.abs(pts))
        v_lag = unique_lag_values(lambda x: 0.0 if x == 0.0 else incr(x), np.abs(ti - tj))
        out = 0.5 * (v_pts[:, None] + v_pts[None, :] - v_lag)
        pinned = pts == 0.0
        out[pinned, :] = 0.0
        out[:, pinned] = 0.0
        return out
    out = np.empty((n, n))
    for i in range(n):
        for j in range(i, n):
            try:
                out[i, j] = spec.cov(float(pts[i]), float(pts[j]))
            except QuadratureError as exc:
                raise QuadratureError(f"{exc} at (i, j) = ({i}, {j})", tau=float(pts[i] - pts[j]),
                                      estimate=exc.estimate, abs_err=exc.abs_err) from exc
            except (TfbmError, ValueError, ArithmeticError) as exc:
                raise _annotate(exc, i, j, float(pts[i]), float(pts[j])) from exc
            out[j, i] = out[i, j]
    return out


def build_cov_matrix(spec: KernelSpec, grid: TimeGrid, *, estimate_min_eig: bool = True) -> CovMatrix:
    """Covariance matrix ``k(t_i, t_j)`` of ``spec`` on ``grid``.

    For reduced families the origin is inserted into the grid if missing and
    ``origin_inserted`` is set.  Stationary kernels (and increment variances
    of stationary-increment kernels) are evaluated once per distinct lag.
    """
    inserted = False
    if spec.reduced:
        grid, inserted = grid.with_origin()
    m = _entries(spec, grid.points)
    m = 0.5 * (m + m.T)  # exact symmetry, whatever path produced the entries
    bad = np.argwhere(~np.isfinite(m))
    if bad.size:
        i, j = (int(x) for x in bad[0])
        raise KernelEvaluationError(f"non-finite covariance at (i, j) = ({i}, {j})", index=(i, j))
    min_eig = _min_eig(m) if estimate_min_eig else math.nan
    return CovMatrix(m, grid, spec, 0.0, min_eig, inserted)


# ---------------------------------------------------------------------------
# factorization and sampling
# ---------------------------------------------------------------------------

def cholesky_psd(m: CovMatrix | np.ndarray, max_jitter_ratio: float = 1e-8) -> CholeskyFactor:
    """Cholesky factor with geometric diagonal jitter from ``1e-14 maxdiag`` up to ``max_jitter_ratio maxdiag``.

    Coordinates whose row and column vanish (a pinned origin) are left out of
    the factorization and get zero rows.  Raises :class:`NotPSDError` when the
    largest permitted jitter is not enough.
    """
    if isinstance(m, CovMatrix):
        a, grid, spec = m.entries, m.grid, m.spec
    else:
        a, grid, spec = np.asarray(m, dtype=float), None, None
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("covariance matrix must be square")
    if not np.array_equal(a, a.T):
        raise ValueError("covariance matrix must be exactly symmetric")
    n = a.shape[0]
    pinned = np.all(a == 0.0, axis=1)
    active = np.nonzero(~pinned)[0]
    sub = a[np.ix_(active, active)]
    lower = np.zeros((n, n))
    if active.size == 0:
        return CholeskyFactor(lower, 0.0, pinned, grid, spec)
    maxdiag = float(np.max(np.abs(np.diag(sub))))
    jitter = 0.0
    step = 1e-14 * maxdiag
    eye = np.eye(active.size)
    while True:
        try:
            l_sub = np.linalg.cholesky(sub + jitter * eye if jitter else sub)
            break
        except np.linalg.LinAlgError:
            jitter = step
            step *= 10.0
            if jitter > max_jitter_ratio * maxdiag * (1 + 1e-12) or maxdiag == 0.0:
                raise NotPSDError(
                    f"matrix is not positive semidefinite: jitter up to {max_jitter_ratio:g} x maxdiag "
                    f"({max_jitter_ratio * maxdiag:.3g}) did not suffice"
                ) from None
    lower[np.ix_(active, active)] = l_sub
    return CholeskyFactor(lower, jitter, pinned, grid, spec)


def standard_normals(seed: int, path_index: int, size: int) -> np.ndarray:
    """``size`` standard normals from the Philox stream keyed by ``(seed, path_index)``."""
    key = np.array([seed & _SEED_MASK, path_index & _SEED_MASK], dtype=np.uint64)
    gen = np.random.Generator(np.random.Philox(key=key))
    bits = gen.integers(0, 1 << 53, size=size, dtype=np.int64, endpoint=False)
    u = (bits.astype(float) + 0.5) * 2.0**-53
    return ndtri(u)


def sample_paths(factor: CholeskyFactor, n_paths: int, seed: int, *, spec: KernelSpec | None = None,
                 grid: TimeGrid | None = None) -> Ensemble:
    """``n_paths`` Gaussian paths ``L z`` with ``z`` drawn per path from :func:`standard_normals`."""
    if n_paths < 0:
        raise ValueError("n_paths must be non-negative")
    spec = spec if spec is not None else factor.spec
    grid = grid if grid is not None else factor.grid
    n = factor.lower.shape[0]
    if grid is None:
        grid = TimeGrid.from_points(np.arange(n, dtype=float))
    active = np.nonzero(~factor.pinned)[0]
    z = np.empty((n_paths, active.size))
    for p in range(n_paths):
        z[p] = standard_normals(seed, p, active.size)
    l_active = factor.lower[:, active]
    paths = z @ l_active.T
    paths[:, factor.pinned] = 0.0
    paths.setflags(write=False)
    return Ensemble(spec, grid, n_paths, int(seed), paths)
