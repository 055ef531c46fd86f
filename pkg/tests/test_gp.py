from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tfbm.errors import KernelEvaluationError, NotPSDError
from tfbm.gp import (
    BIN_MAGIC,
    Ensemble,
    TimeGrid,
    build_cov_matrix,
    cholesky_psd,
    sample_paths,
    standard_normals,
)
from tfbm.kernels.curves import ParamCurve
from tfbm.kernels.fou import fou_cov, tfbm_cov
from tfbm.kernels.spec import Family, KernelSpec


# --------------------------------------------------------------------- grids
def test_uniform_grid():
    g = TimeGrid.uniform_grid(0.0, 1.0, 5)
    assert g.uniform and g.dt == pytest.approx(0.25) and g.n == 5
    with pytest.raises(ValueError):
        g.points[0] = 3.0


@pytest.mark.parametrize("pts", [[1.0], [0.0, 0.0, 1.0], [2.0, 1.0], [0.0, np.inf]])
def test_invalid_grids(pts):
    with pytest.raises(ValueError):
        TimeGrid.from_points(pts)


def test_with_origin():
    g, inserted = TimeGrid.from_points([0.5, 1.0]).with_origin()
    assert inserted and g.points[0] == 0.0
    g2, inserted2 = TimeGrid.uniform_grid(0.0, 1.0, 3).with_origin()
    assert not inserted2 and g2.n == 3


# --------------------------------------------------------------------- matrices
def test_fou_matrix_is_toeplitz_and_exact():
    grid = TimeGrid.uniform_grid(0.0, 10.0, 64)
    m = build_cov_matrix(KernelSpec(Family.FOU, alpha=1.25, lam=0.5), grid)
    for k in range(64):
        d = np.diag(m.entries, k)
        assert np.all(d == d[0])
    np.testing.assert_allclose(m.entries[0], fou_cov(1.25, 0.5, grid.points), rtol=1e-14)
    assert m.min_eig_estimate > 0


def test_tfbm_matrix_matches_kernel_and_inserts_origin():
    grid = TimeGrid.from_points([0.5, 1.0, 2.0])
    m = build_cov_matrix(KernelSpec(Family.TFBM), grid)
    assert m.origin_inserted and m.grid.n == 4
    expect = tfbm_cov(1.25, 0.5, m.grid.points[:, None], m.grid.points[None, :])
    np.testing.assert_allclose(m.entries, expect, rtol=1e-12, atol=1e-15)
    assert np.all(m.entries[0] == 0.0)


@pytest.mark.parametrize("spec", [
    KernelSpec(Family.TWO_INDEX_TFBM, alpha=1.5, beta=0.8, lam=0.5),
    KernelSpec(Family.VAR_TEMPER_TFBM, alpha=1.1, lam=ParamCurve.logistic(0.3, 0.8, 5.0, 1.0)),
    KernelSpec(Family.TMBM, alpha=ParamCurve.logistic(0.8, 1.2, 5.0, 1.0), lam=0.5),
], ids=lambda s: s.family.value)
def test_matrix_entries_match_direct_calls(spec):
    grid = TimeGrid.from_points([0.0, 0.7, 2.0, 4.5])
    m = build_cov_matrix(spec, grid)
    for i, t in enumerate(grid.points):
        for j, s in enumerate(grid.points):
            assert m.entries[i, j] == pytest.approx(spec.cov(float(t), float(s)), rel=1e-9, abs=1e-14)
    assert np.array_equal(m.entries, m.entries.T)


def test_kernel_failure_is_annotated(monkeypatch):
    spec = KernelSpec(Family.VAR_TEMPER_FOU, alpha=1.1, lam=ParamCurve.logistic(0.3, 0.8, 5.0, 1.0))

    def boom(self, t, s):
        if t == 2.0 or s == 2.0:
            raise ArithmeticError("synthetic failure")
        return 1.0

    monkeypatch.setattr(KernelSpec, "cov", boom)
    with pytest.raises(KernelEvaluationError) as info:
        build_cov_matrix(spec, TimeGrid.from_points([1.0, 2.0, 3.0]))
    assert 1 in info.value.index


# --------------------------------------------------------------------- Cholesky
def test_cholesky_reconstructs_matrix():
    grid = TimeGrid.uniform_grid(0.0, 10.0, 128)
    m = build_cov_matrix(KernelSpec(Family.FOU, alpha=1.25, lam=0.5), grid)
    f = cholesky_psd(m)
    assert f.jitter_applied == 0.0
    np.testing.assert_allclose(f.lower @ f.lower.T, m.entries, atol=1e-12)


def test_cholesky_pinned_row_left_zero():
    m = build_cov_matrix(KernelSpec(Family.TFBM), TimeGrid.uniform_grid(0.0, 2.0, 9))
    f = cholesky_psd(m)
    assert f.pinned[0] and np.all(f.lower[0] == 0.0)
    np.testing.assert_allclose(f.lower @ f.lower.T, m.entries, atol=1e-13)


def test_cholesky_jitter_on_nearly_singular_matrix():
    # rank-one matrix plus tiny negative noise: repair needs small jitter
    v = np.linspace(1.0, 2.0, 6)
    a = np.outer(v, v)
    f = cholesky_psd(a, max_jitter_ratio=1e-6)
    assert 0.0 < f.jitter_applied <= 1e-6 * 4.0


def test_cholesky_rejects_indefinite():
    a = np.array([[1.0, 2.0], [2.0, 1.0]])
    with pytest.raises(NotPSDError):
        cholesky_psd(a)


def test_cholesky_requires_exact_symmetry():
    with pytest.raises(ValueError):
        cholesky_psd(np.array([[1.0, 0.1], [0.1 + 1e-16, 1.0]]))


# --------------------------------------------------------------------- sampling
def _factor(spec=None, n=16):
    spec = spec or KernelSpec(Family.FOU, alpha=1.25, lam=0.5)
    m = build_cov_matrix(spec, TimeGrid.uniform_grid(0.0, 5.0, n))
    return cholesky_psd(m), m


def test_sampling_is_deterministic_and_prefix_stable():
    f, _ = _factor()
    a = sample_paths(f, 10, 42)
    b = sample_paths(f, 10, 42)
    c = sample_paths(f, 4, 42)
    np.testing.assert_array_equal(a.paths, b.paths)
    np.testing.assert_array_equal(a.paths[:4], c.paths)
    assert not np.array_equal(a.paths, sample_paths(f, 10, 43).paths)
    assert not a.paths.flags.writeable


@given(st.integers(0, 2**64 - 1), st.integers(0, 1000))
@settings(max_examples=30, deadline=None)
def test_standard_normals_reproducible(seed, idx):
    a = standard_normals(seed, idx, 8)
    np.testing.assert_array_equal(a, standard_normals(seed, idx, 8))
    assert np.all(np.isfinite(a))


def test_standard_normals_moments():
    z = np.concatenate([standard_normals(11, p, 1000) for p in range(100)])
    assert abs(z.mean()) < 0.01
    assert abs(z.std() - 1.0) < 0.01


def test_sample_covariance_converges():
    f, m = _factor(n=8)
    e = sample_paths(f, 20000, 3)
    emp = np.cov(e.paths, rowvar=False)
    assert np.max(np.abs(emp - m.entries)) < 0.06 * np.max(np.diag(m.entries))


def test_reduced_paths_start_at_zero():
    f, _ = _factor(KernelSpec(Family.TFBM))
    e = sample_paths(f, 5, 1)
    assert np.all(e.paths[:, 0] == 0.0)


# --------------------------------------------------------------------- serialization
def test_binary_round_trip(tmp_path):
    f, m = _factor()
    e = sample_paths(f, 7, 2**63 + 5, spec=m.spec, grid=m.grid)
    data = e.to_bytes()
    assert data[:8] == BIN_MAGIC
    back = Ensemble.from_bytes(data)
    assert back.seed == 2**63 + 5 and back.n_paths == 7
    np.testing.assert_array_equal(back.paths, e.paths)
    np.testing.assert_array_equal(back.grid.points, e.grid.points)
    e.save(tmp_path / "e.bin", "bin")
    assert (tmp_path / "e.bin").read_bytes() == data


def test_binary_rejects_bad_magic():
    f, _ = _factor()
    data = bytearray(sample_paths(f, 1, 0).to_bytes())
    data[0:1] = b"X"
    with pytest.raises(ValueError):
        Ensemble.from_bytes(bytes(data))


def test_csv_round_trip_is_exact():
    f, _ = _factor()
    e = sample_paths(f, 3, 9)
    rows = [line.split(",") for line in e.to_csv().strip().split("\n")]
    np.testing.assert_array_equal(np.array(rows[0], dtype=float), e.grid.points)
    np.testing.assert_array_equal(np.array(rows[1:], dtype=float), e.paths)
