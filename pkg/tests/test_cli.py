from __future__ import annotations

import csv
import io
import json
import math

import numpy as np
import pytest

from tfbm import validation
from tfbm.cli import main
from tfbm.gp import Ensemble
from tfbm.kernels.fou import fou_cov


def _write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def _rows(text):
    return list(csv.reader(io.StringIO(text)))


def test_kernel_two_index_beta_one_matches_fou(tmp_path, capsys):
    cfg = _write(tmp_path, "k.cfg", "spec.family = TwoIndexFOU\nspec.alpha = 1.25\nspec.beta = 1.0\n"
                                    "spec.lambda = 0.5\ngrid.start = 0\ngrid.stop = 20\ngrid.n = 41\n")
    assert main(["kernel", "--config", cfg]) == 0
    rows = _rows(capsys.readouterr().out)
    assert rows[0] == ["tau", "C"]
    for tau, c in rows[1:]:
        assert float(c) == pytest.approx(fou_cov(1.25, 0.5, float(tau)), rel=1e-8)


def test_kernel_fixed_second_argument_json(tmp_path):
    cfg = _write(tmp_path, "k.cfg", "spec.family = TFBM\ngrid.points = 0.5, 1, 2\ngrid.s = 1.5\n")
    out = tmp_path / "t.json"
    assert main(["kernel", "--config", cfg, "--format", "json", "--out", str(out)]) == 0
    d = json.loads(out.read_text())
    assert d["columns"] == ["t", "s", "C"] and len(d["rows"]) == 3


def test_kernel_nonstationary_upper_triangle(tmp_path, capsys):
    cfg = _write(tmp_path, "k.cfg", "spec.family = TMBM\nspec.alpha.kind = logistic\n"
                                    "spec.alpha.params = 0.8, 1.2, 5, 1\ngrid.points = 1, 2, 3\n")
    assert main(["kernel", "--config", cfg]) == 0
    assert len(_rows(capsys.readouterr().out)) == 1 + 6


def test_sample_seed_repeat_is_identical(tmp_path, capsys):
    cfg = _write(tmp_path, "s.cfg", "spec.family = TFBM\ngrid.start = 0\ngrid.stop = 2\ngrid.n = 17\n")
    a, b, c = tmp_path / "a.csv", tmp_path / "b.csv", tmp_path / "c.csv"
    assert main(["sample", "--config", cfg, "--seed", "11", "--paths", "20", "--out", str(a)]) == 0
    assert "jitter_applied=" in capsys.readouterr().err
    assert main(["sample", "--config", cfg, "--seed", "11", "--paths", "20", "--out", str(b)]) == 0
    assert main(["sample", "--config", cfg, "--seed", "12", "--paths", "20", "--out", str(c)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert a.read_bytes() != c.read_bytes()


def test_sample_binary_round_trip(tmp_path):
    cfg = _write(tmp_path, "s.cfg", "spec.family = FOU\ngrid.n = 8\nn_paths = 5\nseed = 3\n")
    out = tmp_path / "p.bin"
    assert main(["sample", "--config", cfg, "--format", "bin", "--out", str(out)]) == 0
    e = Ensemble.from_bytes(out.read_bytes())
    assert (e.n_paths, e.grid.n, e.seed) == (5, 8, 3)
    assert np.all(np.isfinite(e.paths))


def test_sample_reduced_inserts_origin_with_warning(tmp_path, capsys):
    cfg = _write(tmp_path, "s.cfg", "spec.family = TFBM\ngrid.points = 0.5, 1.0\nn_paths = 2\n")
    assert main(["sample", "--config", cfg, "--format", "json"]) == 0
    cap = capsys.readouterr()
    assert "t=0 inserted" in cap.err
    d = json.loads(cap.out)
    assert d["times"][0] == 0.0 and all(p[0] == 0.0 for p in d["paths"])


@pytest.mark.parametrize("argv, text", [
    (["sample", "--format", "bin"], "spec.family = FOU\n"),                   # bin needs --out
    (["kernel"], "spec.family = Nope\n"),                                     # unknown family
    (["kernel"], "spec.family = FOU\nspec.alpha = 0.4\n"),                    # domain error
    (["kernel"], "spec.family = FOU\ngrid.n = many\n"),                       # bad number
    (["kernel", "--tol", "-1"], "spec.family = TwoIndexFOU\nspec.beta = 0.8\n"),
    (["sample"], "spec.family = FOU\ngrid.n = 5000\n"),                       # too many points
    (["validate", "--suite", "bogus"], ""),
    (["validate"], ""),
])
def test_usage_errors_exit_2(tmp_path, argv, text):
    cfg = _write(tmp_path, "x.cfg", text)
    assert main(argv + ["--config", cfg]) == 2


def test_unknown_command_and_missing_config():
    assert main(["frobnicate"]) == 2
    assert main(["kernel", "--config", "/nonexistent/x.cfg"]) == 2


def test_not_psd_exits_4(tmp_path, monkeypatch):
    from tfbm import cli
    from tfbm.errors import NotPSDError

    def refuse(m, *a, **k):
        raise NotPSDError("synthetic")

    monkeypatch.setattr(cli, "cholesky_psd", refuse)
    cfg = _write(tmp_path, "s.cfg", "spec.family = FOU\ngrid.n = 4\n")
    assert main(["sample", "--config", cfg]) == 4


def test_quadrature_failure_exits_3(tmp_path, monkeypatch):
    from tfbm.errors import QuadratureError
    from tfbm.kernels.spec import KernelSpec

    def fail(self, t, s):
        raise QuadratureError("synthetic", tau=abs(t - s), estimate=math.nan, abs_err=math.inf)

    monkeypatch.setattr(KernelSpec, "cov", fail)
    cfg = _write(tmp_path, "k.cfg", "spec.family = TwoIndexFOU\nspec.beta = 0.8\nspec.alpha = 1.5\ngrid.n = 4\n")
    assert main(["kernel", "--config", cfg]) == 3


def test_validate_identities_passes(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert main(["validate", "--suite", "identities", "--format", "json", "--out", str(out)]) == 0
    lines = capsys.readouterr().out.strip().split("\n")
    assert len(lines) == 5 and all(" PASS " in ln for ln in lines)
    d = json.loads(out.read_text())
    assert d["passed"] and [c["criterion"] for c in d["criteria"]] == [1, 2, 3, 4, 14]


def test_validate_negative_control(monkeypatch, capsys):
    # a perturbed reference kernel must make the suite fail
    monkeypatch.setattr(validation, "fou_cov", lambda a, lam, tau: fou_cov(a, lam, tau) * (1 + 1e-6))
    assert main(["validate", "--suite", "identities"]) == 1
    assert "criterion  1 FAIL" in capsys.readouterr().out


def test_fig1_is_byte_identical(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["fig1", "--out", str(a)]) == 0
    assert main(["fig1", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    rows = _rows(a.read_text())
    assert rows[0] == ["t", "C_FOU(t-s)", "C_RFOU(t,s)"] and len(rows) == 202


def test_asymptotics_default(capsys):
    assert main(["asymptotics"]) == 0
    rows = _rows(capsys.readouterr().out)
    regimes = {r[0] for r in rows[1:]}
    assert regimes == {"small_time", "long_time"}
    long_ratio = [float(r[4]) for r in rows[1:] if r[0] == "long_time"]
    assert abs(long_ratio[-1] - 1.0) < abs(long_ratio[0] - 1.0)


def test_asymptotics_rejects_other_families(tmp_path):
    cfg = _write(tmp_path, "a.cfg", "spec.family = FOU\n")
    assert main(["asymptotics", "--config", cfg]) == 2
