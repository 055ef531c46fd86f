"""Command-line front end.

Commands::

    tfbm kernel      --config spec.cfg --out table.csv
    tfbm sample      --config spec.cfg --out paths.bin --format bin --seed 7
    tfbm validate    --suite identities --out report.json --format json
    tfbm fig1        --out fig1.csv
    tfbm asymptotics --config two_index.cfg --out tail.csv

Configuration files hold ``key = value`` lines with dotted keys; command-line
flags override file values.  Recognized keys besides ``spec.*``:

    grid.start, grid.stop, grid.n   uniform grid (defaults 0, 10, 64)
    grid.points                     explicit comma-separated grid instead
    grid.s                          kernel: fix the second argument (rows t, s, C)
    n_paths                         sample: number of paths (default 1000)
    seed, tol, suite, out, format

``--tol`` sets the relative tolerance of quadrature-backed kernels.

Exit codes: 0 ok, 1 validation failure, 2 usage or spec error,
3 quadrature failure, 4 factorization failure.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from dataclasses import replace
from pathlib import Path

import numpy as np

from tfbm.errors import (
    DegenerateCaseError,
    DomainError,
    KernelEvaluationError,
    NotPSDError,
    QuadratureError,
    UnsupportedParameterError,
)
from tfbm.gp import TimeGrid, build_cov_matrix, cholesky_psd, sample_paths
from tfbm.kernels.spec import Family, KernelSpec, parse_config_text
from tfbm.kernels.two_index import (
    two_index_increment_variance,
    two_index_leading_term,
    two_index_offdiag_cov,
    two_index_small_time_coeff,
)
from tfbm.tables import format_table
from tfbm.validation import FIG1_HEADER, SUITES, fig1_table, run_suite

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_USAGE = 2
EXIT_QUADRATURE = 3
EXIT_FACTORIZATION = 4

COMMANDS = ("kernel", "sample", "validate", "fig1", "asymptotics")


class UsageError(Exception):
    """Bad flags or configuration values (exit code 2)."""


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tfbm", description="Tempered fractional Brownian motion toolkit")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", metavar="PATH", help="key = value configuration file")
    p.add_argument("--out", metavar="PATH", help="output file (default: standard output)")
    p.add_argument("--format", choices=("csv", "json", "bin"), help="output format")
    p.add_argument("--seed", type=int, help="sampling seed (64-bit)")
    p.add_argument("--suite", help=f"validation suite: {', '.join(SUITES)}")
    p.add_argument("--tol", type=float, help="relative quadrature tolerance")
    p.add_argument("--paths", type=int, help="number of sample paths")
    return p


def load_config(args: argparse.Namespace) -> dict[str, str]:
    cfg: dict[str, str] = {}
    if args.config:
        try:
            text = Path(args.config).read_text()
        except OSError as exc:
            raise UsageError(f"cannot read config {args.config}: {exc.strerror}") from None
        cfg.update(parse_config_text(text))
    for key in ("out", "format", "seed", "suite", "tol"):
        value = getattr(args, key)
        if value is not None:
            cfg[key] = str(value)
    if args.paths is not None:
        cfg["n_paths"] = str(args.paths)
    return cfg


def _number(cfg: dict[str, str], key: str, default, kind=float):
    raw = cfg.get(key)
    if raw is None:
        return default
    try:
        return kind(raw)
    except ValueError:
        raise UsageError(f"{key}: expected {kind.__name__}, got {raw!r}") from None


def spec_from_config(cfg: dict[str, str]) -> KernelSpec:
    spec = KernelSpec.from_config(cfg)
    tol = _number(cfg, "tol", None)
    if tol is not None:
        if not tol > 0:
            raise UsageError("tol must be positive")
        spec = replace(spec, rtol=tol)
    return spec


def grid_from_config(cfg: dict[str, str]) -> TimeGrid:
    try:
        if "grid.points" in cfg:
            pts = [float(x) for x in cfg["grid.points"].split(",") if x.strip()]
            return TimeGrid.from_points(pts)
        start = _number(cfg, "grid.start", 0.0)
        stop = _number(cfg, "grid.stop", 10.0)
        n = _number(cfg, "grid.n", 64, int)
        return TimeGrid.uniform_grid(start, stop, n)
    except ValueError as exc:
        raise UsageError(f"invalid grid: {exc}") from None


def _emit_text(cfg: dict[str, str], text: str) -> None:
    out = cfg.get("out")
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _table_format(cfg: dict[str, str]) -> str:
    fmt = cfg.get("format", "csv")
    if fmt not in ("csv", "json"):
        raise UsageError(f"tables are written as csv or json, not {fmt!r}")
    return fmt


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_kernel(cfg: dict[str, str]) -> int:
    spec = spec_from_config(cfg)
    grid = grid_from_config(cfg)
    fmt = _table_format(cfg)
    pts = grid.points
    if "grid.s" in cfg:
        s = _number(cfg, "grid.s", 0.0)
        rows = [(float(t), s, spec.cov(float(t), s)) for t in pts]
        text = format_table(("t", "s", "C"), rows, fmt)
    elif spec.is_stationary:
        rows = [(float(tau), spec.cov(float(tau), 0.0)) for tau in pts]
        text = format_table(("tau", "C"), rows, fmt)
    else:
        rows = [(float(pts[i]), float(pts[j]), spec.cov(float(pts[i]), float(pts[j])))
                for i in range(pts.size) for j in range(i, pts.size)]
        text = format_table(("t", "s", "C"), rows, fmt)
    _emit_text(cfg, text)
    return EXIT_OK


def cmd_sample(cfg: dict[str, str]) -> int:
    spec = spec_from_config(cfg)
    grid = grid_from_config(cfg)
    if grid.n > 4096:
        raise UsageError(f"sampling supports at most 4096 grid points, got {grid.n}")
    n_paths = _number(cfg, "n_paths", 1000, int)
    if n_paths < 0:
        raise UsageError("n_paths must be non-negative")
    seed = _number(cfg, "seed", 0, int)
    fmt = cfg.get("format", "csv")
    m = build_cov_matrix(spec, grid, estimate_min_eig=False)
    if m.origin_inserted:
        print("warning: t=0 inserted into the grid for a reduced process", file=sys.stderr)
    factor = cholesky_psd(m)
    ens = sample_paths(factor, n_paths, seed, spec=spec, grid=m.grid)
    print(f"jitter_applied={factor.jitter_applied!r}", file=sys.stderr)
    out = cfg.get("out")
    if fmt == "bin":
        if not out:
            raise UsageError("binary output needs --out")
        Path(out).write_bytes(ens.to_bytes())
    elif fmt == "csv":
        _emit_text(cfg, ens.to_csv())
    elif fmt == "json":
        payload = {"seed": ens.seed, "times": ens.grid.points.tolist(), "paths": ens.paths.tolist(),
                   "jitter_applied": factor.jitter_applied, "spec": spec.to_config()}
        _emit_text(cfg, json.dumps(payload) + "\n")
    else:
        raise UsageError(f"unknown format {fmt!r}")
    return EXIT_OK


def cmd_validate(cfg: dict[str, str]) -> int:
    suite = cfg.get("suite", "").strip()
    if not suite:
        raise UsageError(f"--suite is required; choose from {', '.join(SUITES)}")
    if suite not in SUITES:
        raise UsageError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")
    fmt = cfg.get("format", "csv")
    results = run_suite(suite)
    lines = [line for r in results for line in r.lines()]
    for r in results:
        print(r.summary_line())
    if fmt == "json":
        text = json.dumps({"suite": suite, "passed": all(r.passed for r in results),
                           "criteria": [r.to_json() for r in results]}, indent=1) + "\n"
    else:
        text = "\n".join(lines) + "\n"
    if cfg.get("out"):
        Path(cfg["out"]).write_text(text)
    return EXIT_OK if all(r.passed for r in results) else EXIT_VALIDATION


def cmd_fig1(cfg: dict[str, str]) -> int:
    _emit_text(cfg, format_table(FIG1_HEADER, fig1_table(), _table_format(cfg)))
    return EXIT_OK


def cmd_asymptotics(cfg: dict[str, str]) -> int:
    """Small-time and long-time asymptotics of the two-index family next to exact values."""
    if "spec.family" in cfg:
        spec = spec_from_config(cfg)
    else:
        spec = KernelSpec(Family.TWO_INDEX_TFBM, alpha=1.2, beta=0.7, lam=1.0)
    if spec.family not in (Family.TWO_INDEX_FOU, Family.TWO_INDEX_TFBM):
        raise UsageError("asymptotics applies to the two-index families")
    a, b, lam, rtol = float(spec.alpha), float(spec.beta), float(spec.lam), spec.rtol
    rows = []
    ab = a * b
    if 0.5 < ab < 1.5:
        coeff = two_index_small_time_coeff(a, b)
        for t in np.geomspace(1e-4, 1e-2, 9) / lam:
            exact = two_index_increment_variance(a, b, lam, float(t), rtol=rtol)
            if not exact.converged:
                raise QuadratureError(f"increment variance did not converge at t={t!r}", tau=float(t))
            approx = coeff * float(t) ** (2 * ab - 1)
            rows.append(("small_time", float(t), exact.value, approx, exact.value / approx))
    if b < 1.0:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            for x in (10.0, 20.0, 40.0, 100.0, 200.0):
                tau = x / lam
                exact = two_index_offdiag_cov(a, b, lam, tau, rtol=rtol)
                if not exact.converged:
                    raise QuadratureError(f"covariance did not converge at tau={tau!r}", tau=tau)
                lead = two_index_leading_term(a, b, lam, tau)
                rows.append(("long_time", tau, exact.value, lead, exact.value / lead))
    _emit_text(cfg, format_table(("regime", "x", "exact", "asymptotic", "ratio"), rows, _table_format(cfg)))
    return EXIT_OK


HANDLERS = {
    "kernel": cmd_kernel,
    "sample": cmd_sample,
    "validate": cmd_validate,
    "fig1": cmd_fig1,
    "asymptotics": cmd_asymptotics,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        cfg = load_config(args)
        return HANDLERS[args.command](cfg)
    except (UsageError, DomainError, UnsupportedParameterError, DegenerateCaseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except QuadratureError as exc:
        where = f" at tau={exc.tau!r}" if exc.tau is not None else ""
        print(f"quadrature failure{where}: {exc}", file=sys.stderr)
        return EXIT_QUADRATURE
    except NotPSDError as exc:
        print(f"factorization failure: {exc}", file=sys.stderr)
        return EXIT_FACTORIZATION
    except KernelEvaluationError as exc:
        print(f"kernel evaluation failure: {exc}", file=sys.stderr)
        return EXIT_QUADRATURE if isinstance(exc.__cause__, QuadratureError) else EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
