"""Tagged process descriptions and their flat key-value configuration format.

A :class:`KernelSpec` names one process family together with its
parameters and knows how to evaluate its covariance.  Specs round-trip
through a flat ``key = value`` text format with dotted keys::

    spec.family = TMBM
    spec.lambda = 0.5
    spec.alpha.kind = logistic
    spec.alpha.params = 0.8, 1.2, 5.0, 1.0
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Mapping

import numpy as np

from tfbm.errors import DomainError, QuadratureError
from tfbm.kernels.base import check_alpha, check_lambda, check_two_index, reduce_kernel
from tfbm.kernels.curves import CurveKind, ParamCurve
from tfbm.kernels.fou import AuxKind, aux_cov, fou_cov, fou_variance, tfbm_cov, tfbm_variance
from tfbm.kernels.multifractional import (
    riesz_mou_cov,
    tmbm_cov,
    var_temper_mou_cov,
    var_temper_tmbm_cov,
    weyl_mou_cov,
)
from tfbm.kernels.tempering import riesz_var_temper_cov, var_temper_cov, var_temper_tfbm_cov
from tfbm.kernels.two_index import two_index_cov, two_index_increment_variance, two_index_tfbm_cov
from tfbm.quad import QuadResult

__all__ = ["Family", "KernelSpec", "parse_config_text", "format_config_text"]


class Family(str, enum.Enum):
    FOU = "FOU"
    TFBM = "TFBM"
    TWO_INDEX_FOU = "TwoIndexFOU"
    TWO_INDEX_TFBM = "TwoIndexTFBM"
    VAR_TEMPER_FOU = "VarTemperFOU"
    VAR_TEMPER_TFBM = "VarTemperTFBM"
    WEYL_MOU = "WeylMOU"
    RIESZ_MOU = "RieszMOU"
    TMBM = "TMBM"
    VAR_TEMPER_MOU = "VarTemperMOU"
    VAR_TEMPER_TMBM = "VarTemperTMBM"
    RIESZ_VAR_TEMPER_FOU = "RieszVarTemperFOU"
    STRETCHED_EXP = "StretchedExp"
    GEN_CAUCHY = "GenCauchy"


_REDUCED = {
    Family.FOU: False,
    Family.TFBM: True,
    Family.TWO_INDEX_FOU: False,
    Family.TWO_INDEX_TFBM: True,
    Family.VAR_TEMPER_FOU: False,
    Family.VAR_TEMPER_TFBM: True,
    Family.WEYL_MOU: False,
    Family.RIESZ_MOU: False,
    Family.TMBM: True,
    Family.VAR_TEMPER_MOU: False,
    Family.VAR_TEMPER_TMBM: True,
    Family.RIESZ_VAR_TEMPER_FOU: False,
}
_AUX = {Family.STRETCHED_EXP: AuxKind.STRETCHED_EXP, Family.GEN_CAUCHY: AuxKind.GEN_CAUCHY}
_ALPHA_CURVE = {Family.WEYL_MOU, Family.RIESZ_MOU, Family.TMBM, Family.VAR_TEMPER_MOU, Family.VAR_TEMPER_TMBM}
_LAMBDA_CURVE = {Family.VAR_TEMPER_FOU, Family.VAR_TEMPER_TFBM, Family.VAR_TEMPER_MOU, Family.VAR_TEMPER_TMBM,
                 Family.RIESZ_VAR_TEMPER_FOU}
_HOLDER_CAPPED = {Family.RIESZ_MOU, Family.TMBM}


def _quad_value(res: QuadResult, where: str) -> float:
    if not res.converged:
        raise QuadratureError(f"quadrature did not converge at {where} (error estimate {res.abs_err:.3g})",
                              estimate=res.value, abs_err=res.abs_err)
    return res.value


@dataclass(frozen=True)
class KernelSpec:
    """One process family with its parameters.

    ``alpha`` and ``lam`` are floats or :class:`ParamCurve` objects depending
    on the family; constants are accepted where a curve is expected.
    ``exponent`` is the shape exponent of the auxiliary StretchedExp and
    GenCauchy kernels.  ``reduced`` defaults to the family's nature; for the
    auxiliary kernels it selects ``X(t) - X(0)``.
    """

    family: Family
    alpha: float | ParamCurve = 1.25
    lam: float | ParamCurve = 0.5
    beta: float | None = None
    exponent: float | None = None
    reduced: bool | None = None
    rtol: float = 1e-10

    def __post_init__(self) -> None:
        fam = Family(self.family)
        object.__setattr__(self, "family", fam)
        alpha, lam = self.alpha, self.lam
        if fam in _ALPHA_CURVE:
            alpha = alpha if isinstance(alpha, ParamCurve) else ParamCurve.constant(float(alpha))
            alpha.require_alpha(holder_cap=fam in _HOLDER_CAPPED)
        elif isinstance(alpha, ParamCurve):
            if not alpha.is_constant:
                raise DomainError(f"family {fam.value} takes a constant alpha")
            alpha = alpha.params[0]
        if fam in _LAMBDA_CURVE:
            lam = lam if isinstance(lam, ParamCurve) else ParamCurve.constant(float(lam))
            lam.require_lambda()
        elif isinstance(lam, ParamCurve):
            if not lam.is_constant:
                raise DomainError(f"family {fam.value} takes a constant lambda")
            lam = lam.params[0]
        else:
            lam = float(lam)
            check_lambda(lam)
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "lam", lam)

        if fam in (Family.TWO_INDEX_FOU, Family.TWO_INDEX_TFBM):
            if self.beta is None:
                raise DomainError("two-index families need beta")
            check_two_index(float(alpha), float(self.beta))
        elif fam in _AUX:
            if self.exponent is None or not (0.0 < self.exponent <= 2.0):
                raise DomainError(f"{fam.value} needs an exponent in (0, 2], got {self.exponent!r}")
        elif fam not in _ALPHA_CURVE:
            check_alpha(float(alpha))

        if fam in _AUX:
            object.__setattr__(self, "reduced", bool(self.reduced))
        else:
            natural = _REDUCED[fam]
            if self.reduced is not None and bool(self.reduced) != natural:
                raise DomainError(f"family {fam.value} has reduced={natural}; cannot override")
            object.__setattr__(self, "reduced", natural)

    # ------------------------------------------------------------ properties
    @property
    def is_stationary(self) -> bool:
        return self.family in (Family.FOU, Family.TWO_INDEX_FOU) or (self.family in _AUX and not self.reduced)

    @property
    def has_stationary_increments(self) -> bool:
        """Reduced processes of stationary bases (their increments are stationary)."""
        return self.family in (Family.TFBM, Family.TWO_INDEX_TFBM) or (self.family in _AUX and self.reduced)

    @property
    def hurst(self) -> float | None:
        """Global Hurst index where one exists."""
        f = self.family
        if f in (Family.FOU, Family.TFBM, Family.VAR_TEMPER_FOU, Family.VAR_TEMPER_TFBM,
                 Family.RIESZ_VAR_TEMPER_FOU):
            return float(self.alpha) - 0.5
        if f in (Family.TWO_INDEX_FOU, Family.TWO_INDEX_TFBM):
            return float(self.alpha) * float(self.beta) - 0.5
        if f in _AUX:
            return 0.5 * float(self.exponent)
        if isinstance(self.alpha, ParamCurve) and self.alpha.is_constant:
            return self.alpha.params[0] - 0.5
        return None

    @property
    def lambda_scale(self) -> float:
        """Largest tempering rate; sets the time scale of the small-lag regime."""
        return self.lam.upper_bound if isinstance(self.lam, ParamCurve) else float(self.lam)

    # ---------------------------------------------------------- evaluation
    def stationary_cov(self, tau: float) -> float:
        """``C(tau)`` of a stationary family or of the base of a stationary-increment family."""
        f = self.family
        if f in (Family.FOU, Family.TFBM):
            return float(fou_cov(self.alpha, self.lam, tau))
        if f in (Family.TWO_INDEX_FOU, Family.TWO_INDEX_TFBM):
            return _quad_value(two_index_cov(self.alpha, self.beta, self.lam, tau, rtol=self.rtol), f"tau={tau}")
        if f in _AUX:
            return float(aux_cov(_AUX[f], self.exponent, self.lam, tau))
        raise DomainError(f"family {f.value} has no stationary base covariance")

    def increment_variance(self, lag: float, t0: float = 1.0) -> float:
        """``E[(Z(t0 + lag) - Z(t0))^2]`` for the process ``Z`` described by this KernelSpec."""
        f = self.family
        if f in (Family.FOU, Family.TFBM):
            return float(tfbm_variance(self.alpha, self.lam, lag))
        if f in (Family.TWO_INDEX_FOU, Family.TWO_INDEX_TFBM):
            res = two_index_increment_variance(self.alpha, self.beta, self.lam, lag, rtol=self.rtol)
            return _quad_value(res, f"lag={lag}")
        if f in _AUX:
            return 2.0 * (self.stationary_cov(0.0) - self.stationary_cov(lag))
        t1 = t0 + lag
        return self.cov(t1, t1) - 2.0 * self.cov(t1, t0) + self.cov(t0, t0)

    def cov(self, t: float, s: float) -> float:
        """Covariance ``k(t, s)`` of the process."""
        f = self.family
        a, lam = self.alpha, self.lam
        if f is Family.FOU:
            return float(fou_cov(a, lam, t - s))
        if f is Family.TFBM:
            return float(tfbm_cov(a, lam, t, s))
        if f is Family.TWO_INDEX_FOU:
            return _quad_value(two_index_cov(a, self.beta, lam, t - s, rtol=self.rtol), f"tau={t - s}")
        if f is Family.TWO_INDEX_TFBM:
            return _quad_value(two_index_tfbm_cov(a, self.beta, lam, t, s, rtol=self.rtol), f"(t,s)=({t},{s})")
        if f is Family.VAR_TEMPER_FOU:
            return var_temper_cov(a, lam, t, s)
        if f is Family.VAR_TEMPER_TFBM:
            return var_temper_tfbm_cov(a, lam, t, s)
        if f is Family.WEYL_MOU:
            return weyl_mou_cov(a, lam, t, s)
        if f is Family.RIESZ_MOU:
            return riesz_mou_cov(a, lam, t, s)
        if f is Family.TMBM:
            return tmbm_cov(a, lam, t, s)
        if f is Family.VAR_TEMPER_MOU:
            return var_temper_mou_cov(a, lam, t, s)
        if f is Family.VAR_TEMPER_TMBM:
            return var_temper_tmbm_cov(a, lam, t, s)
        if f is Family.RIESZ_VAR_TEMPER_FOU:
            return _quad_value(riesz_var_temper_cov(a, lam, t, s, rtol=self.rtol), f"(t,s)=({t},{s})")
        base: Callable[[float, float], float] = lambda u, v: self.stationary_cov(u - v)  # noqa: E731
        return reduce_kernel(base, t, s) if self.reduced else base(t, s)

    def variance_at_origin(self) -> float:
        """Stationary variance for stationary families."""
        if self.family in (Family.FOU, Family.TFBM):
            return fou_variance(self.alpha, self.lam)
        return self.stationary_cov(0.0)

    # ------------------------------------------------------- serialization
    def to_config(self, prefix: str = "spec") -> dict[str, str]:
        out = {f"{prefix}.family": self.family.value}
        for name, value in (("alpha", self.alpha), ("lambda", self.lam)):
            if isinstance(value, ParamCurve):
                d = value.to_dict()
                out[f"{prefix}.{name}.kind"] = d["kind"]
                out[f"{prefix}.{name}.params"] = ", ".join(repr(float(p)) for p in d["params"])
                for key in ("lower_bound", "upper_bound", "holder_exponent", "holder_constant"):
                    out[f"{prefix}.{name}.{key}"] = repr(float(d[key]))
            else:
                out[f"{prefix}.{name}"] = repr(float(value))
        if self.beta is not None:
            out[f"{prefix}.beta"] = repr(float(self.beta))
        if self.exponent is not None:
            out[f"{prefix}.exponent"] = repr(float(self.exponent))
        out[f"{prefix}.reduced"] = "true" if self.reduced else "false"
        return out

    @classmethod
    def from_config(cls, cfg: Mapping[str, str], prefix: str = "spec") -> "KernelSpec":
        def get(key: str) -> str | None:
            return cfg.get(f"{prefix}.{key}")

        family = get("family")
        if family is None:
            raise DomainError(f"missing key {prefix}.family")
        try:
            fam = Family(family.strip())
        except ValueError:
            names = ", ".join(f.value for f in Family)
            raise DomainError(f"unknown family {family!r}; expected one of {names}") from None

        def param(name: str) -> float | ParamCurve | None:
            kind = get(f"{name}.kind")
            if kind is not None:
                try:
                    ck = CurveKind(kind.strip())
                except ValueError:
                    raise DomainError(f"unknown curve kind {kind!r} for {prefix}.{name}") from None
                raw = get(f"{name}.params") or ""
                params = tuple(_to_float(x, f"{prefix}.{name}.params") for x in raw.split(",") if x.strip())
                extra = {k: _to_float(get(f"{name}.{k}"), f"{prefix}.{name}.{k}")
                         for k in ("lower_bound", "upper_bound", "holder_exponent", "holder_constant")
                         if get(f"{name}.{k}") is not None}
                return ParamCurve(ck, params, **extra)
            raw = get(name)
            return None if raw is None else _to_float(raw, f"{prefix}.{name}")

        kwargs: dict = {"family": fam}
        alpha = param("alpha")
        lam = param("lambda")
        if alpha is not None:
            kwargs["alpha"] = alpha
        if lam is not None:
            kwargs["lam"] = lam
        for key in ("beta", "exponent"):
            if get(key) is not None:
                kwargs[key] = _to_float(get(key), f"{prefix}.{key}")
        if get("reduced") is not None:
            kwargs["reduced"] = _to_bool(get("reduced"), f"{prefix}.reduced")
        return cls(**kwargs)


def _to_float(raw: str | None, key: str) -> float:
    try:
        value = float(str(raw).strip())
    except ValueError:
        raise DomainError(f"{key}: expected a number, got {raw!r}") from None
    if math.isnan(value):
        raise DomainError(f"{key}: NaN is not a valid parameter")
    return value


def _to_bool(raw: str | None, key: str) -> bool:
    text = str(raw).strip().lower()
    if text in ("1", "true", "yes", "on"):
        return True
    if text in ("0", "false", "no", "off"):
        return False
    raise DomainError(f"{key}: expected a boolean, got {raw!r}")


def parse_config_text(text: str) -> dict[str, str]:
    """Parse ``key = value`` lines; ``#`` starts a comment; later keys win."""
    out: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise DomainError(f"config line {lineno}: expected 'key = value', got {line!r}")
        key, value = line.split("=", 1)
        key = key.strip()
        if not key:
            raise DomainError(f"config line {lineno}: empty key")
        out[key] = value.strip()
    return out


def format_config_text(cfg: Mapping[str, str]) -> str:
    return "".join(f"{k} = {v}\n" for k, v in cfg.items())


def unique_lag_values(fn: Callable[[float], float], lags: np.ndarray, *, rel: float = 1e-12
                      ) -> np.ndarray:
    """Evaluate ``fn`` once per distinct lag (to relative resolution ``rel``)."""
    lags = np.asarray(lags, dtype=float)
    scale = float(np.max(np.abs(lags))) if lags.size else 1.0
    scale = scale if scale > 0 else 1.0
    keys = np.round(lags / (scale * rel)).astype(np.int64)
    uniq, first, inverse = np.unique(keys, return_index=True, return_inverse=True)
    vals = np.array([fn(float(lags.flat[i])) for i in first])
    return vals[inverse].reshape(lags.shape)
