"""Bounded deterministic parameter curves alpha(t) and lambda(t)."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from tfbm.errors import DomainError

__all__ = ["CurveKind", "ParamCurve", "as_curve"]


class CurveKind(str, enum.Enum):
    CONSTANT = "constant"
    LINEAR_CLAMPED = "linear_clamped"
    LOGISTIC = "logistic"
    TABLE_LINEAR_INTERP = "table_linear_interp"


@dataclass(frozen=True)
class ParamCurve:
    """A bounded function of time with declared bounds and Hoelder data.

    Parameter layouts by kind:

    ``constant``             ``(c,)``
    ``linear_clamped``       ``(intercept, slope, low, high)``; value clipped to ``[low, high]``
    ``logistic``             ``(low, high, midpoint, steepness)``;
                             ``low + (high - low) / (1 + exp(-steepness (t - midpoint)))``
    ``table_linear_interp``  ``(t0, v0, t1, v1, ...)``; flat extrapolation outside the table

    When the bounds or Hoelder data are omitted they are derived from the
    parameters.  The Hoelder exponent of every built-in kind is 1 (they are
    Lipschitz); the constant is the Lipschitz constant.
    """

    kind: CurveKind
    params: tuple[float, ...]
    lower_bound: float = math.nan
    upper_bound: float = math.nan
    holder_exponent: float = 1.0
    holder_constant: float = math.nan
    _table: tuple[np.ndarray, np.ndarray] | None = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        kind = CurveKind(self.kind)
        object.__setattr__(self, "kind", kind)
        params = tuple(float(p) for p in self.params)
        object.__setattr__(self, "params", params)
        lo, hi, lip = self._derived(kind, params)
        if math.isnan(self.lower_bound):
            object.__setattr__(self, "lower_bound", lo)
        if math.isnan(self.upper_bound):
            object.__setattr__(self, "upper_bound", hi)
        if math.isnan(self.holder_constant):
            object.__setattr__(self, "holder_constant", max(lip, 1e-300))
        if not (0.0 < self.holder_exponent <= 1.0):
            raise DomainError(f"Hoelder exponent must lie in (0, 1], got {self.holder_exponent}")
        if not (self.holder_constant > 0.0):
            raise DomainError(f"Hoelder constant must be positive, got {self.holder_constant}")
        if self.lower_bound > lo or self.upper_bound < hi:
            raise DomainError(
                f"declared bounds [{self.lower_bound}, {self.upper_bound}] do not contain "
                f"the curve range [{lo}, {hi}]"
            )

    # ------------------------------------------------------------------ build
    @staticmethod
    def _derived(kind: CurveKind, p: tuple[float, ...]) -> tuple[float, float, float]:
        if kind is CurveKind.CONSTANT:
            if len(p) != 1:
                raise DomainError("constant curve takes one parameter")
            return p[0], p[0], 0.0
        if kind is CurveKind.LINEAR_CLAMPED:
            if len(p) != 4 or p[2] > p[3]:
                raise DomainError("linear_clamped takes (intercept, slope, low, high) with low <= high")
            return p[2], p[3], abs(p[1])
        if kind is CurveKind.LOGISTIC:
            if len(p) != 4 or p[3] <= 0:
                raise DomainError("logistic takes (low, high, midpoint, steepness > 0)")
            low, high = min(p[0], p[1]), max(p[0], p[1])
            return low, high, abs(p[1] - p[0]) * p[3] / 4.0
        if kind is CurveKind.TABLE_LINEAR_INTERP:
            if len(p) < 4 or len(p) % 2:
                raise DomainError("table curve takes pairs (t0, v0, t1, v1, ...) with at least two pairs")
            ts, vs = np.asarray(p[0::2]), np.asarray(p[1::2])
            if np.any(np.diff(ts) <= 0):
                raise DomainError("table times must be strictly increasing")
            slopes = np.abs(np.diff(vs) / np.diff(ts))
            return float(vs.min()), float(vs.max()), float(slopes.max())
        raise DomainError(f"unknown curve kind {kind!r}")

    @classmethod
    def constant(cls, value: float) -> "ParamCurve":
        return cls(CurveKind.CONSTANT, (value,))

    @classmethod
    def linear_clamped(cls, intercept: float, slope: float, low: float, high: float) -> "ParamCurve":
        return cls(CurveKind.LINEAR_CLAMPED, (intercept, slope, low, high))

    @classmethod
    def logistic(cls, low: float, high: float, midpoint: float, steepness: float) -> "ParamCurve":
        return cls(CurveKind.LOGISTIC, (low, high, midpoint, steepness))

    @classmethod
    def table(cls, times, values) -> "ParamCurve":
        flat: list[float] = []
        for t, v in zip(times, values):
            flat += [float(t), float(v)]
        return cls(CurveKind.TABLE_LINEAR_INTERP, tuple(flat))

    # --------------------------------------------------------------- evaluate
    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        p = self.params
        if self.kind is CurveKind.CONSTANT:
            out = np.full(t.shape, p[0])
        elif self.kind is CurveKind.LINEAR_CLAMPED:
            out = np.clip(p[0] + p[1] * t, p[2], p[3])
        elif self.kind is CurveKind.LOGISTIC:
            # 1 / (1 + exp(-x)) written with tanh to avoid overflow warnings
            x = p[3] * (t - p[2])
            out = p[0] + (p[1] - p[0]) * 0.5 * (1.0 + np.tanh(0.5 * x))
        else:
            out = np.interp(t, p[0::2], p[1::2])
        return float(out) if out.ndim == 0 else out

    @property
    def is_constant(self) -> bool:
        return self.lower_bound == self.upper_bound

    # ------------------------------------------------------------- validation
    def require_alpha(self, *, holder_cap: bool) -> None:
        """Check the curve is admissible as a fractional order alpha(t).

        ``holder_cap`` adds the requirement ``upper_bound < kappa + 1/2`` used
        by the Riesz-type multifractional families.
        """
        if not (self.lower_bound > 0.5):
            raise DomainError(f"alpha curve needs lower bound > 1/2, got {self.lower_bound}")
        if holder_cap and not (self.upper_bound < self.holder_exponent + 0.5):
            raise DomainError(
                f"alpha curve upper bound {self.upper_bound} must be below "
                f"holder_exponent + 1/2 = {self.holder_exponent + 0.5}"
            )

    def require_lambda(self) -> None:
        if not (self.lower_bound > 0.0):
            raise DomainError(f"lambda curve needs lower bound > 0, got {self.lower_bound}")

    # ---------------------------------------------------------- serialization
    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "params": list(self.params),
            "lower_bound": self.lower_bound,
            "upper_bound": self.upper_bound,
            "holder_exponent": self.holder_exponent,
            "holder_constant": self.holder_constant,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ParamCurve":
        return cls(
            CurveKind(d["kind"]),
            tuple(float(x) for x in d["params"]),
            float(d.get("lower_bound", math.nan)),
            float(d.get("upper_bound", math.nan)),
            float(d.get("holder_exponent", 1.0)),
            float(d.get("holder_constant", math.nan)),
        )


def as_curve(value: float | ParamCurve) -> ParamCurve:
    return value if isinstance(value, ParamCurve) else ParamCurve.constant(float(value))
