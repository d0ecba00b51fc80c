"""Trend removal by a fitted exponential or integrated-exponential denominator.

With ``Y1 = y + 1`` the near-stationary series is ``S = Y1 / g(x)`` where

* ``PolyDiff``:    g(x) = a2 * cumsum(exp(a1*x + b1)) + b2, chosen when a
  scaled power law ``c * x**k`` fits ``Y1`` at least as well as a scaled
  exponential ``c * base**x``;
* ``Exponential``: g(x) = a2 * exp(a1*x + b1) + b2, chosen otherwise;
* ``Identity``:    S = y, for near-constant input or when neither trend
  can be fitted with a positive denominator.

The PolyDiff cumulative sum runs over the training grid; beyond it the sum
is continued on the same step from ``cum_state``.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import NonPositiveDenominator, NonPositiveInput, TooShort
from .regress.linear import ols_line
from .series import Series

MIN_LENGTH = 8
MIN_DIFF_POINTS = 4
CONSTANT_REL_RANGE = 1e-6
DENOM_FLOOR = 1e-12


class Branch(str, Enum):
    IDENTITY = "Identity"
    POLY_DIFF = "PolyDiff"
    EXPONENTIAL = "Exponential"


@dataclass(frozen=True, eq=False)
class StationaryModel:
    branch: Branch
    a1: float = 0.0
    b1: float = 0.0
    a2: float = 1.0
    b2: float = 0.0
    k_est: float = float("nan")
    base_est: float = float("nan")
    train_xs: np.ndarray = None
    cum_state: float = 0.0

    def trend(self, xs) -> np.ndarray:
        """Denominator ``g`` at grid points ``xs`` (training grid or its continuation)."""
        xs = np.asarray(xs, dtype=float)
        if self.branch is Branch.IDENTITY:
            return np.ones_like(xs)
        if self.branch is Branch.EXPONENTIAL:
            return self.a2 * np.exp(self.a1 * xs + self.b1) + self.b2
        return self.a2 * self._cumulative(xs) + self.b2

    def _cumulative(self, xs):
        tx = self.train_xs
        n = tx.size
        step = (tx[-1] - tx[0]) / (n - 1)
        inside = np.searchsorted(tx, xs)
        out = np.empty_like(xs)
        train_cs = np.cumsum(np.exp(self.a1 * tx + self.b1))
        beyond = xs > tx[-1] + 0.5 * step * 1e-6
        ins = ~beyond
        if ins.any():
            idx = np.clip(inside[ins], 0, n - 1)
            # searchsorted lands on the right neighbour for values just below a grid point
            prev = np.clip(idx - 1, 0, n - 1)
            pick = np.where(np.abs(tx[prev] - xs[ins]) < np.abs(tx[idx] - xs[ins]), prev, idx)
            if not np.allclose(tx[pick], xs[ins], rtol=0, atol=1e-6 * abs(step)):
                raise ValueError("requested x is not on the training grid")
            out[ins] = train_cs[pick]
        if beyond.any():
            k = np.rint((xs[beyond] - tx[-1]) / step).astype(np.int64)
            if not np.allclose(tx[-1] + k * step, xs[beyond], rtol=1e-9, atol=1e-6 * abs(step)):
                raise ValueError("requested x does not continue the training grid step")
            kmax = int(k.max())
            ext = self.cum_state + np.cumsum(
                np.exp(self.a1 * (tx[-1] + step * np.arange(1, kmax + 1)) + self.b1)
            )
            out[beyond] = ext[k - 1]
        return out

    def to_dict(self) -> dict:
        return {
            "branch": self.branch.value,
            "a1": self.a1, "b1": self.b1, "a2": self.a2, "b2": self.b2,
            "k_est": self.k_est, "base_est": self.base_est,
            "train_xs": None if self.train_xs is None else self.train_xs.tolist(),
            "cum_state": self.cum_state,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "StationaryModel":
        xs = d["train_xs"]
        return cls(Branch(d["branch"]), float(d["a1"]), float(d["b1"]), float(d["a2"]),
                   float(d["b2"]), float(d["k_est"]), float(d["base_est"]),
                   None if xs is None else np.asarray(xs, dtype=float), float(d["cum_state"]))


IDENTITY = StationaryModel(Branch.IDENTITY)


def _shifted(s: Series) -> np.ndarray:
    y1 = s.ys + 1.0
    if np.any(y1 <= 0):
        raise NonPositiveInput("y + 1 must be positive for the log fits")
    return y1


def estimate_poly_order(s: Series) -> float:
    """Slope of log(y + 1) against log(x)."""
    y1 = _shifted(s)
    if np.any(s.xs <= 0):
        raise NonPositiveInput("power-law order needs x > 0")
    return ols_line(np.log(s.xs), np.log(y1))[0]


def estimate_exp_base(s: Series) -> float:
    """exp of the slope of log(y + 1) against x."""
    return float(np.exp(ols_line(s.xs, np.log(_shifted(s)))[0]))


def _scaled_sse(basis, target) -> float:
    """SSE of ``c * basis`` against ``target`` with ``c`` by least squares."""
    top = np.max(np.abs(basis))
    if not np.isfinite(top) or top == 0:
        return np.inf
    u = basis / top
    c = (u @ target) / (u @ u)
    r = c * u - target
    return float(r @ r)


def candidate_sse(s: Series) -> tuple[float, float, float, float]:
    """(k_est, base_est, power SSE, exponential SSE); unusable candidates get inf SSE."""
    y1 = s.ys + 1.0
    k = base = np.nan
    sse_pow = sse_exp = np.inf
    with np.errstate(over="ignore", invalid="ignore"):
        try:
            k = estimate_poly_order(s)
            sse_pow = _scaled_sse(np.exp(k * (np.log(s.xs) - np.log(s.xs.max()))), y1)
        except NonPositiveInput:
            pass
        try:
            base = estimate_exp_base(s)
            sse_exp = _scaled_sse(np.exp(np.log(base) * (s.xs - s.xs.max())), y1)
        except NonPositiveInput:
            pass
    return float(k), float(base), sse_pow, sse_exp


def _fit_poly_diff(xs, y1):
    d = np.diff(y1)
    keep = d > 0
    if keep.sum() < MIN_DIFF_POINTS:
        return None
    a1, b1 = ols_line(xs[1:][keep], np.log(d[keep]))
    with np.errstate(over="ignore"):
        cs = np.cumsum(np.exp(a1 * xs + b1))
    if not np.all(np.isfinite(cs)):
        return None
    a2, b2 = ols_line(cs, y1)
    return a1, b1, a2, b2, float(cs[-1])


def _fit_exponential(xs, y1):
    if np.any(y1 <= 0):
        return None
    a1, b1 = ols_line(xs, np.log(y1))
    with np.errstate(over="ignore"):
        e = np.exp(a1 * xs + b1)
    if not np.all(np.isfinite(e)):
        return None
    a2, b2 = ols_line(e, y1)
    return a1, b1, a2, b2, 0.0


def fit_stationary(s: Series) -> StationaryModel:
    if len(s) < MIN_LENGTH:
        raise TooShort(f"stationary fit needs at least {MIN_LENGTH} samples, got {len(s)}")
    ys = s.ys
    scale = np.max(np.abs(ys))
    if scale == 0 or np.ptp(ys) / scale < CONSTANT_REL_RANGE:
        return IDENTITY
    k, base, sse_pow, sse_exp = candidate_sse(s)
    if sse_pow <= sse_exp:
        order = [(Branch.POLY_DIFF, _fit_poly_diff), (Branch.EXPONENTIAL, _fit_exponential)]
    else:
        order = [(Branch.EXPONENTIAL, _fit_exponential), (Branch.POLY_DIFF, _fit_poly_diff)]
    if not np.isfinite(min(sse_pow, sse_exp)):
        return IDENTITY
    y1 = ys + 1.0
    for branch, fitter in order:
        with np.errstate(invalid="ignore", divide="ignore"):
            fitted = fitter(s.xs, y1)
        if fitted is None:
            continue
        a1, b1, a2, b2, cum = fitted
        model = StationaryModel(branch, a1, b1, a2, b2, k, base, s.xs.copy(), cum)
        g = model.trend(s.xs)
        if np.all(np.isfinite(g)) and np.all(g > 0):
            return model
    return IDENTITY


def apply_stationary(model: StationaryModel, s: Series) -> Series:
    if model.branch is Branch.IDENTITY:
        return s
    g = model.trend(s.xs)
    if np.any(~np.isfinite(g)) or np.any(g <= DENOM_FLOOR):
        raise NonPositiveDenominator("trend denominator is not positive at a requested x")
    return s.with_values((s.ys + 1.0) / g)


def invert_stationary(model: StationaryModel, s_val, x):
    """Map transformed value(s) at grid point(s) ``x`` back to the input scale."""
    if model.branch is Branch.IDENTITY:
        return s_val if np.ndim(s_val) == 0 else np.asarray(s_val, dtype=float)
    scalar = np.ndim(s_val) == 0 and np.ndim(x) == 0
    g = model.trend(np.atleast_1d(np.asarray(x, dtype=float)))
    if np.any(~np.isfinite(g)) or np.any(g <= DENOM_FLOOR):
        raise NonPositiveDenominator("trend denominator is not positive at a requested x")
    out = np.asarray(s_val, dtype=float) * g - 1.0
    return float(out[0]) if scalar else out
