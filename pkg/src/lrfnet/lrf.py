"""Stacked linear-regression feature (LRF) encoder.

Unit ``j`` (1-based) regresses the next value ``y[i+1]`` on a window of
``m`` lagged values and ``m`` lagged first differences ending at
``i - (j - 1)``, plus the outputs of units ``1 .. j-1`` at the same
position. The feature vector at ``i`` is the outputs of all ``m`` units.

Positions are 0-based throughout. ``dy[t] = y[t] - y[t-1]`` exists for
``t >= 1``, so unit ``j`` is defined from ``i = m + j - 1`` and a full
feature vector from ``i = 2m - 1``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import OutOfWindow, TooShort
from .regress.linear import solve_least_squares
from .series import Series


@dataclass(frozen=True)
class LinearUnit:
    a: np.ndarray  # lagged values, newest first
    b: np.ndarray  # lagged differences, newest first
    c: np.ndarray  # shallower feature dimensions, unit 1 first
    d: float

    @property
    def coef(self) -> np.ndarray:
        return np.concatenate([self.a, self.b, self.c])


@dataclass(frozen=True)
class LrfModel:
    m: int
    units: tuple
    ridge_lambda: float = 0.0

    def first_position(self) -> int:
        return 2 * self.m - 1

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "ridge_lambda": self.ridge_lambda,
            "units": [
                {"a": u.a.tolist(), "b": u.b.tolist(), "c": u.c.tolist(), "d": u.d}
                for u in self.units
            ],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "LrfModel":
        units = tuple(
            LinearUnit(np.asarray(u["a"], dtype=float), np.asarray(u["b"], dtype=float),
                       np.asarray(u["c"], dtype=float), float(u["d"]))
            for u in d["units"]
        )
        model = cls(int(d["m"]), units, float(d["ridge_lambda"]))
        for j, u in enumerate(units, 1):
            if u.a.size != model.m or u.b.size != model.m or u.c.size != j - 1:
                raise ValueError(f"unit {j} has inconsistent coefficient counts")
        if len(units) != model.m:
            raise ValueError(f"expected {model.m} units, found {len(units)}")
        return model


@dataclass(frozen=True)
class FeatureVector:
    values: np.ndarray
    position: int


def _values(s) -> np.ndarray:
    return s.ys if isinstance(s, Series) else np.asarray(s, dtype=float)


def _lag_block(y, dy, end, m):
    """Rows ``[y[e], y[e-1], .., y[e-m+1], dy[e], .., dy[e-m+1]]`` for each ``e`` in ``end``."""
    lags = end[:, None] - np.arange(m)[None, :]
    return np.hstack([y[lags], dy[lags]])


def _with_dy(y):
    return np.concatenate([[np.nan], np.diff(y)])


def _unit_outputs(units, y, positions, m):
    dy = _with_dy(y)
    V = np.empty((positions.size, len(units)))
    for j, u in enumerate(units, 1):
        X = _lag_block(y, dy, positions - (j - 1), m)
        V[:, j - 1] = X @ np.concatenate([u.a, u.b]) + V[:, : j - 1] @ u.c + u.d
    return V


def fit_lrf(s, m: int = 4, ridge_lambda: float = 0.0) -> LrfModel:
    y = _values(s)
    n = y.size
    if m < 1:
        raise ValueError("m must be >= 1")
    if n < 2 * m + 3:
        raise TooShort(f"LRF with m={m} needs at least {2 * m + 3} samples, got {n}")
    dy = _with_dy(y)
    # V[i, j-1] holds unit j's output at position i once that unit is fitted.
    V = np.full((n, m), np.nan)
    units = []
    for j in range(1, m + 1):
        train_pos = np.arange(m + j - 1, n - 1)
        X = np.hstack([_lag_block(y, dy, train_pos - (j - 1), m), V[train_pos, : j - 1]])
        w = solve_least_squares(X, y[train_pos + 1], ridge=ridge_lambda)
        unit = LinearUnit(w[:m].copy(), w[m : 2 * m].copy(), w[2 * m : -1].copy(), float(w[-1]))
        units.append(unit)
        pos = np.arange(m + j - 1, n)
        Xall = np.hstack([_lag_block(y, dy, pos - (j - 1), m), V[pos, : j - 1]])
        V[pos, j - 1] = Xall @ unit.coef + unit.d
    return LrfModel(m, tuple(units), ridge_lambda)


def encode(model: LrfModel, s, i: int) -> FeatureVector:
    y = _values(s)
    if i < model.first_position() or i >= y.size:
        raise OutOfWindow(
            f"position {i} outside encodable range [{model.first_position()}, {y.size - 1}]"
        )
    # Only the trailing 2m values matter; slicing keeps rolling use O(m^2).
    lo = i - 2 * model.m + 1
    local = y[lo : i + 1]
    v = _unit_outputs(model.units, local, np.array([local.size - 1]), model.m)[0]
    return FeatureVector(v, i)


def encode_all(model: LrfModel, s) -> np.ndarray:
    """Feature matrix for every encodable position ``2m-1 .. n-1``."""
    y = _values(s)
    pos = np.arange(model.first_position(), y.size)
    if pos.size == 0:
        raise TooShort("series too short to encode any position")
    return _unit_outputs(model.units, y, pos, model.m)


def encode_training_set(model: LrfModel, s) -> tuple[np.ndarray, np.ndarray]:
    """Feature rows and one-step-ahead targets for positions ``2m-1 .. n-2``."""
    y = _values(s)
    if y.size < 2 * model.m + 3:
        raise TooShort(f"need at least {2 * model.m + 3} samples, got {y.size}")
    F = encode_all(model, y)[:-1]
    return F, y[model.first_position() + 1 :].copy()
