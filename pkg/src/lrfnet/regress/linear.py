"""Least-squares solver and the linear regression backend."""

from __future__ import annotations

import numpy as np

from ..errors import DimensionMismatch, EmptyData


def solve_least_squares(A, y, ridge: float = 0.0, intercept: bool = True) -> np.ndarray:
    """Solve ``min |A w + d - y|^2 + ridge * |w|^2`` by SVD.

    Returns the coefficient vector with the intercept last when ``intercept``
    is set. The intercept is never penalized. Rank-deficient systems get the
    minimum-norm solution, so no singular-system error exists.
    """
    A = np.asarray(A, dtype=float)
    y = np.asarray(y, dtype=float)
    if A.ndim == 1:
        A = A[:, None]
    if A.shape[0] == 0 or A.shape[0] != y.shape[0]:
        raise EmptyData(f"need matching nonzero rows, got {A.shape[0]} and {y.shape[0]}")
    if intercept:
        A = np.column_stack([A, np.ones(A.shape[0])])
    if ridge > 0:
        p = A.shape[1]
        penalty = np.sqrt(ridge) * np.eye(p)
        if intercept:
            penalty[-1, -1] = 0.0
        A = np.vstack([A, penalty])
        y = np.concatenate([y, np.zeros(p)])
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    return coef


def ols_line(x, y) -> tuple[float, float]:
    """Slope and intercept of the least-squares line through (x, y)."""
    slope, icept = solve_least_squares(np.asarray(x, dtype=float)[:, None], y)
    return float(slope), float(icept)


class LinearRegressor:
    backend = "linear"

    def __init__(self, coef, intercept: float, seed: int = 1, ridge: float = 0.0):
        self.coef = np.asarray(coef, dtype=float)
        self.intercept = float(intercept)
        self.seed = seed
        self.ridge = ridge

    @property
    def n_features(self) -> int:
        return self.coef.size

    def predict(self, x) -> float:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n_features,):
            raise DimensionMismatch(f"expected {self.n_features} features, got {x.shape}")
        return float(x @ self.coef + self.intercept)

    def predict_many(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != self.n_features:
            raise DimensionMismatch(f"expected (*, {self.n_features}) features, got {X.shape}")
        return X @ self.coef + self.intercept

    def to_dict(self) -> dict:
        return {
            "coef": self.coef.tolist(),
            "intercept": self.intercept,
            "seed": self.seed,
            "ridge": self.ridge,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "LinearRegressor":
        return cls(d["coef"], d["intercept"], d["seed"], d["ridge"])


def fit_linear(X, y, seed: int = 1, ridge: float = 0.0) -> LinearRegressor:
    w = solve_least_squares(X, y, ridge=ridge)
    return LinearRegressor(w[:-1], w[-1], seed=seed, ridge=ridge)
