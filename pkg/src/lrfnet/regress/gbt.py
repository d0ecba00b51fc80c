"""Least-squares gradient boosting over depth-limited regression trees."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from ..errors import DimensionMismatch, EmptyData


@dataclass(frozen=True)
class GbtParams:
    n_rounds: int = 200
    max_depth: int = 3
    shrinkage: float = 0.1
    min_leaf: int = 2

    def __post_init__(self):
        if self.n_rounds < 1 or self.max_depth < 1 or self.min_leaf < 1:
            raise ValueError("n_rounds, max_depth and min_leaf must be >= 1")
        if not 0 < self.shrinkage <= 1:
            raise ValueError("shrinkage must lie in (0, 1]")


class Tree:
    """Array-backed binary regression tree; ``feature == -1`` marks a leaf."""

    def __init__(self, feature, threshold, left, right, value):
        self.feature = np.asarray(feature, dtype=np.int64)
        self.threshold = np.asarray(threshold, dtype=float)
        self.left = np.asarray(left, dtype=np.int64)
        self.right = np.asarray(right, dtype=np.int64)
        self.value = np.asarray(value, dtype=float)

    def predict_one(self, x) -> float:
        node = 0
        while self.feature[node] >= 0:
            if x[self.feature[node]] <= self.threshold[node]:
                node = self.left[node]
            else:
                node = self.right[node]
        return float(self.value[node])

    def predict_many(self, X) -> np.ndarray:
        node = np.zeros(X.shape[0], dtype=np.int64)
        active = self.feature[node] >= 0
        while active.any():
            rows = np.flatnonzero(active)
            n = node[rows]
            go_left = X[rows, self.feature[n]] <= self.threshold[n]
            node[rows] = np.where(go_left, self.left[n], self.right[n])
            active = self.feature[node] >= 0
        return self.value[node]

    def to_dict(self) -> dict:
        return {
            "feature": self.feature.tolist(),
            "threshold": self.threshold.tolist(),
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "value": self.value.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Tree":
        return cls(d["feature"], d["threshold"], d["left"], d["right"], d["value"])


def _best_split(X, r, min_leaf):
    """Exact variance-reduction split search.

    Ties go to the lowest feature index, then the lowest threshold.
    Returns (feature, threshold, gain) or None.
    """
    n, p = X.shape
    total = r.sum()
    base = total * total / n
    best = None
    best_gain = 0.0
    for f in range(p):
        order = np.argsort(X[:, f], kind="stable")
        xs = X[order, f]
        cs = np.cumsum(r[order])
        k = np.arange(min_leaf, n - min_leaf + 1)
        if k.size == 0:
            continue
        k = k[xs[k - 1] < xs[np.minimum(k, n - 1)]]
        if k.size == 0:
            continue
        left = cs[k - 1]
        right = total - left
        gain = left * left / k + right * right / (n - k) - base
        j = int(np.argmax(gain))
        if gain[j] > best_gain * (1 + 1e-12) + 1e-300:
            best_gain = float(gain[j])
            best = (f, 0.5 * (xs[k[j] - 1] + xs[k[j]]), best_gain)
    return best


def build_tree(X, r, max_depth: int, min_leaf: int) -> Tree:
    feature, threshold, left, right, value = [], [], [], [], []

    def grow(idx, depth):
        node = len(feature)
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        value.append(float(r[idx].mean()))
        if depth >= max_depth or idx.size < 2 * min_leaf:
            return node
        split = _best_split(X[idx], r[idx], min_leaf)
        if split is None:
            return node
        f, thr, _ = split
        mask = X[idx, f] <= thr
        feature[node] = f
        threshold[node] = thr
        left[node] = grow(idx[mask], depth + 1)
        right[node] = grow(idx[~mask], depth + 1)
        return node

    grow(np.arange(X.shape[0]), 0)
    return Tree(feature, threshold, left, right, value)


class GbtRegressor:
    backend = "gbt"

    def __init__(self, base: float, trees, params: GbtParams, n_features: int,
                 seed: int = 1, train_mse=()):
        self.base = float(base)
        self.trees = list(trees)
        self.params = params
        self.n_features = n_features
        self.seed = seed
        self.train_mse = list(train_mse)

    def predict(self, x) -> float:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n_features,):
            raise DimensionMismatch(f"expected {self.n_features} features, got {x.shape}")
        nu = self.params.shrinkage
        out = self.base
        for t in self.trees:
            out += nu * t.predict_one(x)
        return float(out)

    def predict_many(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != self.n_features:
            raise DimensionMismatch(f"expected (*, {self.n_features}) features, got {X.shape}")
        out = np.full(X.shape[0], self.base)
        for t in self.trees:
            out += self.params.shrinkage * t.predict_many(X)
        return out

    def to_dict(self) -> dict:
        return {
            "base": self.base,
            "params": asdict(self.params),
            "n_features": self.n_features,
            "seed": self.seed,
            "train_mse": list(self.train_mse),
            "trees": [t.to_dict() for t in self.trees],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GbtRegressor":
        return cls(d["base"], [Tree.from_dict(t) for t in d["trees"]],
                   GbtParams(**d["params"]), d["n_features"], d["seed"], d["train_mse"])


def fit_gbt(X, y, params: GbtParams | None = None, seed: int = 1) -> GbtRegressor:
    """Stage-wise least-squares boosting.

    The seed is recorded for provenance only; the exact split search has no
    random component.
    """
    params = params or GbtParams()
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.shape[0] < 2 or X.shape[0] != y.shape[0]:
        raise EmptyData(f"need at least 2 matching rows, got {X.shape[0]} and {y.shape[0]}")
    base = float(y[0]) if np.ptp(y) == 0 else float(y.mean())
    pred = np.full(y.shape, base)
    history = [float(np.mean((y - pred) ** 2))]
    trees = []
    for _ in range(params.n_rounds):
        tree = build_tree(X, y - pred, params.max_depth, params.min_leaf)
        trees.append(tree)
        pred = pred + params.shrinkage * tree.predict_many(X)
        history.append(float(np.mean((y - pred) ** 2)))
    return GbtRegressor(base, trees, params, X.shape[1], seed, history)
