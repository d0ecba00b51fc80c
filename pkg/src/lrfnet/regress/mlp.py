"""Small tanh feedforward regressor trained by full-batch gradient descent.

The network is ``out = tanh-stack(x) @ v + c + x @ u``: a hidden tanh stack
plus a linear bypass ``u``. The bypass starts at the least-squares solution
and ``v`` starts at zero, so training begins from the best linear fit and
the tanh units only add curvature the data supports. The bypass also keeps
predictions linear (not saturated) for inputs outside the training range.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from ..errors import DimensionMismatch, EmptyData, NonFinite
from .linear import solve_least_squares

MOMENTUM = 0.9
PLATEAU_EPOCHS = 50
MAX_PLATEAU_DECAYS = 3
MIN_LR_FRACTION = 1e-6


@dataclass(frozen=True)
class MlpParams:
    hidden_sizes: tuple = (10,)
    max_epochs: int = 2000
    learning_rate: float = 0.01
    tol: float = 1e-7
    activation: str = field(default="tanh")

    def __post_init__(self):
        object.__setattr__(self, "hidden_sizes", tuple(int(h) for h in self.hidden_sizes))
        if not self.hidden_sizes or min(self.hidden_sizes) < 1:
            raise ValueError("hidden_sizes must be nonempty with every size >= 1")
        if self.activation != "tanh":
            raise ValueError("only tanh activation is supported")
        if self.max_epochs < 0 or self.learning_rate <= 0:
            raise ValueError("max_epochs must be >= 0 and learning_rate > 0")


def _scale(a, axis=0):
    mu = a.mean(axis=axis)
    # Exact centre for constant columns so constant targets reproduce exactly.
    mu = np.where(np.ptp(a, axis=axis) == 0, np.take(a, 0, axis=axis), mu)
    sd = a.std(axis=axis)
    # Near-constant columns are only centred; dividing by rounding noise
    # would amplify it.
    sd = np.where(sd > 1e-12 * np.maximum(1.0, np.abs(mu)), sd, 1.0)
    return mu, sd


def forward(weights, X):
    """Return output and the per-layer activations (input first)."""
    *hidden, v, c, u = weights
    acts = [X]
    a = X
    for W, b in zip(hidden[0::2], hidden[1::2]):
        a = np.tanh(a @ W + b)
        acts.append(a)
    return a @ v + c + X @ u, acts


def loss_and_grad(weights, X, y):
    """Mean squared error and its gradient with respect to every weight array."""
    out, acts = forward(weights, X)
    n = X.shape[0]
    err = out - y
    loss = float(np.mean(err * err))
    dout = 2.0 * err / n
    *hidden, v, c, u = weights
    grads_hidden = []
    delta = np.outer(dout, v)
    for layer in range(len(hidden) // 2 - 1, -1, -1):
        W = hidden[2 * layer]
        a_out = acts[layer + 1]
        dz = delta * (1.0 - a_out * a_out)
        grads_hidden = [acts[layer].T @ dz, dz.sum(axis=0)] + grads_hidden
        delta = dz @ W.T
    grads = grads_hidden + [acts[-1].T @ dout, np.array(dout.sum()), X.T @ dout]
    return loss, grads


def init_weights(n_in, hidden_sizes, rng, Xs=None, ys=None):
    weights = []
    fan_in = n_in
    for h in hidden_sizes:
        weights.append(rng.uniform(-0.5, 0.5, size=(fan_in, h)) / np.sqrt(fan_in))
        weights.append(rng.uniform(-0.5, 0.5, size=h) / np.sqrt(fan_in))
        fan_in = h
    weights.append(np.zeros(fan_in))
    if Xs is None:
        weights += [np.array(0.0), np.zeros(n_in)]
    else:
        w = solve_least_squares(Xs, ys)
        weights += [np.array(w[-1]), w[:-1].copy()]
    return weights


class MlpRegressor:
    backend = "mlp"

    def __init__(self, weights, x_mean, x_scale, y_mean, y_scale, params: MlpParams,
                 seed: int = 1, loss_history=()):
        self.weights = [np.asarray(w, dtype=float) for w in weights]
        self.x_mean = np.asarray(x_mean, dtype=float)
        self.x_scale = np.asarray(x_scale, dtype=float)
        self.y_mean = float(y_mean)
        self.y_scale = float(y_scale)
        self.params = params
        self.seed = seed
        self.loss_history = list(loss_history)

    @property
    def n_features(self) -> int:
        return self.x_mean.size

    def predict_many(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != self.n_features:
            raise DimensionMismatch(f"expected (*, {self.n_features}) features, got {X.shape}")
        out, _ = forward(self.weights, (X - self.x_mean) / self.x_scale)
        return out * self.y_scale + self.y_mean

    def predict(self, x) -> float:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n_features,):
            raise DimensionMismatch(f"expected {self.n_features} features, got {x.shape}")
        return float(self.predict_many(x[None, :])[0])

    def to_dict(self) -> dict:
        p = asdict(self.params)
        p["hidden_sizes"] = list(p["hidden_sizes"])
        return {
            "weights": [np.asarray(w).tolist() for w in self.weights],
            "x_mean": self.x_mean.tolist(),
            "x_scale": self.x_scale.tolist(),
            "y_mean": self.y_mean,
            "y_scale": self.y_scale,
            "params": p,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MlpRegressor":
        return cls(d["weights"], d["x_mean"], d["x_scale"], d["y_mean"], d["y_scale"],
                   MlpParams(**d["params"]), d["seed"])


def fit_mlp(X, y, params: MlpParams | None = None, seed: int = 1) -> MlpRegressor:
    """Train with heavy-ball gradient descent.

    A step that raises the loss by more than 5% (or goes non-finite) is
    rejected and the learning rate halved. When the loss improves by less
    than ``tol`` over 50 epochs the rate is halved, at most three times,
    after which training stops. The best weights seen are returned.
    """
    params = params or MlpParams()
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.shape[0] < 2 or X.shape[0] != y.shape[0]:
        raise EmptyData(f"need at least 2 matching rows, got {X.shape[0]} and {y.shape[0]}")
    x_mean, x_scale = _scale(X)
    y_mean, y_scale = _scale(y)
    Xs = (X - x_mean) / x_scale
    ys = (y - y_mean) / y_scale

    rng = np.random.default_rng(seed)
    weights = init_weights(X.shape[1], params.hidden_sizes, rng, Xs, ys)
    loss, grads = loss_and_grad(weights, Xs, ys)
    if not np.isfinite(loss):
        raise NonFinite("initial loss is not finite")
    best, best_loss = [w.copy() for w in weights], loss
    velocity = [np.zeros_like(w) for w in weights]
    lr = params.learning_rate
    history = [loss]
    decays = 0
    for _ in range(params.max_epochs):
        velocity = [MOMENTUM * vel - lr * g for vel, g in zip(velocity, grads)]
        trial = [w + vel for w, vel in zip(weights, velocity)]
        trial_loss, trial_grads = loss_and_grad(trial, Xs, ys)
        if not np.isfinite(trial_loss) or trial_loss > 1.05 * loss:
            lr *= 0.5
            velocity = [np.zeros_like(w) for w in weights]
            if lr < params.learning_rate * MIN_LR_FRACTION:
                if not np.isfinite(best_loss):
                    raise NonFinite("loss diverged and learning-rate decay is exhausted")
                break
            continue
        weights, loss, grads = trial, trial_loss, trial_grads
        history.append(loss)
        if loss < best_loss:
            best, best_loss = [w.copy() for w in weights], loss
        if len(history) > PLATEAU_EPOCHS and history[-PLATEAU_EPOCHS - 1] - loss < params.tol:
            if decays >= MAX_PLATEAU_DECAYS:
                break
            decays += 1
            lr *= 0.5
            history = [loss]
    return MlpRegressor(best, x_mean, x_scale, y_mean, y_scale, params, seed, history)
