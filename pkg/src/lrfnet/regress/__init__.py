"""Fine-tune regression backends sharing one fit/predict contract.

Every fitted regressor exposes ``predict(x) -> float``,
``predict_many(X) -> ndarray``, ``n_features``, ``seed`` and
``to_dict()`` / ``from_dict()``.
"""

from .gbt import GbtParams, GbtRegressor, fit_gbt
from .linear import LinearRegressor, fit_linear, solve_least_squares
from .mlp import MlpParams, MlpRegressor, fit_mlp

BACKENDS = ("linear", "gbt", "mlp")

_CLASSES = {"linear": LinearRegressor, "gbt": GbtRegressor, "mlp": MlpRegressor}


def fit_regressor(backend, X, y, params=None, seed=1):
    if backend == "linear":
        return fit_linear(X, y, seed=seed)
    if backend == "gbt":
        return fit_gbt(X, y, params, seed=seed)
    if backend == "mlp":
        return fit_mlp(X, y, params, seed=seed)
    raise ValueError(f"unknown backend {backend!r}; expected one of {BACKENDS}")


def regressor_from_dict(backend, d):
    try:
        cls = _CLASSES[backend]
    except KeyError:
        raise ValueError(f"unknown backend {backend!r}") from None
    return cls.from_dict(d)


def predict(reg, x) -> float:
    return reg.predict(x)


__all__ = [
    "BACKENDS", "GbtParams", "GbtRegressor", "LinearRegressor", "MlpParams", "MlpRegressor",
    "fit_gbt", "fit_linear", "fit_mlp", "fit_regressor", "predict", "regressor_from_dict",
    "solve_least_squares",
]
