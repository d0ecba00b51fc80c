"""End-to-end fitting function: 0-1 scaling, trend removal, LRF, regressor.

Training runs the layers forward on the training window and fits the
regressor on one-step-ahead targets in the transformed space. Forecasting
rolls one step at a time: encode the window tail, predict, append the
prediction to the transformed window, and map it back through the inverse
trend and inverse scaling.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import DegenerateRange, FormatError, NonFinitePrediction, TooShort
from .lrf import LrfModel, encode, encode_training_set, fit_lrf
from .regress import BACKENDS, GbtParams, MlpParams, fit_regressor, regressor_from_dict
from .series import NormParams, Series, normalize_01
from .stationary import (
    DENOM_FLOOR, IDENTITY, Branch, StationaryModel, apply_stationary, fit_stationary,
)

FORMAT_NAME = "lrfnet-pipeline"
FORMAT_VERSION = 1


@dataclass(frozen=True)
class PipelineConfig:
    m: int = 4
    backend: str = "mlp"
    gbt: GbtParams = field(default_factory=GbtParams)
    mlp: MlpParams = field(default_factory=MlpParams)
    use_st: bool = True
    seed: int = 1
    window_n: int | None = None
    ridge_lambda: float = 0.0

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("m must be >= 1")
        if self.backend not in BACKENDS:
            raise ValueError(f"unknown backend {self.backend!r}; expected one of {BACKENDS}")
        if self.window_n is not None and self.window_n < 2 * self.m + 3:
            raise ValueError(f"window_n must be >= {2 * self.m + 3} for m={self.m}")

    @property
    def backend_params(self):
        return {"gbt": self.gbt, "mlp": self.mlp}.get(self.backend)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["mlp"]["hidden_sizes"] = list(d["mlp"]["hidden_sizes"])
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "PipelineConfig":
        d = dict(d)
        d["gbt"] = GbtParams(**d["gbt"])
        d["mlp"] = MlpParams(**d["mlp"])
        return cls(**d)


@dataclass(frozen=True, eq=False)
class FittedPipeline:
    config: PipelineConfig
    norm: NormParams | None  # None: constant training window, scaling bypassed
    st: StationaryModel
    lrf: LrfModel
    reg: object
    train_tail: Series

    def _to_unit(self, ys):
        if self.norm is None:
            return np.asarray(ys, dtype=float)
        return (np.asarray(ys, dtype=float) - self.norm.y_min) / self.norm.span

    def _from_unit(self, zs):
        if self.norm is None:
            return zs
        return zs * self.norm.span + self.norm.y_min

    def transformed_window(self) -> Series:
        z = self.train_tail.with_values(self._to_unit(self.train_tail.ys))
        return apply_stationary(self.st, z)

    def _invert(self, s_vals, g):
        z = s_vals if self.st.branch is Branch.IDENTITY else s_vals * g - 1.0
        return self._from_unit(z)


def train(s: Series, cfg: PipelineConfig | None = None) -> FittedPipeline:
    cfg = cfg or PipelineConfig()
    window_n = cfg.window_n or len(s)
    if window_n < 2 * cfg.m + 3:
        raise TooShort(f"training needs at least {2 * cfg.m + 3} samples for m={cfg.m}, got {window_n}")
    if len(s) < window_n:
        raise TooShort(f"series has {len(s)} samples, window needs {window_n}")
    tail = s[len(s) - window_n:]
    try:
        z, norm = normalize_01(tail)
    except DegenerateRange:
        z, norm = tail, None
    st = fit_stationary(z) if cfg.use_st else IDENTITY
    S = apply_stationary(st, z)
    lrf = fit_lrf(S, cfg.m, cfg.ridge_lambda)
    F, T = encode_training_set(lrf, S)
    reg = fit_regressor(cfg.backend, F, T, cfg.backend_params, cfg.seed)
    return FittedPipeline(cfg, norm, st, lrf, reg, tail)


def future_grid(p: FittedPipeline, horizon: int) -> np.ndarray:
    tail = p.train_tail
    return tail.xs[-1] + tail.step * np.arange(1, horizon + 1)


def generalize(p: FittedPipeline, horizon: int) -> Series:
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    xs = future_grid(p, horizon)
    g = p.st.trend(xs)
    S = p.transformed_window().ys
    n = S.size
    buf = np.empty(n + horizon)
    buf[:n] = S
    for k in range(horizon):
        pos = n + k - 1
        v = encode(p.lrf, buf[: pos + 1], pos).values
        buf[pos + 1] = p.reg.predict(v)
        if not np.isfinite(buf[pos + 1]):
            raise NonFinitePrediction(k + 1)
    if p.st.branch is not Branch.IDENTITY and np.any(~(g > DENOM_FLOOR)):
        bad = int(np.flatnonzero(~(g > DENOM_FLOOR))[0]) + 1
        raise NonFinitePrediction(bad, f"trend denominator not positive at step {bad}")
    ys = p._invert(buf[n:], g)
    bad = np.flatnonzero(~np.isfinite(ys))
    if bad.size:
        raise NonFinitePrediction(int(bad[0]) + 1)
    return Series(xs, ys)


def fitted_values(p: FittedPipeline) -> Series:
    """In-sample one-step-ahead predictions in original units."""
    S = p.transformed_window()
    F, _ = encode_training_set(p.lrf, S)
    pred = p.reg.predict_many(F)
    xs = p.train_tail.xs[p.lrf.first_position() + 1:]
    return Series(xs, p._invert(pred, p.st.trend(xs)))


# -- persistence -------------------------------------------------------------

def to_dict(p: FittedPipeline) -> dict:
    return {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "config": p.config.to_dict(),
        "norm": None if p.norm is None else {"y_min": p.norm.y_min, "y_max": p.norm.y_max},
        "stationary": p.st.to_dict(),
        "lrf": p.lrf.to_dict(),
        "regressor": {"backend": p.reg.backend, "state": p.reg.to_dict()},
        "train_tail": {"xs": p.train_tail.xs.tolist(), "ys": p.train_tail.ys.tolist()},
    }


def dumps(p: FittedPipeline) -> str:
    return json.dumps(to_dict(p), sort_keys=True, allow_nan=True) + "\n"


def save(p: FittedPipeline, sink) -> None:
    """Write to a path or a text file object."""
    text = dumps(p)
    if hasattr(sink, "write"):
        sink.write(text)
    else:
        with open(sink, "w", encoding="utf-8") as fh:
            fh.write(text)


def _section(doc, key, builder):
    if key not in doc:
        raise FormatError(key, "missing field")
    try:
        return builder(doc[key])
    except FormatError as exc:
        raise FormatError(f"{key}.{exc.path}" if exc.path else key, str(exc)) from None
    except KeyError as exc:
        raise FormatError(f"{key}.{exc.args[0]}", "missing field") from None
    except (TypeError, ValueError, AttributeError, IndexError) as exc:
        raise FormatError(key, f"invalid value ({exc})") from None


def _regressor(d):
    if "backend" not in d:
        raise KeyError("backend")
    return regressor_from_dict(d["backend"], d["state"])


def from_dict(doc) -> FittedPipeline:
    if not isinstance(doc, dict):
        raise FormatError("", "top level must be a JSON object")
    if doc.get("format") != FORMAT_NAME:
        raise FormatError("format", f"expected {FORMAT_NAME!r}, found {doc.get('format')!r}")
    if doc.get("version") != FORMAT_VERSION:
        raise FormatError("version", f"unsupported version {doc.get('version')!r}")
    config = _section(doc, "config", PipelineConfig.from_dict)
    norm = _section(doc, "norm", lambda d: None if d is None else NormParams(d["y_min"], d["y_max"]))
    st = _section(doc, "stationary", StationaryModel.from_dict)
    lrf = _section(doc, "lrf", LrfModel.from_dict)
    reg = _section(doc, "regressor", _regressor)
    tail = _section(doc, "train_tail", lambda d: Series(d["xs"], d["ys"]))
    if lrf.m != config.m:
        raise FormatError("lrf.m", f"does not match config.m ({config.m})")
    if reg.n_features != lrf.m:
        raise FormatError("regressor.state", f"expects {reg.n_features} features, LRF gives {lrf.m}")
    return FittedPipeline(config, norm, st, lrf, reg, tail)


def loads(text: str) -> FittedPipeline:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError("", f"not valid JSON ({exc})") from None
    return from_dict(doc)


def load(source) -> FittedPipeline:
    """Read from a path or a text file object."""
    if hasattr(source, "read"):
        return loads(source.read())
    with open(source, encoding="utf-8") as fh:
        return loads(fh.read())
