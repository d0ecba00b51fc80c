"""Benchmark harness for long-horizon and short-horizon forecasting scenarios.

Long-term scenarios train on a grid prefix and roll the forecast forward
(1000 steps by default), scoring MAE per step segment. Short-term scenarios
train on a 672-sample window and score MSE over the next 67 samples,
alongside a persistence (repeat-last-value) baseline. All metrics are in
the series' original units and computed against ground truth.
"""

from __future__ import annotations

import csv
import datetime as _dt
import io
import json
import math
import time
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable

import numpy as np

from . import __version__
from .errors import DomainError, EmptyColumn, ParseError, UnknownFunction
from .pipeline import PipelineConfig, fitted_values, generalize, train
from .series import Series, mae, mse

PI = math.pi

FUNCTIONS: dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "f1": lambda x: x**3 + 3 * x**2 - 10 * x,
    "f2": lambda x: x**10,
    "f3": lambda x: x**-3.0,
    "f4": np.exp,
    "f5": lambda x: np.sin(0.001 * x * PI + 0.5 * PI) + 2 * np.cos(0.002 * x * PI + 0.1 * PI),
    "f6": lambda x: (np.sin(0.001 * x * PI + 0.5 * PI)
                     + 2 * np.cos(0.002 * x * PI + 0.1 * PI + 0.001 * x * PI)),
}

CSV_HEADER = ("scenario", "backend", "seed", "mae_1_500", "mae_501_1000", "mse_short", "wall_s")
LONG_SEGMENTS = ((1, 500), (501, 1000))
SHORT_WINDOW = 672
SHORT_HORIZON = 67


def grid(start: float, step: float, end: float) -> np.ndarray:
    """Inclusive grid ``start, start+step, .., end`` built from integer multiples."""
    if step <= 0 or end < start:
        raise ValueError(f"bad grid range start={start} step={step} end={end}")
    count = int(math.floor((end - start) / step + 1e-9)) + 1
    return start + step * np.arange(count)


def gen_function(name: str, xs) -> Series:
    try:
        fn = FUNCTIONS[name]
    except KeyError:
        raise UnknownFunction(f"unknown function {name!r}; expected one of {sorted(FUNCTIONS)}") from None
    xs = np.asarray(xs, dtype=float)
    if name == "f3" and np.any(xs == 0):
        raise DomainError("f3 is undefined at x = 0")
    return Series(xs, fn(xs))


def load_csv(path, column=0, header: bool = False) -> Series:
    """Read one column of a comma-separated file onto the grid 1..N.

    ``column`` is a 0-based index or a header name (a name implies a header
    row). Row numbers in errors are 1-based file lines.
    """
    if isinstance(column, str) and not column.lstrip("-").isdigit():
        header = True
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    start = 0
    col = column
    if header:
        if not rows:
            raise EmptyColumn(f"{path}: file is empty")
        names = [h.strip() for h in rows[0]]
        if isinstance(column, str) and not column.lstrip("-").isdigit():
            if column not in names:
                raise ParseError(1, column, f"no column named {column!r}")
            col = names.index(column)
        start = 1
    col = int(col)
    values = []
    for lineno, row in enumerate(rows[start:], start + 1):
        if not row or all(not c.strip() for c in row):
            continue
        if col >= len(row) or col < -len(row):
            raise ParseError(lineno, col + 1, "column missing")
        cell = row[col].strip()
        try:
            v = float(cell)
        except ValueError:
            raise ParseError(lineno, col + 1, f"cannot parse {cell!r} as a number") from None
        if not math.isfinite(v):
            raise ParseError(lineno, col + 1, f"non-finite value {cell!r}")
        values.append(v)
    if not values:
        raise EmptyColumn(f"{path}: column {column!r} has no data rows")
    return Series.from_values(values)


# -- scenarios ---------------------------------------------------------------

@dataclass(frozen=True)
class GridRange:
    start: float
    step: float
    end: float

    def xs(self) -> np.ndarray:
        return grid(self.start, self.step, self.end)


@dataclass(frozen=True)
class CsvSource:
    path: str
    column: object = 0
    header: bool = False


@dataclass(frozen=True)
class ScenarioSpec:
    """One benchmark run.

    ``source`` is a builtin function name or a :class:`CsvSource`. For
    builtin sources ``test_range`` is the full ground-truth grid and
    ``train_range`` its training prefix; for CSV sources ranges may be
    sample counts (``train_range`` samples to train on).
    """

    name: str
    source: object
    protocol: str = "long"
    train_range: object = None
    test_range: object = None
    horizon: int = 1000
    segments: tuple = LONG_SEGMENTS
    config: PipelineConfig = field(default_factory=PipelineConfig)

    def __post_init__(self):
        if self.protocol not in ("long", "short"):
            raise ValueError(f"protocol must be 'long' or 'short', got {self.protocol!r}")
        if self.horizon < 1:
            raise ValueError("horizon must be >= 1")
        for a, b in self.segments:
            if not 1 <= a <= b <= self.horizon:
                raise ValueError(f"segment {a}-{b} lies outside the horizon 1-{self.horizon}")


@dataclass
class Forecast:
    values: np.ndarray
    fitted: Series | None = None
    branch: str | None = None


def pipeline_forecaster(train_series: Series, future_xs: np.ndarray, config: PipelineConfig) -> Forecast:
    p = train(train_series, config)
    out = generalize(p, future_xs.size)
    return Forecast(out.ys, fitted_values(p), p.st.branch.value)


@dataclass
class ScenarioResult:
    scenario: str
    backend: str
    seed: int
    protocol: str
    status: str = "ok"
    error: str | None = None
    segment_mae: dict = field(default_factory=dict)
    mse: float | None = None
    mse_persistence: float | None = None
    wall_s: float = 0.0
    branch: str | None = None
    train: Series | None = None
    truth: Series | None = None
    predicted: np.ndarray | None = None
    fitted: Series | None = None

    @property
    def failed(self) -> bool:
        return self.status != "ok"


def resolve_series(spec: ScenarioSpec) -> tuple[Series, Series]:
    """Split the scenario's source into (training series, ground-truth continuation)."""
    if isinstance(spec.source, CsvSource):
        full = load_csv(spec.source.path, spec.source.column, spec.source.header)
    else:
        if not isinstance(spec.test_range, GridRange):
            raise ValueError(f"builtin source {spec.source!r} needs a grid test_range")
        full = gen_function(spec.source, spec.test_range.xs())
    n_total = len(full)
    tr = spec.train_range
    if isinstance(tr, GridRange):
        txs = tr.xs()
        if txs.size >= n_total or not np.allclose(txs, full.xs[: txs.size], rtol=0, atol=1e-9):
            raise ValueError("test range must strictly extend the training range")
        n_train = txs.size
    elif tr is None:
        n_train = SHORT_WINDOW if spec.protocol == "short" else n_total - spec.horizon
    else:
        n_train = int(tr)
    h = spec.horizon
    if spec.protocol == "short":
        if n_total < n_train + h:
            raise ValueError(f"need {n_train + h} samples for the short protocol, have {n_total}")
        lo = n_total - n_train - h
        return full[lo : lo + n_train], full[lo + n_train :]
    if n_train < 1 or n_train + h > n_total:
        raise ValueError(f"need {n_train + h} samples for training plus horizon, have {n_total}")
    return full[:n_train], full[n_train : n_train + h]


def run_scenario(spec: ScenarioSpec, forecaster=pipeline_forecaster) -> ScenarioResult:
    cfg = spec.config
    res = ScenarioResult(spec.name, cfg.backend, cfg.seed, spec.protocol)
    t0 = time.perf_counter()
    try:
        train_s, truth = resolve_series(spec)
        res.train, res.truth = train_s, truth
        fc = forecaster(train_s, truth.xs.copy(), cfg)
        if not isinstance(fc, Forecast):
            fc = Forecast(np.asarray(fc, dtype=float))
        pred = np.asarray(fc.values, dtype=float)
        if pred.shape != truth.ys.shape:
            raise ValueError(f"forecaster returned {pred.size} values, expected {len(truth)}")
        if not np.all(np.isfinite(pred)):
            raise FloatingPointError("forecast contains non-finite values")
        res.predicted, res.fitted, res.branch = pred, fc.fitted, fc.branch
        res.segment_mae = {f"{a}-{b}": mae(pred[a - 1 : b], truth.ys[a - 1 : b])
                           for a, b in spec.segments}
        res.mse = mse(pred, truth.ys)
        res.mse_persistence = mse(np.full(len(truth), train_s.ys[-1]), truth.ys)
    except Exception as exc:  # one failing scenario must not abort the suite
        res.status = "failed"
        res.error = f"{type(exc).__name__}: {exc}"
    res.wall_s = time.perf_counter() - t0
    return res


def run_long_term(spec: ScenarioSpec, forecaster=pipeline_forecaster) -> ScenarioResult:
    if spec.protocol != "long":
        spec = replace(spec, protocol="long")
    return run_scenario(spec, forecaster)


def run_short_term(spec: ScenarioSpec, forecaster=pipeline_forecaster) -> ScenarioResult:
    if spec.protocol != "short":
        spec = replace(spec, protocol="short")
    return run_scenario(spec, forecaster)


# -- suites ------------------------------------------------------------------

PAPER_GRIDS = {
    "f1": (GridRange(1, 0.01, 10), GridRange(1, 0.01, 20)),
    "f2": (GridRange(1, 0.01, 10), GridRange(1, 0.01, 20)),
    "f3": (GridRange(1, 0.01, 10), GridRange(1, 0.01, 20)),
    "f4": (GridRange(1, 0.01, 10), GridRange(1, 0.01, 20)),
    "f5": (GridRange(0, 1, 3050), GridRange(0, 1, 4050)),
    "f6": (GridRange(0, 1, 3050), GridRange(0, 1, 4050)),
}


def math_suite(config: PipelineConfig | None = None) -> list[ScenarioSpec]:
    """The six synthetic long-horizon scenarios on their reference grids."""
    config = config or PipelineConfig()
    return [ScenarioSpec(name, name, "long", tr, te, 1000, LONG_SEGMENTS, config)
            for name, (tr, te) in PAPER_GRIDS.items()]


def short_suite(config: PipelineConfig | None = None) -> list[ScenarioSpec]:
    """672-in / 67-out runs on 739-sample synthetic periodic series."""
    config = config or PipelineConfig()
    n = SHORT_WINDOW + SHORT_HORIZON
    return [ScenarioSpec(f"{name}_short", name, "short", SHORT_WINDOW, GridRange(0, 1, n - 1),
                         SHORT_HORIZON, ((1, SHORT_HORIZON),), config)
            for name in ("f5", "f6")]


def _range_from_json(v):
    if v is None or isinstance(v, int):
        return v
    if isinstance(v, dict):
        return GridRange(float(v["start"]), float(v["step"]), float(v["end"]))
    raise ValueError(f"range must be an integer count or {{start, step, end}}, got {v!r}")


def load_suite_file(path, base_config: PipelineConfig | None = None,
                    overrides: dict | None = None) -> list[ScenarioSpec]:
    """Parse a JSON scenario file.

    Layout: ``{"defaults": {...config...}, "scenarios": [{"name", "source",
    "protocol", "train", "test", "horizon", "segments", "config"}]}`` where
    ``source`` is ``{"builtin": "f5"}`` or ``{"csv": path, "column": .., "header": ..}``.
    Relative CSV paths resolve against the scenario file. ``overrides`` (from
    the command line) win over file values.
    """
    path = Path(path)
    doc = json.loads(path.read_text(encoding="utf-8"))
    base = (base_config or PipelineConfig()).to_dict()
    base.update(doc.get("defaults", {}))
    specs = []
    for i, sc in enumerate(doc["scenarios"]):
        cfg = dict(base)
        cfg.update(sc.get("config", {}))
        cfg.update(overrides or {})
        src = sc["source"]
        if "builtin" in src:
            source = src["builtin"]
        else:
            p = Path(src["csv"])
            source = CsvSource(str(p if p.is_absolute() else path.parent / p),
                               src.get("column", 0), bool(src.get("header", False)))
        protocol = sc.get("protocol", "long")
        default_h = SHORT_HORIZON if protocol == "short" else 1000
        horizon = int(sc.get("horizon", default_h))
        default_segments = LONG_SEGMENTS if protocol == "long" and horizon >= 1000 else ((1, horizon),)
        segments = tuple(tuple(s) for s in sc.get("segments", default_segments))
        specs.append(ScenarioSpec(sc.get("name", f"scenario_{i + 1}"), source, protocol,
                                  _range_from_json(sc.get("train")), _range_from_json(sc.get("test")),
                                  horizon, segments, PipelineConfig.from_dict(cfg)))
    return specs


# -- reports -----------------------------------------------------------------

@dataclass
class BenchmarkReport:
    results: list
    metadata: dict = field(default_factory=dict)

    @property
    def any_failed(self) -> bool:
        return any(r.failed for r in self.results)


def run_suite(specs, forecaster=pipeline_forecaster, metadata: dict | None = None) -> BenchmarkReport:
    results = [run_scenario(s, forecaster) for s in specs]
    meta = {
        "tool": "lrfnet",
        "version": __version__,
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
        "units": "original (metrics computed after inverting scaling and trend)",
        "scenarios": [
            {"name": s.name, "protocol": s.protocol, "horizon": s.horizon,
             "config": s.config.to_dict()} for s in specs
        ],
    }
    meta.update(metadata or {})
    return BenchmarkReport(results, meta)


def _row(r: ScenarioResult) -> dict:
    return {
        "scenario": r.scenario,
        "backend": r.backend,
        "seed": r.seed,
        "protocol": r.protocol,
        "status": r.status,
        "error": r.error,
        "branch": r.branch,
        "segment_mae": dict(r.segment_mae),
        "mae_1_500": r.segment_mae.get("1-500"),
        "mae_501_1000": r.segment_mae.get("501-1000"),
        "mse": r.mse,
        "mse_short": r.mse if r.protocol == "short" else None,
        "mse_persistence": r.mse_persistence,
        "wall_s": r.wall_s,
    }


def _csv_cell(r: ScenarioResult, key):
    row = _row(r)
    if key in ("mae_1_500", "mae_501_1000", "mse_short") and r.failed:
        return "failed"
    v = row[key]
    return "" if v is None else repr(v) if isinstance(v, float) else str(v)


def emit_report(report: BenchmarkReport, fmt: str = "json", sink=None) -> str:
    """Serialize the report; writes to ``sink`` (path or file object) when given."""
    buf = io.StringIO()
    if fmt in ("json", "jsonl", "json-lines"):
        buf.write(json.dumps({"record": "metadata", **report.metadata}) + "\n")
        for r in report.results:
            buf.write(json.dumps({"record": "scenario", **_row(r)}) + "\n")
    elif fmt == "csv":
        for key, value in report.metadata.items():
            if key != "scenarios":
                buf.write(f"# {key}: {value}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in report.results:
            w.writerow([_csv_cell(r, k) for k in CSV_HEADER])
    else:
        raise ValueError(f"unknown report format {fmt!r}")
    text = buf.getvalue()
    _write(sink, text)
    return text


def write_plot_rows(sink, xs, actual, predicted, split) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("x", "actual", "predicted", "split"))
    for row in zip(xs, actual, predicted, split):
        w.writerow(["" if v is None or (isinstance(v, float) and math.isnan(v)) else
                    repr(float(v)) if not isinstance(v, str) else v for v in row])
    text = buf.getvalue()
    _write(sink, text)
    return text


def emit_plot_data(result: ScenarioResult, sink=None) -> str:
    """Aligned columns (x, actual, predicted, split) over training and forecast steps.

    Training rows carry in-sample fitted values where available.
    """
    if result.train is None or result.predicted is None:
        raise ValueError(f"scenario {result.scenario!r} has no forecast to plot")
    tr = result.train
    fitted = np.full(len(tr), np.nan)
    if result.fitted is not None:
        idx = np.searchsorted(tr.xs, result.fitted.xs)
        fitted[idx] = result.fitted.ys
    xs = np.concatenate([tr.xs, result.truth.xs])
    actual = np.concatenate([tr.ys, result.truth.ys])
    pred = np.concatenate([fitted, result.predicted])
    split = ["train"] * len(tr) + ["test"] * len(result.truth)
    return write_plot_rows(sink, xs, actual, pred, split)


def _write(sink, text):
    if sink is None:
        return
    if hasattr(sink, "write"):
        sink.write(text)
    else:
        with open(sink, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
