"""Command-line entry point: synth, fit, predict, bench, eval.

Exit codes: 0 success, 1 runtime or scenario failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
from pathlib import Path

import numpy as np

from . import bench
from .errors import LrfNetError
from .pipeline import PipelineConfig, fitted_values, generalize, load, save, train
from .regress import BACKENDS
from .series import mae, mse

DEFAULT_SEED = 1


def _g(v) -> str:
    return "nan" if v is None else f"{v:.6g}"


def positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def _column(text: str):
    return int(text) if text.lstrip("-").isdigit() else text


def _segments(text: str):
    out = []
    for part in text.split(","):
        try:
            a, b = (int(v) for v in part.split(":"))
        except ValueError:
            raise argparse.ArgumentTypeError(f"segment {part!r} is not START:END") from None
        if not 1 <= a <= b:
            raise argparse.ArgumentTypeError(f"segment {part!r} must satisfy 1 <= START <= END")
        out.append((a, b))
    return out


def _open_out(path):
    if path is None or path == "-":
        return sys.stdout, False
    return open(path, "w", encoding="utf-8", newline=""), True


# -- subcommands -------------------------------------------------------------

def cmd_synth(args) -> int:
    s = bench.gen_function(args.fn, bench.grid(args.start, args.step, args.end))
    fh, close = _open_out(args.out)
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("x", "y"))
        for x, y in zip(s.xs, s.ys):
            w.writerow((repr(float(x)), repr(float(y))))
    finally:
        if close:
            fh.close()
    if args.out not in (None, "-"):
        print(f"wrote {len(s)} rows of {args.fn} to {args.out}")
    return 0


def cmd_fit(args) -> int:
    s = bench.load_csv(args.input, args.column, args.header)
    cfg = PipelineConfig(m=args.m, backend=args.backend, use_st=not args.no_st,
                         seed=args.seed, window_n=args.window_n)
    p = train(s, cfg)
    save(p, args.model_out)
    fv = fitted_values(p)
    actual = p.train_tail.ys[-len(fv):]
    print(f"seed: {args.seed}")
    print(f"backend: {args.backend}  m: {args.m}  stationary: {p.st.branch.value}")
    print(f"in-sample MAE: {_g(mae(fv.ys, actual))}")
    print(f"model written to {args.model_out}")
    return 0


def cmd_predict(args) -> int:
    p = load(args.model)
    out = generalize(p, args.horizon)
    fh, close = _open_out(args.out)
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("x", "y_pred"))
        for x, y in zip(out.xs, out.ys):
            w.writerow((repr(float(x)), repr(float(y))))
    finally:
        if close:
            fh.close()
    if args.plot_data:
        tail = p.train_tail
        fv = fitted_values(p)
        fitted = np.full(len(tail), np.nan)
        fitted[len(tail) - len(fv):] = fv.ys
        bench.write_plot_rows(
            args.plot_data,
            np.concatenate([tail.xs, out.xs]),
            np.concatenate([tail.ys, np.full(len(out), np.nan)]),
            np.concatenate([fitted, out.ys]),
            ["train"] * len(tail) + ["forecast"] * len(out),
        )
    if args.out not in (None, "-"):
        print(f"seed: {p.config.seed}")
        print(f"wrote {len(out)} forecast rows to {args.out}")
    return 0


def cmd_bench(args) -> int:
    overrides = {}
    if args.backend is not None:
        overrides["backend"] = args.backend
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.m is not None:
        overrides["m"] = args.m
    if args.no_st:
        overrides["use_st"] = False
    base = PipelineConfig.from_dict({**PipelineConfig().to_dict(), **overrides})
    if args.suite == "math":
        specs = bench.math_suite(base)
    elif args.suite == "short":
        specs = bench.short_suite(base)
    else:
        specs = bench.load_suite_file(args.suite, PipelineConfig(), overrides)
    report = bench.run_suite(specs)
    if args.report:
        bench.emit_report(report, args.format, args.report)
    if args.plot_dir:
        Path(args.plot_dir).mkdir(parents=True, exist_ok=True)
        for r in report.results:
            if not r.failed:
                bench.emit_plot_data(r, Path(args.plot_dir) / f"{r.scenario}.csv")
    header = f"{'scenario':<14}{'backend':<8}{'seed':>5}  {'mae_1_500':>12}{'mae_501_1000':>14}" \
             f"{'mse':>12}{'mse_persist':>13}{'wall_s':>9}  status"
    print(header)
    for r in report.results:
        print(f"{r.scenario:<14}{r.backend:<8}{r.seed:>5}  {_g(r.segment_mae.get('1-500')):>12}"
              f"{_g(r.segment_mae.get('501-1000')):>14}{_g(r.mse):>12}{_g(r.mse_persistence):>13}"
              f"{r.wall_s:>9.3g}  {r.status if not r.failed else 'FAILED: ' + str(r.error)}")
    return 1 if report.any_failed else 0


def _read_values(path) -> np.ndarray:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    if not rows:
        raise ValueError(f"{path}: no data")
    try:
        float(rows[0][-1])
    except ValueError:
        rows = rows[1:]
    try:
        return np.array([float(r[-1]) for r in rows])
    except ValueError as exc:
        raise ValueError(f"{path}: {exc}") from None


def cmd_eval(args) -> int:
    pred = _read_values(args.pred)
    actual = _read_values(args.actual)
    if pred.size != actual.size:
        raise ValueError(f"length mismatch: {pred.size} predictions vs {actual.size} actuals")
    segments = args.segments or [(1, pred.size)]
    print(f"{'segment':<14}{'mae':>14}{'mse':>14}")
    for a, b in segments:
        if b > pred.size:
            raise ValueError(f"segment {a}:{b} exceeds series length {pred.size}")
        sl = slice(a - 1, b)
        print(f"{f'{a}-{b}':<14}{_g(mae(pred[sl], actual[sl])):>14}{_g(mse(pred[sl], actual[sl])):>14}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lrfnet", description="Linear-regression-feature forecasting toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="write a synthetic test function as CSV")
    p.add_argument("--fn", required=True, choices=sorted(bench.FUNCTIONS), help="function name")
    p.add_argument("--start", type=float, required=True, help="first grid point")
    p.add_argument("--step", type=float, required=True, help="grid spacing (> 0)")
    p.add_argument("--end", type=float, required=True, help="last grid point (inclusive)")
    p.add_argument("--out", help="output CSV path (default: stdout)")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("fit", help="train a pipeline on one CSV column and save it")
    p.add_argument("--input", required=True, help="input CSV file")
    p.add_argument("--column", type=_column, default=0,
                   help="0-based column index or header name (default 0)")
    p.add_argument("--header", action="store_true", help="first row is a header")
    p.add_argument("--m", type=positive_int, default=4, help="LRF dimensions (default 4)")
    p.add_argument("--backend", choices=BACKENDS, default="mlp", help="fine-tune regressor")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED, help="random seed (default 1)")
    p.add_argument("--no-st", action="store_true", help="disable the stationary transform")
    p.add_argument("--window-n", type=positive_int, default=None,
                   help="train on the last N samples only (default: all)")
    p.add_argument("--model-out", required=True, help="path for the saved model")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("predict", help="roll a saved model forward")
    p.add_argument("--model", required=True, help="model file written by fit")
    p.add_argument("--horizon", type=positive_int, required=True, help="forecast steps")
    p.add_argument("--out", help="forecast CSV path (default: stdout)")
    p.add_argument("--plot-data", help="also write x/actual/predicted/split columns here")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("bench", help="run a benchmark suite and write a report")
    p.add_argument("--suite", required=True,
                   help="'math' (long-horizon f1-f6), 'short' (672/67 synthetic) or a JSON file")
    p.add_argument("--backend", choices=BACKENDS, default=None, help="regressor (default mlp)")
    p.add_argument("--seed", type=int, default=None, help="random seed (default 1)")
    p.add_argument("--m", type=positive_int, default=None, help="LRF dimensions (default 4)")
    p.add_argument("--no-st", action="store_true", help="disable the stationary transform")
    p.add_argument("--report", help="report output path")
    p.add_argument("--format", choices=("json", "csv"), default="json",
                   help="report format: JSON lines or CSV (default json)")
    p.add_argument("--plot-dir", help="directory for per-scenario plot data CSVs")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("eval", help="score predictions against actuals per segment")
    p.add_argument("--pred", required=True, help="CSV whose last column holds predictions")
    p.add_argument("--actual", required=True, help="CSV whose last column holds actual values")
    p.add_argument("--segments", type=_segments, default=None,
                   help="1-based inclusive ranges, e.g. 1:500,501:1000 (default: whole series)")
    p.set_defaults(func=cmd_eval)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "seed", None) is None and args.command == "bench":
        print(f"seed: {DEFAULT_SEED} (default)")
    try:
        return args.func(args)
    except (LrfNetError, OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
