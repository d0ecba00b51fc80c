import csv

import pytest

from lrfnet.bench import CSV_HEADER
from lrfnet.cli import build_parser, main


def _rows(path):
    with open(path, newline="") as fh:
        return [r for r in csv.reader(fh) if r and not r[0].startswith("#")]


@pytest.fixture
def wave_csv(tmp_path):
    path = tmp_path / "wave.csv"
    assert main(["synth", "--fn", "f5", "--start", "0", "--step", "1", "--end", "399",
                 "--out", str(path)]) == 0
    return path


def test_synth_writes_grid(tmp_path):
    out = tmp_path / "f1.csv"
    assert main(["synth", "--fn", "f1", "--start", "1", "--step", "0.01", "--end", "10",
                 "--out", str(out)]) == 0
    rows = _rows(out)
    assert rows[0] == ["x", "y"] and len(rows) == 902


@pytest.mark.parametrize("argv", [
    ["synth", "--fn", "f9", "--start", "0", "--step", "1", "--end", "3"],
    ["fit", "--input", "x.csv", "--model-out", "m.json", "--m", "0"],
    ["predict", "--model", "m.json", "--horizon", "-3"],
    ["eval", "--pred", "a", "--actual", "b", "--segments", "5:2"],
    ["frobnicate"],
])
def test_usage_errors_exit_2(argv):
    with pytest.raises(SystemExit) as info:
        main(argv)
    assert info.value.code == 2


def test_help_lists_every_flag(capsys):
    parser = build_parser()
    sub = next(a for a in parser._actions if a.dest == "command")
    for name, p in sub.choices.items():
        with pytest.raises(SystemExit) as info:
            main([name, "--help"])
        assert info.value.code == 0
        text = capsys.readouterr().out
        for action in p._actions:
            for flag in action.option_strings:
                assert flag in text, (name, flag)


def test_missing_model_exits_1(tmp_path, capsys):
    assert main(["predict", "--model", str(tmp_path / "none.json"), "--horizon", "3"]) == 1
    assert "error" in capsys.readouterr().err


def test_constant_fit_has_zero_in_sample_error(tmp_path, capsys):
    data = tmp_path / "c.csv"
    data.write_text("5\n" * 30)
    model = tmp_path / "c.json"
    assert main(["fit", "--input", str(data), "--m", "2", "--model-out", str(model)]) == 0
    out = capsys.readouterr().out
    assert "seed: 1" in out and "in-sample MAE: 0\n" in out


def test_fit_is_reproducible_and_predict_rows(wave_csv, tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        assert main(["fit", "--input", str(wave_csv), "--header", "--column", "y",
                     "--model-out", str(path), "--seed", "7"]) == 0
    assert a.read_bytes() == b.read_bytes()
    pred, plot = tmp_path / "p.csv", tmp_path / "plot.csv"
    assert main(["predict", "--model", str(a), "--horizon", "10", "--out", str(pred),
                 "--plot-data", str(plot)]) == 0
    rows = _rows(pred)
    assert rows[0] == ["x", "y_pred"] and len(rows) == 11
    assert float(rows[1][0]) == 401.0
    assert len(_rows(plot)) == 1 + 400 + 10


def test_bench_math_report(tmp_path, capsys):
    reports = []
    for i in range(2):
        path = tmp_path / f"r{i}.csv"
        assert main(["bench", "--suite", "math", "--backend", "linear", "--format", "csv",
                     "--report", str(path), "--plot-dir", str(tmp_path / "plots")]) == 0
        reports.append(_rows(path))
    assert reports[0][0] == list(CSV_HEADER)
    assert [r[0] for r in reports[0][1:]] == ["f1", "f2", "f3", "f4", "f5", "f6"]
    strip = lambda rows: [r[:-1] for r in rows]  # wall time differs between runs
    assert strip(reports[0]) == strip(reports[1])
    assert len(list((tmp_path / "plots").glob("*.csv"))) == 6
    assert "seed: 1 (default)" in capsys.readouterr().out


def test_bench_failure_exits_1(tmp_path):
    suite = tmp_path / "s.json"
    suite.write_text('{"scenarios": [{"name": "gone", "source": {"csv": "missing.csv"},'
                     ' "protocol": "short", "train": 10, "horizon": 3}]}')
    assert main(["bench", "--suite", str(suite), "--report", str(tmp_path / "r.jsonl")]) == 1


def test_eval_identical_and_segments(tmp_path, capsys):
    pred = tmp_path / "p.csv"
    pred.write_text("x,y\n1,1\n2,2\n3,3\n4,5\n")
    actual = tmp_path / "a.csv"
    actual.write_text("1\n2\n3\n4\n")
    assert main(["eval", "--pred", str(actual), "--actual", str(actual)]) == 0
    assert capsys.readouterr().out.split("\n")[1].split() == ["1-4", "0", "0"]
    assert main(["eval", "--pred", str(pred), "--actual", str(actual),
                 "--segments", "1:3,4:4,1:4"]) == 0
    lines = capsys.readouterr().out.split("\n")
    assert lines[1].split() == ["1-3", "0", "0"]
    assert lines[2].split() == ["4-4", "1", "1"]
    assert lines[3].split() == ["1-4", "0.25", "0.25"]


def test_eval_length_mismatch_exits_1(tmp_path):
    a = tmp_path / "a.csv"
    a.write_text("1\n2\n")
    b = tmp_path / "b.csv"
    b.write_text("1\n")
    assert main(["eval", "--pred", str(a), "--actual", str(b)]) == 1
