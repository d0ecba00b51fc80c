import numpy as np
import pytest

from lrfnet.bench import FUNCTIONS, PAPER_GRIDS

ACCEPTANCE_LINES = []


def record(label, ok, detail=""):
    """Log one acceptance line for the terminal summary and return ``ok``."""
    line = f"{'PASS' if ok else 'FAIL'}  {label}" + (f"  ({detail})" if detail else "")
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def paper_grid(name):
    tr, te = PAPER_GRIDS[name]
    return tr.xs(), te.xs()


def normalized(ys):
    ys = np.asarray(ys, dtype=float)
    return (ys - ys.min()) / (ys.max() - ys.min())


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def fns():
    return FUNCTIONS


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE_LINES:
        terminalreporter.write_line(line)
