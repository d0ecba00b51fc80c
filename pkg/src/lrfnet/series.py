"""Series container, 0-1 scaling, differencing and error metrics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateRange, LengthMismatch, TooShort


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=float).ravel()
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class Series:
    """Ordered samples ``ys`` over a strictly increasing index grid ``xs``."""

    xs: np.ndarray
    ys: np.ndarray

    def __post_init__(self):
        xs = _frozen(self.xs)
        ys = _frozen(self.ys)
        if xs.size == 0 or xs.size != ys.size:
            raise LengthMismatch(
                f"xs and ys must have equal nonzero length, got {xs.size} and {ys.size}"
            )
        if not (np.all(np.isfinite(xs)) and np.all(np.isfinite(ys))):
            raise ValueError("series values must be finite")
        if xs.size > 1 and not np.all(np.diff(xs) > 0):
            raise ValueError("xs must be strictly increasing")
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)

    @classmethod
    def from_values(cls, ys, start: float = 1.0, step: float = 1.0) -> "Series":
        """Wrap raw values on the default natural-number grid 1..n."""
        ys = np.asarray(ys, dtype=float)
        return cls(start + step * np.arange(ys.size), ys)

    def __len__(self) -> int:
        return self.ys.size

    def __getitem__(self, item) -> "Series":
        if not isinstance(item, slice):
            raise TypeError("Series supports slice indexing only")
        return Series(self.xs[item], self.ys[item])

    @property
    def step(self) -> float:
        """Mean grid spacing; 1.0 for a single sample."""
        if len(self) < 2:
            return 1.0
        return float((self.xs[-1] - self.xs[0]) / (len(self) - 1))

    def with_values(self, ys) -> "Series":
        return Series(self.xs, ys)


@dataclass(frozen=True)
class NormParams:
    y_min: float
    y_max: float

    def __post_init__(self):
        if not self.y_max > self.y_min:
            raise DegenerateRange(f"y_max ({self.y_max}) must exceed y_min ({self.y_min})")

    @property
    def span(self) -> float:
        return self.y_max - self.y_min


def normalize_01(s: Series) -> tuple[Series, NormParams]:
    lo, hi = float(s.ys.min()), float(s.ys.max())
    if hi == lo:
        raise DegenerateRange(f"cannot scale a constant series (value {lo})")
    p = NormParams(lo, hi)
    return s.with_values((s.ys - lo) / p.span), p


def denormalize_01(s: Series, p: NormParams) -> Series:
    return s.with_values(s.ys * p.span + p.y_min)


def diff(s: Series) -> Series:
    if len(s) < 2:
        raise TooShort("diff needs at least 2 samples")
    return Series(s.xs[1:], np.diff(s.ys))


def cumsum(s: Series) -> Series:
    return s.with_values(np.cumsum(s.ys))


def _paired(pred, actual) -> tuple[np.ndarray, np.ndarray]:
    p = pred.ys if isinstance(pred, Series) else np.asarray(pred, dtype=float)
    a = actual.ys if isinstance(actual, Series) else np.asarray(actual, dtype=float)
    if p.shape != a.shape or p.size == 0:
        raise LengthMismatch(f"lengths differ or are empty: {p.size} vs {a.size}")
    return p, a


def mae(pred, actual) -> float:
    p, a = _paired(pred, actual)
    return float(np.mean(np.abs(p - a)))


def mse(pred, actual) -> float:
    p, a = _paired(pred, actual)
    return float(np.mean((p - a) ** 2))
