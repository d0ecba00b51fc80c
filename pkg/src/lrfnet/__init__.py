"""Forecasting by stacked linear-regression features with a fine-tune regressor."""

__version__ = "0.1.0"

from .pipeline import FittedPipeline, PipelineConfig, fitted_values, generalize, load, save, train
from .series import NormParams, Series, cumsum, denormalize_01, diff, mae, mse, normalize_01

__all__ = [
    "FittedPipeline", "NormParams", "PipelineConfig", "Series", "cumsum", "denormalize_01",
    "diff", "fitted_values", "generalize", "load", "mae", "mse", "normalize_01", "save", "train",
]
