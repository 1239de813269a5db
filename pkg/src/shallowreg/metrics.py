"""Empirical and Monte-Carlo prediction error, replication aggregation."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._rng import derive_seed
from .data import generate
from .netcore import ShallowNet, truncate

__all__ = ["ErrorReport", "empirical_error", "prediction_error_mc", "aggregate"]


@dataclass(frozen=True)
class ErrorReport:
    """Squared-error summary for one fitted network."""

    empirical: float       # mean squared deviation from m at the training points
    prediction: float      # Monte-Carlo estimate of the population squared error
    pred_se: float
    n_test: int
    train_mse: float

    def __post_init__(self):
        for name in ("empirical", "prediction", "pred_se", "train_mse"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise ValueError(f"{name} must be finite and >= 0")


def empirical_error(pred: np.ndarray, m_true: np.ndarray) -> float:
    """Mean squared difference between predictions and regression values."""
    pred = np.asarray(pred, dtype=np.float64)
    m_true = np.asarray(m_true, dtype=np.float64)
    if pred.shape != m_true.shape:
        raise ValueError("pred and m_true must have equal length")
    return float(np.mean((pred - m_true) ** 2))


def prediction_error_mc(net: ShallowNet, model_id: str, n_test: int,
                        seed: int,
                        truncate_at: float | None = None) -> tuple[float, float]:
    """Monte-Carlo squared prediction error against a fresh noiseless sample.

    Draws ``n_test`` covariates from the model's population, compares the
    network to the noiseless regression values (noise never enters the
    target), and returns the mean squared error with its standard error.
    ``truncate_at`` clamps predictions to [-t, t] first, the tail control
    used when reporting fits whose penalty grows with the width; ln(n) is
    the conventional level.
    """
    if n_test < 2:
        raise ValueError("n_test must be >= 2")
    ds = generate(model_id, n_test, net.d, 0.0, derive_seed(seed, "mc-test"))
    preds = net.eval(ds.X)
    if truncate_at is not None:
        preds = truncate(preds, truncate_at)
    sq = (preds - ds.m_true) ** 2
    value = float(np.mean(sq))
    se = float(np.std(sq, ddof=1) / math.sqrt(n_test))
    return value, se


def aggregate(values) -> tuple[float, float, tuple[float, float]]:
    """Sample mean, sd (n-1 denominator) and normal-approximation 95% CI."""
    arr = np.asarray(list(values), dtype=np.float64)
    if arr.size < 2:
        raise ValueError("need at least 2 values to aggregate")
    mean = float(np.mean(arr))
    sd = float(np.std(arr, ddof=1))
    half = 1.959963984540054 * sd / math.sqrt(arr.size)
    return mean, sd, (mean - half, mean + half)
