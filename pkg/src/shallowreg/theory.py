"""Closed-form risk-bound curves over the network size k.

The bound combines a k^(-alpha) approximation term with a generalization
term that grows linearly in k up to a sample-size-dependent breakpoint and
is flat beyond it:

    bound(k) = c * k^(-alpha) + c * (ln n / n) * min(k, k2)

with k2 = sqrt(n) when beta = 0 and k2 = n^(beta/2 + 3/4) for
beta in (0, 1/2). The two penalty-strength regimes switch at the same
breakpoint. Depending on (alpha, beta) the curve is classified as
monotone decreasing or double descent; the first dip of a double-descent
curve appears on the n^(1/(alpha+1)) scale and the second drop at k2.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .fit import LARGE_K, SMALL_K

__all__ = [
    "MONOTONE",
    "DOUBLE_DESCENT",
    "mise_bound",
    "mise_values",
    "classify_shape",
    "breakpoints",
    "minimax_reference",
    "BoundCurve",
    "bound_curve",
    "regime_threshold",
    "domain_cap",
]

MONOTONE = "Monotone"
DOUBLE_DESCENT = "DoubleDescent"


def _validate(alpha: float, beta: float, n: int) -> None:
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    if not 0.0 <= beta < 0.5:
        raise ValueError("beta must lie in [0, 0.5)")
    if n < 2:
        raise ValueError("n must be >= 2")


def regime_threshold(beta: float, n: int) -> float:
    """Breakpoint between the small-k and large-k regimes."""
    return math.sqrt(n) if beta == 0.0 else n ** (0.5 * beta + 0.75)


def domain_cap(beta: float, n: int, c: float = 1.0) -> float:
    """Largest admissible k; unbounded when beta = 0."""
    if beta == 0.0:
        return math.inf
    return c * n ** (0.5 + 0.25 / beta)


def mise_bound(alpha: float, beta: float, n: int, k: float,
               c: float = 1.0) -> tuple[float, str]:
    """Bound value and regime label at a single k (k may be real-valued)."""
    _validate(alpha, beta, n)
    if not c > 0:
        raise ValueError("c must be positive")
    if k < 1:
        raise ValueError("k must be >= 1")
    if k > domain_cap(beta, n, c):
        raise ValueError("k exceeds the admissible range for beta > 0")
    thr = regime_threshold(beta, n)
    value = c * k ** (-alpha) + c * (math.log(n) / n) * min(k, thr)
    regime = SMALL_K if k <= thr else LARGE_K
    return value, regime


def mise_values(alpha: float, beta: float, n: int, ks: np.ndarray,
                c: float = 1.0) -> np.ndarray:
    """Vectorized bound over a k grid (same domain checks as mise_bound)."""
    _validate(alpha, beta, n)
    if not c > 0:
        raise ValueError("c must be positive")
    ks = np.asarray(ks, dtype=np.float64)
    if np.any(ks < 1):
        raise ValueError("k must be >= 1")
    if np.any(ks > domain_cap(beta, n, c)):
        raise ValueError("k exceeds the admissible range for beta > 0")
    thr = regime_threshold(beta, n)
    return c * ks ** (-alpha) + c * (math.log(n) / n) * np.minimum(ks, thr)


def classify_shape(alpha: float, beta: float) -> str:
    """Monotone iff alpha <= 1 (beta = 0) or alpha <= (1-2b)/(3+2b) (beta > 0).

    Equality goes to Monotone.
    """
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    if not 0.0 <= beta < 0.5:
        raise ValueError("beta must lie in [0, 0.5)")
    limit = 1.0 if beta == 0.0 else (1.0 - 2.0 * beta) / (3.0 + 2.0 * beta)
    return MONOTONE if alpha <= limit else DOUBLE_DESCENT


def breakpoints(alpha: float, beta: float, n: int) -> tuple[float, float]:
    """First-decay and second-drop scales (order constants set to 1)."""
    _validate(alpha, beta, n)
    return n ** (1.0 / (alpha + 1.0)), regime_threshold(beta, n)


def minimax_reference(n: float) -> float:
    """Reference rate 1/sqrt(n ln n); the matching constant is unknown."""
    if not n > 1:
        raise ValueError("n must exceed 1")
    return 1.0 / math.sqrt(n * math.log(n))


@dataclass(frozen=True)
class BoundCurve:
    """A bound curve evaluated on an integer k grid, with shape metadata."""

    alpha: float
    beta: float
    n: int
    c: float
    k_grid: np.ndarray
    values: np.ndarray
    regimes: list
    shape: str
    k_first: float
    k_second: float

    def to_csv(self, path) -> None:
        with open(Path(path), "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["k", "value", "regime"])
            for k, v, r in zip(self.k_grid, self.values, self.regimes):
                writer.writerow([int(k), repr(float(v)), r])

    def header(self) -> dict:
        return {
            "alpha": self.alpha,
            "beta": self.beta,
            "n": self.n,
            "c": self.c,
            "shape": self.shape,
            "k_first": self.k_first,
            "k_second": self.k_second,
        }

    def to_json(self) -> str:
        return json.dumps(self.header(), sort_keys=True, indent=2)


def bound_curve(alpha: float, beta: float, n: int, c: float = 1.0,
                k_grid: Optional[np.ndarray] = None,
                k_max: Optional[int] = None) -> BoundCurve:
    """Evaluate the bound over an integer grid (default 1..k_max)."""
    if k_grid is None:
        if k_max is None:
            raise ValueError("provide k_grid or k_max")
        k_grid = np.arange(1, int(k_max) + 1)
    k_grid = np.asarray(k_grid)
    if k_grid.size == 0 or np.any(np.diff(k_grid) <= 0):
        raise ValueError("k_grid must be non-empty and strictly increasing")
    values = mise_values(alpha, beta, n, k_grid.astype(np.float64), c)
    thr = regime_threshold(beta, n)
    regimes = [SMALL_K if k <= thr else LARGE_K for k in k_grid]
    k_first, k_second = breakpoints(alpha, beta, n)
    return BoundCurve(
        alpha=alpha,
        beta=beta,
        n=n,
        c=c,
        k_grid=k_grid,
        values=values,
        regimes=regimes,
        shape=classify_shape(alpha, beta),
        k_first=k_first,
        k_second=k_second,
    )
