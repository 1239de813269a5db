"""Seeded synthetic regression datasets.

Two population models are provided:

* ``zero``  -- m(x) = 0 with Gaussian noise, covariates uniform on [0,1]^d.
* ``fig2``  -- m(x) = sqrt(x1^2 + x2^2) + cos(pi*(x3 + x4)) with covariates
  uniform on the sphere of radius sqrt(2) in R^d (d >= 4).

All generators are pure functions of their arguments and a 64-bit seed.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ._rng import substream

__all__ = [
    "Dataset",
    "sample_sphere",
    "sample_ball",
    "gen_fig2",
    "gen_zero_model",
    "fig2_regression",
    "generate",
    "MODEL_GENERATORS",
]


@dataclass(frozen=True)
class Dataset:
    """An (X, y) sample together with the noiseless regression values.

    ``y = m_true + sigma * eps`` by construction, with ``eps`` standard
    normal. ``model_id`` and ``seed`` identify the generator call that
    produced the data, so fresh test sets from the same population can be
    drawn later.
    """

    X: np.ndarray
    y: np.ndarray
    m_true: np.ndarray
    sigma: float
    model_id: str
    seed: int

    def __post_init__(self):
        X = np.asarray(self.X, dtype=np.float64)
        y = np.asarray(self.y, dtype=np.float64)
        m = np.asarray(self.m_true, dtype=np.float64)
        if X.ndim != 2:
            raise ValueError("X must be a 2-D matrix")
        if y.shape != (X.shape[0],) or m.shape != (X.shape[0],):
            raise ValueError("y and m_true must be n-vectors matching X")
        if not (np.isfinite(X).all() and np.isfinite(y).all() and np.isfinite(m).all()):
            raise ValueError("dataset contains non-finite values")
        if self.sigma < 0:
            raise ValueError("sigma must be >= 0")
        for arr in (X, y, m):
            arr.setflags(write=False)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "m_true", m)

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def d(self) -> int:
        return self.X.shape[1]

    def to_csv(self, csv_path, sidecar_path=None) -> None:
        """Write rows ``x1..xd, y, m_true`` plus a JSON metadata sidecar."""
        csv_path = Path(csv_path)
        if sidecar_path is None:
            sidecar_path = csv_path.with_suffix(".meta.json")
        header = [f"x{j + 1}" for j in range(self.d)] + ["y", "m_true"]
        with open(csv_path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            for i in range(self.n):
                writer.writerow(
                    [repr(float(v)) for v in self.X[i]]
                    + [repr(float(self.y[i])), repr(float(self.m_true[i]))]
                )
        meta = {
            "model_id": self.model_id,
            "n": self.n,
            "d": self.d,
            "sigma": self.sigma,
            "seed": self.seed,
        }
        with open(sidecar_path, "w") as fh:
            json.dump(meta, fh, indent=2, sort_keys=True)
            fh.write("\n")

    @staticmethod
    def from_csv(csv_path, sidecar_path=None) -> "Dataset":
        csv_path = Path(csv_path)
        if sidecar_path is None:
            sidecar_path = csv_path.with_suffix(".meta.json")
        with open(sidecar_path) as fh:
            meta = json.load(fh)
        with open(csv_path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            d = len(header) - 2
            rows = [[float(v) for v in row] for row in reader]
        arr = np.asarray(rows, dtype=np.float64)
        return Dataset(
            X=arr[:, :d],
            y=arr[:, d],
            m_true=arr[:, d + 1],
            sigma=float(meta["sigma"]),
            model_id=str(meta["model_id"]),
            seed=int(meta["seed"]),
        )


def _check_counts(n: int, d: int) -> None:
    if n < 1:
        raise ValueError("n must be >= 1")
    if d < 1:
        raise ValueError("d must be >= 1")


def sample_sphere(n: int, d: int, radius: float, seed: int) -> np.ndarray:
    """Rows uniform on the radius-``radius`` sphere in R^d.

    Standard-normal vectors are normalized to unit length and scaled, which
    gives the uniform surface law for every d >= 1 (d = 1 degenerates to
    the two-point set {-radius, +radius}).
    """
    _check_counts(n, d)
    if not radius > 0:
        raise ValueError("radius must be positive")
    rng = substream(seed, "sphere", n, d)
    X = rng.standard_normal((n, d))
    norms = np.linalg.norm(X, axis=1)
    while np.any(norms == 0.0):  # probability zero, but keep the law exact
        bad = norms == 0.0
        X[bad] = rng.standard_normal((int(bad.sum()), d))
        norms = np.linalg.norm(X, axis=1)
    return X * (radius / norms)[:, None]


def sample_ball(n: int, d: int, seed: int) -> np.ndarray:
    """Rows uniform in the unit ball of R^d (direction times U^(1/d) radius)."""
    _check_counts(n, d)
    rng = substream(seed, "ball", n, d)
    X = rng.standard_normal((n, d))
    norms = np.linalg.norm(X, axis=1)
    while np.any(norms == 0.0):
        bad = norms == 0.0
        X[bad] = rng.standard_normal((int(bad.sum()), d))
        norms = np.linalg.norm(X, axis=1)
    r = rng.uniform(0.0, 1.0, size=n) ** (1.0 / d)
    return X * (r / norms)[:, None]


def fig2_regression(X: np.ndarray) -> np.ndarray:
    """Noiseless regression values sqrt(x1^2+x2^2) + cos(pi*(x3+x4))."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] < 4:
        raise ValueError("model references coordinates 1-4; need d >= 4")
    return np.sqrt(X[:, 0] ** 2 + X[:, 1] ** 2) + np.cos(np.pi * (X[:, 2] + X[:, 3]))


def gen_fig2(n: int, d: int, sigma: float = 0.2, seed: int = 0) -> Dataset:
    """Sphere-design dataset with the two-term target above, noise sd ``sigma``."""
    _check_counts(n, d)
    if d < 4:
        raise ValueError("model references coordinates 1-4; need d >= 4")
    if sigma < 0:
        raise ValueError("sigma must be >= 0")
    X = sample_sphere(n, d, math.sqrt(2.0), seed)
    m = fig2_regression(X)
    rng = substream(seed, "fig2-noise", n, d)
    y = m + sigma * rng.standard_normal(n) if sigma > 0 else m.copy()
    return Dataset(X=X, y=y, m_true=m, sigma=sigma, model_id="fig2", seed=seed)


def gen_zero_model(n: int, d: int = 1, sigma: float = 1.0, seed: int = 0) -> Dataset:
    """Pure-noise dataset: m(x) = 0, X uniform on [0,1]^d, y = sigma * N(0,1)."""
    _check_counts(n, d)
    if sigma < 0:
        raise ValueError("sigma must be >= 0")
    rng = substream(seed, "zero", n, d)
    X = rng.uniform(0.0, 1.0, size=(n, d))
    m = np.zeros(n)
    y = sigma * rng.standard_normal(n) if sigma > 0 else np.zeros(n)
    return Dataset(X=X, y=y, m_true=m, sigma=sigma, model_id="zero", seed=seed)


MODEL_GENERATORS = {
    "fig2": gen_fig2,
    "zero": gen_zero_model,
}


def generate(model_id: str, n: int, d: int, sigma: float, seed: int) -> Dataset:
    """Dispatch to a registered generator by model id."""
    try:
        gen = MODEL_GENERATORS[model_id]
    except KeyError:
        raise ValueError(f"unknown model_id {model_id!r}; "
                         f"known: {sorted(MODEL_GENERATORS)}") from None
    return gen(n, d, sigma, seed)
