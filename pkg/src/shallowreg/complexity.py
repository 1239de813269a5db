"""Monte-Carlo Rademacher and Gaussian complexity of penalty-constrained classes.

For a class of networks g with penalty J(g) <= M and points x_1..x_n, the
complexity is E_s sup |sum_i s_i g(x_i)| / n with s either random signs or
standard normals. The supremum is approximated per multiplier draw by
multi-start projected gradient ascent over network parameters. Because
every supported J is positively homogeneous in the outer weights, the
search runs on the J = 1 shell and the result is scaled by M afterwards,
which keeps the constraint exact and makes the estimate exactly linear in
M under shared seeds. The search can only undershoot the true supremum,
so every reported value is a lower estimate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np
from scipy.special import expit

from . import _kernels
from ._rng import substream
from .netcore import PATHNORM, L1OUTER, RELU, SIGMOID, ShallowNet

__all__ = [
    "PathNormBall",
    "L1OuterBall",
    "Singleton",
    "SearchConfig",
    "ComplexityEstimate",
    "complexity_estimate",
    "RADEMACHER",
    "GAUSSIAN",
]

RADEMACHER = "rademacher"
GAUSSIAN = "gaussian"


@dataclass(frozen=True)
class PathNormBall:
    """Networks with path norm sum_j |a_j| ||(theta_j, b_j)|| at most M."""

    M: float
    k: int
    activation: str = RELU

    def __post_init__(self):
        if not self.M > 0:
            raise ValueError("M must be positive")
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.activation not in (RELU, SIGMOID):
            raise ValueError(f"unknown activation {self.activation!r}")


@dataclass(frozen=True)
class L1OuterBall:
    """Networks with sum_j |a_j| at most M.

    Only bounded activations are admissible: for the ReLU the inner
    weights can grow without limit at fixed outer L1 norm, so the
    supremum is infinite and the class is rejected.
    """

    M: float
    k: int
    activation: str = SIGMOID

    def __post_init__(self):
        if not self.M > 0:
            raise ValueError("M must be positive")
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.activation != SIGMOID:
            raise ValueError("l1outer ball requires a bounded activation; "
                             "use the sigmoid")


@dataclass(frozen=True)
class Singleton:
    """The one-element class {net}; the supremum is the network itself."""

    net: ShallowNet


ClassSpec = Union[PathNormBall, L1OuterBall, Singleton]


@dataclass(frozen=True)
class SearchConfig:
    restarts: int = 32
    steps: int = 200
    step_size: float = 0.05

    def __post_init__(self):
        if self.restarts < 1 or self.steps < 1:
            raise ValueError("restarts and steps must be >= 1")
        if not self.step_size > 0:
            raise ValueError("step_size must be positive")


@dataclass(frozen=True)
class ComplexityEstimate:
    """Mean and standard error of the per-draw supremum estimates.

    ``value`` is a lower estimate of the true complexity: the inner
    search may undershoot the supremum, never overshoot the constraint.
    """

    value: float
    std_err: float
    draws: int
    class_label: str
    multiplier: str
    M: Optional[float]
    k: Optional[int]
    n: int
    d: int
    seed: int
    per_draw: np.ndarray = field(repr=False)

    def record(self) -> dict:
        return {
            "class": self.class_label,
            "M": self.M,
            "k": self.k,
            "n": self.n,
            "d": self.d,
            "multiplier": self.multiplier,
            "draws": self.draws,
            "value": self.value,
            "std_err": self.std_err,
            "seed": self.seed,
            "estimate": "lower",
        }


def _draw_multiplier(rng: np.random.Generator, n: int, multiplier: str) -> np.ndarray:
    if multiplier == RADEMACHER:
        return rng.integers(0, 2, size=n).astype(np.float64) * 2.0 - 1.0
    if multiplier == GAUSSIAN:
        return rng.standard_normal(n)
    raise ValueError(f"unknown multiplier {multiplier!r}")


def _init_unit_gauge(rng, restarts, k, p):
    W = rng.standard_normal((restarts, k, p))
    norms = np.linalg.norm(W, axis=2)
    norms[norms == 0.0] = 1.0
    W /= norms[:, :, None]
    a = rng.standard_normal((restarts, k))
    l1 = np.sum(np.abs(a), axis=1)
    l1[l1 == 0.0] = 1.0
    a /= l1[:, None]
    return W, a


def _sigmoid_ascent(Xb, s, W, a, kind, steps, eta):
    """Generic J-normalized ascent for sigmoid classes (NumPy only)."""
    n, p = Xb.shape
    R, k, _ = W.shape
    Wf = W.reshape(R * k, p)
    inv_n = 1.0 / n

    def project(a_mat):
        if kind == PATHNORM:
            norms = np.linalg.norm(Wf, axis=1).reshape(R, k)
            J = np.sum(np.abs(a_mat) * norms, axis=1)
        else:
            J = np.sum(np.abs(a_mat), axis=1)
        J[J == 0.0] = 1.0
        return a_mat / J[:, None]

    a = project(a)
    best = 0.0
    for step in range(steps + 1):
        Z = Xb @ Wf.T
        H = expit(Z)
        u = (H.T @ s).reshape(R, k)
        corr = np.einsum("rk,rk->r", a, u) * inv_n
        step_best = float(np.max(np.abs(corr)))
        if step_best > best:
            best = step_best
        if step == steps:
            break
        g = np.sign(corr)
        B = H * (1.0 - H)
        B *= s[:, None]
        grad_W = B.T @ Xb
        coef = (g[:, None] * a * inv_n).reshape(R * k, 1)
        Wf += eta * coef * grad_W
        a += eta * g[:, None] * u * inv_n
        a = project(a)
    return best


def complexity_estimate(cls: ClassSpec, X: np.ndarray, draws: int,
                        multiplier: str = RADEMACHER,
                        search_cfg: Optional[SearchConfig] = None,
                        seed: int = 0) -> ComplexityEstimate:
    """Monte-Carlo complexity estimate of a network class at points X.

    Each multiplier draw contributes one supremum search (exact evaluation
    for singletons); draws are independent and reduced in index order.
    """
    if draws < 1:
        raise ValueError("draws must be >= 1")
    if search_cfg is None:
        search_cfg = SearchConfig()
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError("X must be an n x d matrix")
    n, d = X.shape
    Xb = np.ascontiguousarray(np.hstack([X, np.ones((n, 1))]))
    p = d + 1

    if isinstance(cls, Singleton):
        label, M, k = "singleton", None, cls.net.k
        fx = cls.net.eval(X)
    elif isinstance(cls, PathNormBall):
        label, M, k = f"pathnorm-{cls.activation}", cls.M, cls.k
    elif isinstance(cls, L1OuterBall):
        label, M, k = f"l1outer-{cls.activation}", cls.M, cls.k
    else:
        raise ValueError(f"unknown class {cls!r}")

    values = np.empty(draws)
    for i in range(draws):
        rng = substream(seed, "cx-draw", i)
        s = _draw_multiplier(rng, n, multiplier)
        if isinstance(cls, Singleton):
            values[i] = abs(float(s @ fx)) / n
            continue
        W, a = _init_unit_gauge(rng, search_cfg.restarts, k, p)
        if isinstance(cls, PathNormBall) and cls.activation == RELU:
            best = _kernels.pathnorm_relu_ascent(
                Xb, s, W, a, search_cfg.steps, search_cfg.step_size
            )
        else:
            kind = PATHNORM if isinstance(cls, PathNormBall) else L1OUTER
            best = _sigmoid_ascent(Xb, s, W, a, kind,
                                   search_cfg.steps, search_cfg.step_size)
        values[i] = M * best

    value = float(np.mean(values))
    std_err = float(np.std(values, ddof=1) / math.sqrt(draws)) if draws > 1 else 0.0
    return ComplexityEstimate(
        value=value,
        std_err=std_err,
        draws=draws,
        class_label=label,
        multiplier=multiplier,
        M=M,
        k=k,
        n=n,
        d=d,
        seed=seed,
        per_draw=values,
    )
