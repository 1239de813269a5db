"""Two-layer network representation, penalties, truncation, interpolation.

A network is f(x) = sum_j a_j * act(theta_j . x + b_j) with activation
either the ReLU max(t, 0) or the logistic function 1 / (1 + exp(-t)).
Three penalty functionals are available:

* ``l2sum``    sum_j (||theta_j||^2 + b_j^2 + a_j^2)
* ``pathnorm`` sum_j |a_j| * ||(theta_j, b_j)||_2
* ``l1outer``  sum_j |a_j|
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable

import numpy as np
from scipy.special import expit

from . import _kernels

__all__ = [
    "RELU",
    "SIGMOID",
    "L2SUM",
    "PATHNORM",
    "L1OUTER",
    "PENALTY_KINDS",
    "ShallowNet",
    "PenaltySpec",
    "penalty",
    "truncate",
    "build_relu_interpolant_1d",
]

RELU = "relu"
SIGMOID = "sigmoid"
ACTIVATIONS = (RELU, SIGMOID)

L2SUM = "l2sum"
PATHNORM = "pathnorm"
L1OUTER = "l1outer"
PENALTY_KINDS = (L2SUM, PATHNORM, L1OUTER)


@dataclass(frozen=True)
class ShallowNet:
    """Immutable two-layer network; evaluation is reentrant."""

    a: np.ndarray          # (k,) outer weights
    Theta: np.ndarray      # (k, d) inner weights, one neuron per row
    b: np.ndarray          # (k,) biases
    activation: str = RELU

    def __post_init__(self):
        a = np.ascontiguousarray(self.a, dtype=np.float64)
        Theta = np.ascontiguousarray(self.Theta, dtype=np.float64)
        b = np.ascontiguousarray(self.b, dtype=np.float64)
        if Theta.ndim != 2:
            raise ValueError("Theta must be a k x d matrix")
        k = Theta.shape[0]
        if a.shape != (k,) or b.shape != (k,):
            raise ValueError("a, Theta, b disagree on the neuron count")
        if not (np.isfinite(a).all() and np.isfinite(Theta).all() and np.isfinite(b).all()):
            raise ValueError("network parameters must be finite")
        if self.activation not in ACTIVATIONS:
            raise ValueError(f"unknown activation {self.activation!r}")
        for arr in (a, Theta, b):
            arr.setflags(write=False)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "Theta", Theta)
        object.__setattr__(self, "b", b)

    @property
    def k(self) -> int:
        return self.Theta.shape[0]

    @property
    def d(self) -> int:
        return self.Theta.shape[1]

    def eval(self, X: np.ndarray) -> np.ndarray:
        """Exact forward pass on an m x d matrix of inputs."""
        X = np.ascontiguousarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != self.d:
            raise ValueError(f"X must be m x {self.d}")
        if self.k == 0:
            return np.zeros(X.shape[0])
        if self.activation == RELU:
            Xb = np.hstack([X, np.ones((X.shape[0], 1))])
            W = np.hstack([self.Theta, self.b[:, None]])
            return _kernels.relu_forward(Xb, np.ascontiguousarray(W), self.a)
        H = expit(X @ self.Theta.T + self.b)
        return H @ self.a

    def to_json(self) -> str:
        payload = {
            "activation": self.activation,
            "a": self.a.tolist(),
            "theta": self.Theta.tolist(),
            "b": self.b.tolist(),
        }
        return json.dumps(payload, sort_keys=True)

    @staticmethod
    def from_json(text: str) -> "ShallowNet":
        payload = json.loads(text)
        return ShallowNet(
            a=np.asarray(payload["a"], dtype=np.float64),
            Theta=np.asarray(payload["theta"], dtype=np.float64).reshape(
                len(payload["a"]), -1
            ),
            b=np.asarray(payload["b"], dtype=np.float64),
            activation=payload["activation"],
        )


def eval_network(net: ShallowNet, X: np.ndarray) -> np.ndarray:
    return net.eval(X)


@dataclass(frozen=True)
class PenaltySpec:
    """Which functional J(g) to apply, and its strength."""

    kind: str
    lam: float

    def __post_init__(self):
        if self.kind not in PENALTY_KINDS:
            raise ValueError(f"unknown penalty kind {self.kind!r}")
        if self.lam < 0:
            raise ValueError("lambda must be >= 0")


def penalty(net: ShallowNet, kind: str) -> float:
    """Evaluate the penalty functional J on a network; J(0) = 0."""
    if kind == L2SUM:
        return float(
            np.sum(net.Theta**2) + np.sum(net.b**2) + np.sum(net.a**2)
        )
    if kind == PATHNORM:
        row_norms = np.sqrt(np.sum(net.Theta**2, axis=1) + net.b**2)
        return float(np.sum(np.abs(net.a) * row_norms))
    if kind == L1OUTER:
        return float(np.sum(np.abs(net.a)))
    raise ValueError(f"unknown penalty kind {kind!r}")


def truncate(values: np.ndarray, t: float) -> np.ndarray:
    """Elementwise clamp to [-t, t]; idempotent and 1-Lipschitz."""
    if not t > 0:
        raise ValueError("truncation level t must be positive")
    return np.clip(np.asarray(values, dtype=np.float64), -t, t)


def build_relu_interpolant_1d(xs: Iterable[float], ys: Iterable[float]) -> ShallowNet:
    """Continuous piecewise-linear interpolant as a 1-D ReLU network.

    Knots sit at the (sorted) data points; the function is constant beyond
    the extreme knots. One neuron encodes the slope change at each knot
    plus one constant neuron (theta = 0, bias 1), so k <= n + 1 neurons,
    within the n + 3 budget of the underlying linear spline space.
    """
    xs = np.asarray(list(xs), dtype=np.float64)
    ys = np.asarray(list(ys), dtype=np.float64)
    if xs.ndim != 1 or xs.shape != ys.shape or xs.size == 0:
        raise ValueError("xs and ys must be equal-length non-empty vectors")
    order = np.argsort(xs, kind="stable")
    xs, ys = xs[order], ys[order]
    if np.any(np.diff(xs) == 0.0):
        raise ValueError("duplicate x values cannot be interpolated")

    n = xs.size
    thetas = [0.0]
    biases = [1.0]
    weights = [ys[0]]                      # constant level left of the data
    slopes = np.diff(ys) / np.diff(xs) if n > 1 else np.zeros(0)
    prev = 0.0
    for i in range(n):
        nxt = slopes[i] if i < n - 1 else 0.0
        change = nxt - prev
        prev = nxt
        if change != 0.0:
            thetas.append(1.0)
            biases.append(-xs[i])
            weights.append(change)
    return ShallowNet(
        a=np.asarray(weights),
        Theta=np.asarray(thetas)[:, None],
        b=np.asarray(biases),
        activation=RELU,
    )
