"""Solvers for penalized two-layer network regression.

Two block schemes are provided:

* ``fit_alternating_ridge`` -- ReLU networks under the summed L2 penalty
  on all parameters. Outer weights are refit by an exact ridge solve on
  the current hidden features; inner weights and biases are refit by a
  ridge solve on the linearization obtained by freezing each neuron's
  activity pattern at the previous iterate.
* ``fit_sigmoid_l1`` -- logistic networks under an L1 penalty on the outer
  weights. Outer weights by coordinate-descent soft thresholding, inner
  parameters by plain gradient steps on the smooth part.

``lambda_schedule`` exposes the rate-optimal penalty strengths for the
small-network and large-network regimes.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.linalg
from scipy.special import expit

from ._rng import substream
from .data import Dataset
from .netcore import L1OUTER, PATHNORM, RELU, SIGMOID, ShallowNet, penalty

__all__ = [
    "SolveError",
    "FitConfig",
    "FitResult",
    "ridge_solve",
    "fit_alternating_ridge",
    "fit_sigmoid_l1",
    "lambda_schedule",
    "pick_regime",
    "SMALL_K",
    "LARGE_K",
]

SMALL_K = "SmallK"
LARGE_K = "LargeK"


class SolveError(RuntimeError):
    """A linear solve failed even after jitter escalation."""


@dataclass
class FitConfig:
    """Solver knobs shared by both block schemes.

    ``tol`` is the relative objective-change threshold for the outer loop;
    ``init_scale`` sets the Gaussian magnitude of the inner-parameter
    initialization (outer weights start at zero, so the first outer-weight
    solve is a plain random-features ridge fit).
    """

    max_outer_iters: int = 50
    tol: float = 1e-8
    init_scale: float = 0.5
    init_seed: int = 0
    ridge_jitter: float = 1e-10
    inner_grad_steps: int = 25
    step_size: float = 0.05

    def __post_init__(self):
        if self.max_outer_iters < 1:
            raise ValueError("max_outer_iters must be >= 1")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if not self.init_scale > 0:
            raise ValueError("init_scale must be positive")
        if not self.ridge_jitter > 0:
            raise ValueError("ridge_jitter must be positive")
        if self.inner_grad_steps < 0:
            raise ValueError("inner_grad_steps must be >= 0")
        if not self.step_size > 0:
            raise ValueError("step_size must be positive")


@dataclass
class FitResult:
    """Outcome of one penalized fit.

    ``objective_trace[0]`` is the objective at initialization and each
    further entry follows one full outer iteration. ``penalty_value`` is
    J of the fitted network in the reporting form of its penalty family:
    the path norm for the ReLU / weight-decay path and the outer L1 norm
    for the sigmoid path. ``diagnostics`` carries per-iteration values
    used by the solver's internal monotonicity checks.
    """

    net: ShallowNet
    objective_trace: np.ndarray
    converged: bool
    penalty_value: float
    train_mse: float
    iters: int
    diagnostics: dict = field(default_factory=dict)

    def to_json(self) -> str:
        payload = {
            "net": json.loads(self.net.to_json()),
            "objective_trace": self.objective_trace.tolist(),
            "converged": self.converged,
            "penalty_value": self.penalty_value,
            "train_mse": self.train_mse,
            "iters": self.iters,
        }
        return json.dumps(payload, sort_keys=True, indent=2)


def ridge_solve(G: np.ndarray, y: np.ndarray, lam: float, n_scale: int,
                jitter: float = 1e-10) -> np.ndarray:
    """argmin_w (1/n_scale) ||y - G w||^2 + lam ||w||^2.

    Solves the normal equations (G'G + n_scale*lam*I) w = G'y, using the
    dual n x n system when the problem is wider than tall. With lam = 0
    the minimum-norm least-squares solution is returned (SVD), which
    satisfies the normal equations for any rank; if that fails, a jittered
    solve is attempted with the jitter escalated tenfold up to three times
    before giving up.
    """
    G = np.asarray(G, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if G.ndim != 2 or y.ndim != 1 or G.shape[0] != y.shape[0]:
        raise ValueError("G must be n x p and y an n-vector")
    if not (np.isfinite(G).all() and np.isfinite(y).all()):
        raise SolveError("non-finite entries in ridge system")
    if lam < 0:
        raise ValueError("lambda must be >= 0")
    if n_scale < 1:
        raise ValueError("n_scale must be >= 1")
    n, p = G.shape

    if lam == 0.0:
        try:
            # SVD route with the max(n, p) * eps relative rank cutoff; the
            # minimum-norm solution satisfies the normal equations for any
            # rank pattern
            w, _, _, _ = np.linalg.lstsq(G, y, rcond=None)
            if np.isfinite(w).all():
                return w
        except Exception:
            pass
        return _jittered_solve(G, y, 0.0, n_scale, jitter)

    lam_eff = n_scale * lam
    w = None
    try:
        if p <= n:
            A = G.T @ G
            A[np.diag_indices_from(A)] += lam_eff
            rhs = G.T @ y
            factor = scipy.linalg.cho_factor(A)
            w = scipy.linalg.cho_solve(factor, rhs)
            for _ in range(3):  # refine while the factorization is inexact
                r = rhs - A @ w
                if np.max(np.abs(r)) <= 1e-14 * max(1.0, np.max(np.abs(rhs))):
                    break
                w = w + scipy.linalg.cho_solve(factor, r)
        else:
            K = G @ G.T
            K[np.diag_indices_from(K)] += lam_eff
            factor = scipy.linalg.cho_factor(K)
            z = scipy.linalg.cho_solve(factor, y)
            for _ in range(3):
                r = y - K @ z
                if np.max(np.abs(r)) <= 1e-14 * max(1.0, np.max(np.abs(y))):
                    break
                z = z + scipy.linalg.cho_solve(factor, r)
            w = G.T @ z
    except scipy.linalg.LinAlgError:
        w = None
    if w is not None and np.isfinite(w).all():
        resid = (G.T @ (G @ w) + lam_eff * w) - G.T @ y
        if np.max(np.abs(resid)) <= 1e-9 * n_scale * max(
                1.0, float(np.max(np.abs(G.T @ y)))):
            return w
    # ill-conditioned system: solve the equivalent augmented least squares
    # [G; sqrt(n*lam) I] w ~ [y; 0] with a backward-stable SVD routine
    try:
        Ga = np.vstack([G, math.sqrt(lam_eff) * np.eye(p)])
        ya = np.concatenate([y, np.zeros(p)])
        w, _, _, _ = np.linalg.lstsq(Ga, ya, rcond=None)
        if np.isfinite(w).all():
            return w
    except Exception:
        pass
    return _jittered_solve(G, y, lam, n_scale, jitter)


def _jittered_solve(G, y, lam, n_scale, jitter):
    n, p = G.shape
    A0 = G.T @ G
    rhs = G.T @ y
    base = jitter * (np.trace(A0) / p if p else 1.0)
    if base <= 0:
        base = jitter
    eps = base
    for _ in range(4):  # initial attempt plus three escalations
        A = A0.copy()
        A[np.diag_indices_from(A)] += n_scale * lam + eps
        try:
            w = scipy.linalg.solve(A, rhs, assume_a="pos")
            if np.isfinite(w).all():
                return w
        except scipy.linalg.LinAlgError:
            pass
        eps *= 10.0
    raise SolveError("ridge solve failed after jitter escalation")


def lambda_schedule(regime: str, n: int, k: int, beta: float, c: float) -> float:
    """Penalty strength for the given size regime.

    SmallK: c * max(1/k, k*ln(n)/n). LargeK: c * ln(n)/sqrt(n). The regime
    boundary sits at k = sqrt(n) for beta = 0 and k = n^(beta/2 + 3/4)
    otherwise; see ``pick_regime``.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    if k < 1:
        raise ValueError("k must be >= 1")
    if not c > 0:
        raise ValueError("c must be positive")
    if not 0.0 <= beta < 0.5:
        raise ValueError("beta must lie in [0, 0.5)")
    if regime == SMALL_K:
        return c * max(1.0 / k, k * math.log(n) / n)
    if regime == LARGE_K:
        return c * math.log(n) / math.sqrt(n)
    raise ValueError(f"unknown regime {regime!r}")


def pick_regime(n: int, k: int, beta: float = 0.0) -> str:
    """SmallK iff k is at or below the regime boundary."""
    if not 0.0 <= beta < 0.5:
        raise ValueError("beta must lie in [0, 0.5)")
    boundary = math.sqrt(n) if beta == 0.0 else n ** (0.5 * beta + 0.75)
    return SMALL_K if k <= boundary else LARGE_K


def _augment(X: np.ndarray) -> np.ndarray:
    return np.hstack([X, np.ones((X.shape[0], 1))])


# widest inner system materialized explicitly; beyond this the dual
# normal equations are assembled from the masked Gram matrix instead
_INNER_MATERIALIZE_LIMIT = 65536


def _inner_ridge_structural(Xb, pattern, a, y, lam, n_scale, jitter):
    """Inner-parameter ridge via the n x n dual system.

    The design G has columns a_j * 1{pattern} * xb, so G G' equals
    (P diag(a^2) P') hadamard (Xb Xb') and never needs materializing.
    Returns the same minimizer as ridge_solve on the explicit G (the
    minimum-norm solution when lam = 0).
    """
    P = pattern.astype(np.float64)
    K = (P * (a * a)[None, :]) @ P.T
    K *= Xb @ Xb.T
    if lam == 0.0:
        z = scipy.linalg.pinvh(K) @ y
    else:
        K[np.diag_indices_from(K)] += n_scale * lam
        try:
            z = scipy.linalg.solve(K, y, assume_a="pos")
        except scipy.linalg.LinAlgError:
            K[np.diag_indices_from(K)] += jitter * max(1.0, np.trace(K) / K.shape[0])
            z = scipy.linalg.solve(K, y, assume_a="pos")
    W = a[:, None] * ((P * z[:, None]).T @ Xb)
    return W


def _init_params(k: int, d: int, cfg: FitConfig, tag: str,
                 init_net: Optional[ShallowNet], activation: str):
    if init_net is not None:
        if init_net.activation != activation:
            raise ValueError("init_net activation does not match the solver")
        if init_net.d != d:
            raise ValueError("init_net dimension mismatch")
        if init_net.k > k:
            raise ValueError("init_net has more neurons than requested k")
        W = np.zeros((k, d + 1))
        a = np.zeros(k)
        W[: init_net.k, :d] = init_net.Theta
        W[: init_net.k, d] = init_net.b
        a[: init_net.k] = init_net.a
        return W, a
    rng = substream(cfg.init_seed, tag, k, d)
    W = np.empty((k, d + 1))
    W[:, :d] = rng.normal(0.0, cfg.init_scale / math.sqrt(d), size=(k, d))
    W[:, d] = rng.normal(0.0, cfg.init_scale, size=k)
    return W, np.zeros(k)


def _net_from(W: np.ndarray, a: np.ndarray, d: int, activation: str) -> ShallowNet:
    return ShallowNet(a=a.copy(), Theta=W[:, :d].copy(), b=W[:, d].copy(),
                      activation=activation)


def fit_alternating_ridge(data: Dataset, k: int, lam: float,
                          cfg: Optional[FitConfig] = None,
                          init_net: Optional[ShallowNet] = None) -> FitResult:
    """Alternating ridge for ReLU networks under the summed L2 penalty.

    Each outer iteration solves the outer-weight ridge exactly on the
    current hidden features, then refits all (theta_j, b_j) jointly by a
    ridge on the linear model obtained by freezing the indicator
    1{theta_j . x + b_j > 0} at its previous value. The objective trace is
    always evaluated with the true ReLU. The outer-weight step can never
    increase the exact objective; the inner step is monotone only for its
    frozen-pattern surrogate, both facts are recorded in ``diagnostics``.

    Because the frozen-pattern step can transiently raise the exact
    objective, the returned network is the best iterate visited (the
    initialization or either half-step of any iteration), not necessarily
    the last one; the trace still shows the full path.
    """
    if cfg is None:
        cfg = FitConfig()
    if k < 1:
        raise ValueError("k must be >= 1")
    if lam < 0:
        raise ValueError("lambda must be >= 0")
    X, y = data.X, data.y
    n, d = X.shape
    p = d + 1
    Xb = _augment(X)
    W, a = _init_params(k, d, cfg, "relu-l2-init", init_net, RELU)

    def exact_objective(a_vec, W_mat):
        F = np.maximum(Xb @ W_mat.T, 0.0)
        resid = y - F @ a_vec
        obj = float(resid @ resid / n)
        if lam > 0.0:  # unpenalized parameters may grow huge; avoid 0 * inf
            obj += lam * float(np.sum(W_mat**2) + np.sum(a_vec**2))
        return obj

    trace = [exact_objective(a, W)]
    after_a = []
    surrogate_drops = []
    best_obj = trace[0]
    best_a, best_W = a.copy(), W.copy()
    converged = False
    iters = 0
    for _ in range(cfg.max_outer_iters):
        iters += 1
        F = np.maximum(Xb @ W.T, 0.0)
        a = ridge_solve(F, y, lam, n, jitter=cfg.ridge_jitter)
        obj_a = exact_objective(a, W)
        after_a.append(obj_a)
        if obj_a < best_obj:
            best_obj, best_a, best_W = obj_a, a.copy(), W.copy()

        pattern = (Xb @ W.T) > 0.0

        def surrogate(W_mat):
            # predictions of the frozen-pattern linear model
            fitted = ((Xb @ W_mat.T) * pattern * a[None, :]).sum(axis=1)
            resid = y - fitted
            obj = float(resid @ resid / n)
            if lam > 0.0:
                obj += lam * float(np.sum(W_mat**2))
            return obj

        before = surrogate(W)
        if k * p > _INNER_MATERIALIZE_LIMIT:
            W = _inner_ridge_structural(Xb, pattern, a, y, lam, n,
                                        cfg.ridge_jitter)
        else:
            G = (a[None, :, None] * pattern[:, :, None]
                 * Xb[:, None, :]).reshape(n, k * p)
            w_new = ridge_solve(G, y, lam, n, jitter=cfg.ridge_jitter)
            W = w_new.reshape(k, p)
        surrogate_drops.append((before, surrogate(W)))

        trace.append(exact_objective(a, W))
        if trace[-1] < best_obj:
            best_obj, best_a, best_W = trace[-1], a.copy(), W.copy()
        prev, cur = trace[-2], trace[-1]
        if abs(prev - cur) <= cfg.tol * max(abs(prev), 1e-12):
            converged = True
            break

    net = _net_from(best_W, best_a, d, RELU)
    preds = net.eval(X)
    train_mse = float(np.mean((y - preds) ** 2))
    return FitResult(
        net=net,
        objective_trace=np.asarray(trace),
        converged=converged,
        penalty_value=penalty(net, PATHNORM),
        train_mse=train_mse,
        iters=iters,
        diagnostics={
            "objective_after_outer_step": np.asarray(after_a),
            "inner_surrogate_before_after": np.asarray(surrogate_drops),
            "best_objective": best_obj,
        },
    )


def _soft_threshold(z: float, t: float) -> float:
    if z > t:
        return z - t
    if z < -t:
        return z + t
    return 0.0


def _lasso_cd(H: np.ndarray, y: np.ndarray, lam: float, a: np.ndarray,
              max_sweeps: int = 200, tol: float = 1e-12) -> np.ndarray:
    """Coordinate descent for (1/n)||y - H a||^2 + lam * sum |a_j|."""
    n, k = H.shape
    col_sq = np.einsum("ij,ij->j", H, H) / n
    a = a.copy()
    r = y - H @ a
    thresh = 0.5 * lam
    for _ in range(max_sweeps):
        max_delta = 0.0
        for j in range(k):
            if col_sq[j] == 0.0:
                continue
            aj = a[j]
            z = (H[:, j] @ r) / n + col_sq[j] * aj
            new = _soft_threshold(z, thresh) / col_sq[j]
            if new != aj:
                r += H[:, j] * (aj - new)
                a[j] = new
                delta = abs(new - aj)
                if delta > max_delta:
                    max_delta = delta
        if max_delta <= tol * max(1.0, float(np.max(np.abs(a)))):
            break
    return a


def fit_sigmoid_l1(data: Dataset, k: int, lam: float,
                   cfg: Optional[FitConfig] = None,
                   init_net: Optional[ShallowNet] = None) -> FitResult:
    """Block scheme for logistic networks with an L1 outer-weight penalty.

    Outer weights are updated by coordinate-descent soft thresholding on
    the current hidden features; inner parameters take
    ``cfg.inner_grad_steps`` fixed-step gradient steps on the squared
    loss, accepted only if they do not increase the exact objective, so
    the outer trace is non-increasing by construction.
    """
    if cfg is None:
        cfg = FitConfig()
    if k < 1:
        raise ValueError("k must be >= 1")
    if lam < 0:
        raise ValueError("lambda must be >= 0")
    X, y = data.X, data.y
    n, d = X.shape
    Xb = _augment(X)
    W, a = _init_params(k, d, cfg, "sigmoid-l1-init", init_net, SIGMOID)

    def objective(a_vec, W_mat):
        H = expit(Xb @ W_mat.T)
        resid = y - H @ a_vec
        return float(resid @ resid / n + lam * np.sum(np.abs(a_vec)))

    trace = [objective(a, W)]
    converged = False
    iters = 0
    for _ in range(cfg.max_outer_iters):
        iters += 1
        H = expit(Xb @ W.T)
        if lam == 0.0:
            a = ridge_solve(H, y, 0.0, n, jitter=cfg.ridge_jitter)
        else:
            a = _lasso_cd(H, y, lam, a)
        obj_after_a = objective(a, W)

        W_try = W.copy()
        for _ in range(cfg.inner_grad_steps):
            Z = Xb @ W_try.T
            Hc = expit(Z)
            resid = y - Hc @ a
            weights = (resid[:, None] * Hc * (1.0 - Hc))
            grad_W = (-2.0 / n) * (weights.T @ Xb) * a[:, None]
            W_try -= cfg.step_size * grad_W
        if objective(a, W_try) <= obj_after_a:
            W = W_try

        trace.append(objective(a, W))
        prev, cur = trace[-2], trace[-1]
        if abs(prev - cur) <= cfg.tol * max(abs(prev), 1e-12):
            converged = True
            break

    net = _net_from(W, a, d, SIGMOID)
    preds = net.eval(X)
    train_mse = float(np.mean((y - preds) ** 2))
    return FitResult(
        net=net,
        objective_trace=np.asarray(trace),
        converged=converged,
        penalty_value=penalty(net, L1OUTER),
        train_mse=train_mse,
        iters=iters,
    )
