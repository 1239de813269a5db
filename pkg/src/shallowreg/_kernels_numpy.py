"""Pure NumPy implementations of the hot kernels.

Semantically identical to the compiled versions in ``shallowreg._core``;
either backend may be active, see ``shallowreg._kernels``.
"""

from __future__ import annotations

import numpy as np

BACKEND = "numpy"


def relu_forward(Xb: np.ndarray, W: np.ndarray, a: np.ndarray) -> np.ndarray:
    """sum_j a_j * relu(w_j . xb_i) for every row xb_i of Xb.

    Xb is the bias-augmented design (n, p); W stacks the k inner-weight
    rows (k, p); a holds the k outer weights.
    """
    Z = Xb @ W.T
    np.maximum(Z, 0.0, out=Z)
    return Z @ a


def pathnorm_relu_ascent(Xb, s, W, a, steps, eta):
    """Projected normalized-gradient ascent for the correlation supremum.

    Searches sup |sum_i s_i g(x_i)| / n over ReLU networks with unit path
    norm, in the canonical gauge: every inner row w_j is kept on the unit
    sphere and the outer vector a on the L1 sphere, so the path norm is
    exactly 1 throughout. Each ascent step moves the inner block and the
    outer block of every restart a fixed distance ``eta`` along their
    gradient directions; normalizing per block keeps the search quality
    independent of n and k. W has shape (R, k, p) for R restarts; W and a
    are updated in place. Returns the best |correlation| seen at any
    projected iterate across restarts and steps.
    """
    n, p = Xb.shape
    R, k, _ = W.shape
    Wf = W.reshape(R * k, p)
    af = a.reshape(R, k)
    inv_n = 1.0 / n
    best = 0.0
    for step in range(steps + 1):
        Z = Xb @ Wf.T                       # (n, R*k)
        H = np.maximum(Z, 0.0)
        u = (H.T @ s).reshape(R, k)         # u_rj = sum_i s_i relu(w_rj . xb_i)
        corr = np.einsum("rk,rk->r", af, u) * inv_n
        step_best = float(np.max(np.abs(corr)))
        if step_best > best:
            best = step_best
        if step == steps:
            break
        g = np.sign(corr)                   # ascend on |corr|
        B = (Z > 0.0).astype(np.float64)
        B *= s[:, None]
        grad_W = (B.T @ Xb)                 # (R*k, p)
        grad_W *= af.reshape(R * k, 1)
        gw_norm = np.sqrt(
            np.einsum("ij,ij->i", grad_W, grad_W).reshape(R, k).sum(axis=1))
        gw_norm[gw_norm == 0.0] = np.inf
        ga_norm = np.sqrt(np.einsum("rk,rk->r", u, u))
        ga_norm[ga_norm == 0.0] = np.inf
        Wf += (eta * np.repeat(g / gw_norm, k))[:, None] * grad_W
        af += (eta * g / ga_norm)[:, None] * u
        norms = np.linalg.norm(Wf, axis=1)
        norms[norms == 0.0] = 1.0
        Wf /= norms[:, None]
        l1 = np.sum(np.abs(af), axis=1)
        l1[l1 == 0.0] = 1.0
        af /= l1[:, None]
    return best
