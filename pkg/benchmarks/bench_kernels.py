#!/usr/bin/env python3
"""Benchmark the compiled kernels against the NumPy fallback.

Runs the ReLU forward pass and the complexity-search ascent loop on a few
representative shapes and prints a timing table. Launch with
``SHALLOWREG_PURE=1`` to confirm the fallback path timing matches the
"numpy" rows here (the dispatcher then refuses to load the extension).
"""

import time

import numpy as np

from shallowreg import _kernels, _kernels_numpy


def time_call(fn, *args, repeat=5):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def forward_case(n, k, d, seed=0):
    rng = np.random.default_rng(seed)
    Xb = np.ascontiguousarray(rng.standard_normal((n, d + 1)))
    W = np.ascontiguousarray(rng.standard_normal((k, d + 1)))
    a = rng.standard_normal(k)
    return Xb, W, a


def ascent_case(n, k, d, restarts, seed=0):
    rng = np.random.default_rng(seed)
    Xb = np.ascontiguousarray(rng.standard_normal((n, d + 1)))
    s = rng.standard_normal(n)
    W = rng.standard_normal((restarts, k, d + 1))
    W /= np.linalg.norm(W, axis=2, keepdims=True)
    a = rng.standard_normal((restarts, k))
    a /= np.sum(np.abs(a), axis=1, keepdims=True)
    return Xb, s, W, a


def main():
    if _kernels.BACKEND == "numpy":
        print("compiled extension not available; benchmarking the fallback "
              "against itself is pointless")
        return

    print(f"{'kernel':<34}{'c-ext':>10}{'numpy':>10}{'speedup':>9}")
    for n, k, d in [(256, 64, 4), (1024, 64, 4), (256, 512, 8)]:
        Xb, W, a = forward_case(n, k, d)
        t_ext = time_call(_kernels.relu_forward, Xb, W, a, repeat=20)
        t_np = time_call(_kernels_numpy.relu_forward, Xb, W, a, repeat=20)
        name = f"relu_forward n={n} k={k} d={d}"
        print(f"{name:<34}{t_ext * 1e3:>8.2f}ms{t_np * 1e3:>8.2f}ms"
              f"{t_np / t_ext:>8.1f}x")

    steps = 200
    for n, k, d, restarts in [(64, 64, 4, 32), (256, 64, 4, 32),
                              (1024, 64, 4, 32), (256, 512, 4, 32)]:
        Xb, s, W, a = ascent_case(n, k, d, restarts)
        t_ext = time_call(
            lambda: _kernels.pathnorm_relu_ascent(Xb, s, W.copy(), a.copy(),
                                                  steps, 0.05), repeat=2)
        t_np = time_call(
            lambda: _kernels_numpy.pathnorm_relu_ascent(Xb, s, W.copy(),
                                                        a.copy(), steps,
                                                        0.05), repeat=2)
        name = f"ascent n={n} k={k} R={restarts}"
        print(f"{name:<34}{t_ext * 1e3:>8.0f}ms{t_np * 1e3:>8.0f}ms"
              f"{t_np / t_ext:>8.1f}x")


if __name__ == "__main__":
    main()
