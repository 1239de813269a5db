# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot-loop kernels: fused ReLU forward pass and the projected
gradient ascent used by the complexity estimator. Semantics match
``shallowreg._kernels_numpy`` (summation order may differ in the last ulp).
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport fabs, sqrt
from scipy.linalg.cython_blas cimport dgemm

cnp.import_array()

BACKEND = "c-ext"


cdef void _mm_a_bt(const double[:, ::1] A, const double[:, ::1] B,
                   double[:, ::1] C) noexcept nogil:
    # C (m, n) = A (m, p) @ B.T with B stored (n, p); all row-major.
    cdef int m = A.shape[0], p = A.shape[1], n = B.shape[0]
    cdef double one = 1.0, zero = 0.0
    # column-major view: C^T (n, m) = B_cm^T (n, p) @ A_cm (p, m)
    dgemm("T", "N", &n, &m, &p, &one, <double*>&B[0, 0], &p,
          <double*>&A[0, 0], &p, &zero, &C[0, 0], &n)


def relu_forward(const double[:, ::1] Xb, const double[:, ::1] W,
                 const double[::1] a):
    """sum_j a_j * relu(w_j . xb_i) for every row of Xb."""
    cdef Py_ssize_t n = Xb.shape[0], k = W.shape[0]
    cdef cnp.ndarray[double, ndim=2] Z = np.empty((n, k))
    cdef cnp.ndarray[double, ndim=1] out = np.empty(n)
    cdef double[:, ::1] Zv = Z
    cdef double[::1] outv = out
    cdef Py_ssize_t i, j
    cdef double acc, z
    with nogil:
        _mm_a_bt(Xb, W, Zv)
        for i in range(n):
            acc = 0.0
            for j in range(k):
                z = Zv[i, j]
                if z > 0.0:
                    acc += a[j] * z
            outv[i] = acc
    return out


def pathnorm_relu_ascent(const double[:, ::1] Xb, const double[::1] s,
                         W_arr, a_arr, int steps, double eta):
    """Unit-path-norm projected normalized-gradient ascent.

    See the NumPy twin for the contract. The inner loops stream one
    neuron at a time against a transposed copy of the design, so the
    working set stays cache-resident for any restart count.
    """
    cdef double[:, :, ::1] W = W_arr
    cdef double[:, ::1] a = a_arr
    cdef Py_ssize_t n = Xb.shape[0], p = Xb.shape[1]
    cdef Py_ssize_t R = W.shape[0], k = W.shape[1]
    cdef Py_ssize_t K = R * k
    cdef cnp.ndarray[double, ndim=2] XTb = np.ascontiguousarray(
        np.asarray(Xb).T)
    cdef double[:, ::1] XT = XTb                    # (p, n)
    cdef cnp.ndarray[double, ndim=1] ub = np.empty(K)
    cdef cnp.ndarray[double, ndim=2] Gb = np.empty((K, p))
    cdef cnp.ndarray[double, ndim=1] zb = np.empty(n)
    cdef cnp.ndarray[double, ndim=1] mb = np.empty(n)
    cdef double[::1] u = ub
    cdef double[:, ::1] G = Gb
    cdef double[::1] z = zb
    cdef double[::1] ms = mb
    cdef double[:, ::1] Wf = W_arr.reshape(K, p)
    cdef double inv_n = 1.0 / n
    cdef double best = 0.0, corr, acorr, coef, wc, zi, nrm, l1, g
    cdef double gw_norm, ga_norm, aj, uq, gc
    cdef Py_ssize_t step, i, q, r, j, c

    with nogil:
        for step in range(steps + 1):
            # u_q = sum_i s_i relu(w_q . xb_i); G_q = sum_i s_i 1{.>0} xb_i
            for q in range(K):
                wc = Wf[q, 0]
                for i in range(n):
                    z[i] = wc * XT[0, i]
                for c in range(1, p):
                    wc = Wf[q, c]
                    for i in range(n):
                        z[i] += wc * XT[c, i]
                uq = 0.0
                for i in range(n):
                    zi = z[i]
                    if zi > 0.0:
                        ms[i] = s[i]
                        uq += s[i] * zi
                    else:
                        ms[i] = 0.0
                u[q] = uq
                if step == steps:
                    continue
                for c in range(p):
                    gc = 0.0
                    for i in range(n):
                        gc += ms[i] * XT[c, i]
                    G[q, c] = gc
            if step == steps:
                for r in range(R):
                    corr = 0.0
                    for j in range(k):
                        corr += a[r, j] * u[r * k + j]
                    acorr = fabs(corr * inv_n)
                    if acorr > best:
                        best = acorr
                break
            for r in range(R):
                corr = 0.0
                for j in range(k):
                    corr += a[r, j] * u[r * k + j]
                acorr = fabs(corr * inv_n)
                if acorr > best:
                    best = acorr
                g = 1.0 if corr > 0.0 else (-1.0 if corr < 0.0 else 0.0)
                # per-block direction norms (a_j factors included for W)
                gw_norm = 0.0
                ga_norm = 0.0
                for j in range(k):
                    q = r * k + j
                    aj = a[r, j]
                    nrm = 0.0
                    for c in range(p):
                        nrm += G[q, c] * G[q, c]
                    gw_norm += aj * aj * nrm
                    ga_norm += u[q] * u[q]
                gw_norm = sqrt(gw_norm)
                ga_norm = sqrt(ga_norm)
                for j in range(k):
                    q = r * k + j
                    if gw_norm > 0.0:
                        coef = eta * g * a[r, j] / gw_norm
                        for c in range(p):
                            Wf[q, c] += coef * G[q, c]
                    if ga_norm > 0.0:
                        a[r, j] += eta * g * u[q] / ga_norm
                # project inner rows to unit spheres
                for j in range(k):
                    q = r * k + j
                    nrm = 0.0
                    for c in range(p):
                        nrm += Wf[q, c] * Wf[q, c]
                    nrm = sqrt(nrm)
                    if nrm == 0.0:
                        nrm = 1.0
                    for c in range(p):
                        Wf[q, c] /= nrm
                # project outer weights to the L1 sphere
                l1 = 0.0
                for j in range(k):
                    l1 += fabs(a[r, j])
                if l1 == 0.0:
                    l1 = 1.0
                for j in range(k):
                    a[r, j] /= l1
    return best
