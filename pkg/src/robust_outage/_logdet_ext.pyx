# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled batch log-det kernel.

For each trial k computes ln det(I + snr * A_k A_k^H) with A_k = H_k Q, using
whichever Gram matrix (n_rx x n_rx or n_tx x n_tx) is smaller and an in-place
complex Cholesky.  A failed pivot leaves NaN so the caller can retry that
trial with an eigenvalue route.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport log, sqrt, NAN

cnp.import_array()


cdef double _chol_logdet(double complex[:, ::1] g, Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t i, j, k
    cdef double complex acc
    cdef double piv, out = 0.0
    for j in range(n):
        piv = g[j, j].real
        for k in range(j):
            piv -= g[j, k].real * g[j, k].real + g[j, k].imag * g[j, k].imag
        if not piv > 0.0:
            return NAN
        piv = sqrt(piv)
        g[j, j] = piv
        out += 2.0 * log(piv)
        for i in range(j + 1, n):
            acc = g[i, j]
            for k in range(j):
                acc = acc - g[i, k] * g[j, k].conjugate()
            g[i, j] = acc / piv
    return out


def logdet_batch(double complex[:, :, ::1] h, double complex[:, ::1] q, double snr):
    """ln det(I + snr H_k Q Q^H H_k^H) for every k in a (trials, n_rx, n_tx) stack."""
    cdef Py_ssize_t trials = h.shape[0]
    cdef Py_ssize_t n_rx = h.shape[1]
    cdef Py_ssize_t n_tx = h.shape[2]
    cdef Py_ssize_t r = q.shape[1]
    cdef Py_ssize_t n = n_rx if n_rx <= r else r
    cdef bint outer = n_rx <= r
    cdef Py_ssize_t t, i, j, k
    cdef double complex acc
    cdef cnp.ndarray[cnp.float64_t, ndim=1] res_arr = np.empty(trials, dtype=np.float64)
    cdef double[::1] res = res_arr
    cdef double complex[:, ::1] a = np.empty((n_rx, r), dtype=np.complex128)
    cdef double complex[:, ::1] g = np.empty((n, n), dtype=np.complex128)
    if q.shape[0] != n_tx:
        raise ValueError("covariance factor does not match n_tx")
    with nogil:
        for t in range(trials):
            for i in range(n_rx):
                for j in range(r):
                    acc = 0.0
                    for k in range(n_tx):
                        acc = acc + h[t, i, k] * q[k, j]
                    a[i, j] = acc
            # lower triangle of the Gram matrix is all the factorization reads
            for i in range(n):
                for j in range(i + 1):
                    acc = 0.0
                    if outer:
                        for k in range(r):
                            acc = acc + a[i, k] * a[j, k].conjugate()
                    else:
                        for k in range(n_rx):
                            acc = acc + a[k, i].conjugate() * a[k, j]
                    g[i, j] = snr * acc
                g[i, i] = g[i, i] + 1.0
            res[t] = _chol_logdet(g, n)
    return res_arr
