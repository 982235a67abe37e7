# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: batched Dirichlet sums, twisted Euler products,
phase-condition masks.  Mirrors zetarec.kernels.pure exactly."""

import numpy as np

cimport numpy as cnp
from libc.math cimport cos, fabs, sin

cnp.import_array()


def dirichlet_sums(double[::1] coef, double[::1] logn, double[::1] ts):
    """out[i] = sum_j coef[j] * exp(-1i * ts[i] * logn[j])."""
    cdef Py_ssize_t n = ts.shape[0]
    cdef Py_ssize_t m = coef.shape[0]
    if logn.shape[0] < m:
        raise ValueError("logn shorter than coef")
    out = np.empty(n, dtype=np.complex128)
    cdef double complex[::1] ov = out
    cdef Py_ssize_t i, j
    cdef double t, re, im, ph
    for i in range(n):
        t = ts[i]
        re = 0.0
        im = 0.0
        for j in range(m):
            ph = t * logn[j]
            re += coef[j] * cos(ph)
            im -= coef[j] * sin(ph)
        ov[i] = re + 1j * im
    return out


def torus_product_diff(double[::1] theta, long j, long k,
                       double complex[:, ::1] base):
    """Difference of two phase-twisted Euler products per grid node.

    base[node, p] holds p^{-s_node}; theta[p] the unit phase of prime p.
    Raises ZeroDivisionError when a factor vanishes exactly.
    """
    cdef Py_ssize_t R = theta.shape[0]
    cdef Py_ssize_t nn = base.shape[0]
    if base.shape[1] != R:
        raise ValueError("base width must match theta length")
    wj_arr = np.empty(R, dtype=np.complex128)
    wk_arr = np.empty(R, dtype=np.complex128)
    cdef double complex[::1] wj = wj_arr
    cdef double complex[::1] wk = wk_arr
    cdef Py_ssize_t p, node
    cdef double a
    for p in range(R):
        a = j * theta[p]
        wj[p] = cos(a) + 1j * sin(a)
        a = k * theta[p]
        wk[p] = cos(a) + 1j * sin(a)
    out = np.empty(nn, dtype=np.complex128)
    cdef double complex[::1] ov = out
    cdef double complex dj, dk, fj, fk
    for node in range(nn):
        dj = 1.0
        dk = 1.0
        for p in range(R):
            fj = 1.0 - wj[p] * base[node, p]
            fk = 1.0 - wk[p] * base[node, p]
            if fj == 0 or fk == 0:
                raise ZeroDivisionError("vanishing Euler factor")
            dj = dj * fj
            dk = dk * fk
        ov[node] = 1.0 / dj - 1.0 / dk
    return out


def kron_mask(double[::1] taus, double[::1] freqs, double[::1] deltas):
    """mask[i] = all_c ( 2*|sin(taus[i]*freqs[c]/2)| < deltas[c] )."""
    cdef Py_ssize_t n = taus.shape[0]
    cdef Py_ssize_t m = freqs.shape[0]
    if deltas.shape[0] != m:
        raise ValueError("freqs and deltas must have equal length")
    mask = np.ones(n, dtype=np.uint8)
    cdef cnp.uint8_t[::1] mv = mask
    cdef Py_ssize_t i, c
    cdef double t
    for i in range(n):
        t = taus[i]
        for c in range(m):
            if 2.0 * fabs(sin(t * freqs[c] * 0.5)) >= deltas[c]:
                mv[i] = 0
                break
    return mask
