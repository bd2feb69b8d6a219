# cython: boundscheck=False, wraparound=False, cdivision=True
# cython: language_level=3
"""Compiled grid rate kernel.

Walks the triangular (t_i, tau_k <= t_i) region row by row, fusing
exponent assembly, complex exponential and quadrature reduction, so
memory stays O(n_modes * M) instead of the O(M^2) correlator matrix.
Summation order is fixed, so results are bit-reproducible call to call.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport cos, exp, sin

cnp.import_array()

cdef enum:
    MAX_COLFAC = 8


def rate_rows(const double[::1] nodes, const double[::1] w,
              const double[:, ::1] P, const double[:, ::1] Q,
              const double[::1] base_re, const double[::1] base_im,
              const double complex[:, ::1] colfac,
              double dt, double cap):
    """See cavfgr._kernels.rate_rows."""
    cdef Py_ssize_t m1 = nodes.shape[0]
    cdef Py_ssize_t n = w.shape[0]
    cdef Py_ssize_t nl = colfac.shape[0]
    if nl > MAX_COLFAC:
        raise ValueError(f"at most {MAX_COLFAC} reduction columns supported")
    if P.shape[0] != m1 or P.shape[1] != n or Q.shape[0] != m1 or Q.shape[1] != n:
        raise ValueError("table shape mismatch")

    out_arr = np.zeros((nl, m1))
    ct_arr = np.empty(n)
    st_arr = np.empty(n)
    cdef double[:, ::1] out = out_arr
    cdef double[::1] ct = ct_arr
    cdef double[::1] st = st_arr

    cdef Py_ssize_t i, k, j, l, nfull
    cdef double ti, phi, re, im, mag, cre, cim, wt, third, half
    cdef double acc[MAX_COLFAC]
    cdef bint even

    third = dt / 3.0
    half = dt / 2.0

    for k in range(m1):
        if base_re[k] > cap:
            raise OverflowError(
                f"correlator exponent real part exceeds cap {cap}")

    for i in range(1, m1):
        ti = nodes[i]
        for j in range(n):
            ct[j] = cos(w[j] * ti)
            st[j] = sin(w[j] * ti)
        for l in range(nl):
            acc[l] = 0.0
        even = i % 2 == 0
        # Last node covered by the Simpson portion of this row.
        nfull = i if even else i - 1
        for k in range(i + 1):
            phi = 0.0
            for j in range(n):
                phi += ct[j] * P[k, j] + st[j] * Q[k, j]
            re = base_re[k]
            im = base_im[k] + phi
            mag = exp(re)
            cre = mag * cos(im)
            cim = mag * sin(im)
            if i == 1:
                wt = half
            elif k == 0:
                wt = third
            elif k < nfull:
                wt = 4.0 * third if k % 2 == 1 else 2.0 * third
            elif k == nfull:
                wt = third if even else third + half
            else:
                wt = half
            for l in range(nl):
                acc[l] += wt * (colfac[l, k].real * cre - colfac[l, k].imag * cim)
        for l in range(nl):
            out[l, i] = acc[l]
    return out_arr
