"""Numpy reference implementation of the grid rate kernel.

Materializes the full (M+1, M+1) correlator matrix via two real matrix
products, then applies the triangular quadrature weights.  Peak memory
is about 3 * 16 * (M+1)^2 bytes; the compiled backend avoids that.
"""

from __future__ import annotations

import numpy as np

_WEIGHT_CACHE: dict[tuple[int, float], np.ndarray] = {}


def quad_weights(m1: int, dt: float) -> np.ndarray:
    """Triangular quadrature weight matrix W[i, k], k <= i.

    Row i integrates over [0, i * dt]: row 0 is zero, row 1 is the
    trapezoid rule, even rows composite Simpson (dt/3 * [1, 4, 2, ...,
    4, 1]), odd rows >= 3 Simpson on the first i - 1 panels plus a
    trapezoid on the last.
    """
    key = (m1, dt)
    W = _WEIGHT_CACHE.get(key)
    if W is not None:
        return W
    W = np.zeros((m1, m1))
    third = dt / 3.0
    half = dt / 2.0
    for i in range(1, m1):
        if i == 1:
            W[1, 0] = half
            W[1, 1] = half
            continue
        n = i if i % 2 == 0 else i - 1
        W[i, 0] = third
        W[i, 1:n:2] = 4.0 * third
        W[i, 2:n:2] = 2.0 * third
        W[i, n] = third
        if n != i:
            W[i, n] += half
            W[i, i] = half
    W.setflags(write=False)
    if len(_WEIGHT_CACHE) > 8:
        _WEIGHT_CACHE.clear()
    _WEIGHT_CACHE[key] = W
    return W


def rate_rows(nodes, w, P, Q, base_re, base_im, colfac, dt, cap):
    """See cavfgr._kernels.rate_rows."""
    if np.max(base_re) > cap:
        raise OverflowError(f"correlator exponent real part exceeds cap {cap}")
    m1 = nodes.shape[0]
    wt = np.multiply.outer(nodes, w)
    phase = np.cos(wt) @ P.T
    phase += np.sin(wt) @ Q.T
    phase += base_im[None, :]
    corr = np.exp(base_re)[None, :] * (np.cos(phase) + 1j * np.sin(phase))
    W = quad_weights(m1, dt)
    out = np.empty((colfac.shape[0], m1))
    for l in range(colfac.shape[0]):
        out[l] = np.einsum("ik,ik->i", W, (corr * colfac[l][None, :]).real)
    return out
