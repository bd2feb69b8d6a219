"""Backend selection for the grid-correlator rate kernel.

Two interchangeable implementations of ``rate_rows`` exist:

- ``_fast``: a compiled Cython kernel that walks the triangular
  (t_i, tau_k <= t_i) region row by row in O(n_modes * M) memory,
- ``_ref``: a vectorized numpy reference that materializes the full
  correlator matrix, O(M^2) memory.

The active backend is chosen once, lazily: the ``CAVFGR_BACKEND``
environment variable may force ``"compiled"`` or ``"numpy"``; the
default ``"auto"`` takes the compiled kernel when importable and falls
back to numpy.  Both are deterministic call-to-call; they agree with
each other to roughly 1e-12 relative (summation orders differ).
"""

from __future__ import annotations

import os

_ACTIVE = None
_ACTIVE_NAME = None


def get_backend(name: str | None = None):
    """Return (module, name) for the requested backend."""
    name = name or os.environ.get("CAVFGR_BACKEND", "auto")
    if name not in ("auto", "compiled", "numpy"):
        raise ValueError(f"unknown kernel backend {name!r}")
    if name in ("auto", "compiled"):
        try:
            from . import _fast
            return _fast, "compiled"
        except ImportError:
            if name == "compiled":
                raise
    from . import _ref
    return _ref, "numpy"


def _active():
    global _ACTIVE, _ACTIVE_NAME
    if _ACTIVE is None:
        _ACTIVE, _ACTIVE_NAME = get_backend()
    return _ACTIVE


def active_backend() -> str:
    """Name of the backend in use: "compiled" or "numpy"."""
    _active()
    return _ACTIVE_NAME


def rate_rows(nodes, w, P, Q, base_re, base_im, colfac, dt, cap):
    """Triangular golden-rule reductions of the grid correlator.

    For the shared node grid t_i = tau_i = i * dt, i = 0..M, computes

        out[l, i] = sum_{k=0..i} W_ik Re[ colfac[l, k] * C_ik ]

    where C_ik = exp(base_re[k] + i (base_im[k] + sum_j cos(w_j t_i)
    P[k, j] + sin(w_j t_i) Q[k, j])) and W_ik are closed Newton-Cotes
    weights on [0, t_i]: zero row at i = 0, trapezoid at i = 1,
    composite Simpson for even i, Simpson plus trapezoid tail for odd i.

    Raises OverflowError if any base_re[k] exceeds ``cap``.
    """
    return _active().rate_rows(nodes, w, P, Q, base_re, base_im, colfac, dt, cap)
