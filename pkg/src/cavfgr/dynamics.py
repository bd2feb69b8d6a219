"""Donor/acceptor population dynamics driven by time-resolved rates.

The two-state kinetic master equation

    dP_D/dt = -k_f(t) P_D + k_b(t) (1 - P_D),     P_D(0) = 1

is integrated with classical fourth-order Runge-Kutta on the rate
grid.  Midpoint rate values come from 4-point Lagrange interpolation
(cubic, matching the integrator's order), so the propagation needs no
rate evaluations beyond the stored series.  P_A = 1 - P_D identically,
which makes conservation exact by construction.  Negative transient
rate values are legitimate input; populations may then transiently
leave [0, 1].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import Direction
from .rates import RateSeries, TimeGrid, _series


@dataclass(frozen=True)
class PopulationTrajectory:
    """Donor population on a TimeGrid; acceptor population is 1 - P_D."""

    grid: TimeGrid
    p_donor: np.ndarray
    variant: str

    def __post_init__(self):
        p = np.asarray(self.p_donor, dtype=np.float64).copy()
        if p.shape != (self.grid.n_steps + 1,):
            raise ValueError("p_donor length must match grid node count")
        if not np.all(np.isfinite(p)):
            raise ValueError("populations must be finite")
        p.setflags(write=False)
        object.__setattr__(self, "p_donor", p)

    @property
    def p_acceptor(self) -> np.ndarray:
        return 1.0 - self.p_donor


# Cubic Lagrange weights at the midpoint of nodes (1, 2) in a 4-node
# stencil at offsets (0, 1, 2, 3), and at the midpoint of (0, 1).
_MID_INTERIOR = np.array([-1.0, 9.0, 9.0, -1.0]) / 16.0
_MID_LEADING = np.array([5.0, 15.0, -5.0, 1.0]) / 16.0


def _midpoints(values: np.ndarray) -> np.ndarray:
    """Cubic-interpolated values at every half step of a uniform series."""
    n = values.size - 1
    if n < 3:
        # Quadratic fallback for very short series.
        mids = np.empty(n)
        for i in range(n):
            lo = min(max(i - 1, 0), n - 2)
            a, b, c = values[lo], values[lo + 1], values[lo + 2]
            x = i + 0.5 - lo
            mids[i] = (
                a * (x - 1.0) * (x - 2.0) / 2.0
                - b * x * (x - 2.0)
                + c * x * (x - 1.0) / 2.0
            )
        return mids
    mids = np.empty(n)
    stacked = np.lib.stride_tricks.sliding_window_view(values, 4)
    mids[1:n - 1] = stacked @ _MID_INTERIOR
    mids[0] = values[:4] @ _MID_LEADING
    mids[n - 1] = values[n::-1][:4] @ _MID_LEADING
    return mids


def propagate(
    k_forward: RateSeries,
    k_backward: RateSeries,
    p_donor_0: float = 1.0,
) -> PopulationTrajectory:
    """Integrate the two-state master equation over the rate grid.

    Both series must share one grid and one variant, with directions
    forward and backward respectively.
    """
    if k_forward.grid != k_backward.grid:
        raise ValueError("rate series grids differ")
    if k_forward.variant != k_backward.variant:
        raise ValueError("rate series variants differ")
    if (k_forward.direction, k_backward.direction) != (
        Direction.FORWARD,
        Direction.BACKWARD,
    ):
        raise ValueError("pass (forward, backward) rate series in that order")

    kf, kb = k_forward.values, k_backward.values
    kf_mid, kb_mid = _midpoints(kf), _midpoints(kb)
    dt = k_forward.grid.dt
    n = k_forward.grid.n_steps

    def deriv(p, f, b):
        return -f * p + b * (1.0 - p)

    p = np.empty(n + 1)
    p[0] = p_donor_0
    for i in range(n):
        y = p[i]
        s1 = deriv(y, kf[i], kb[i])
        s2 = deriv(y + 0.5 * dt * s1, kf_mid[i], kb_mid[i])
        s3 = deriv(y + 0.5 * dt * s2, kf_mid[i], kb_mid[i])
        s4 = deriv(y + dt * s3, kf[i + 1], kb[i + 1])
        p[i + 1] = y + dt / 6.0 * (s1 + 2.0 * (s2 + s3) + s4)
    return PopulationTrajectory(grid=k_forward.grid, p_donor=p, variant=k_forward.variant)


def extend_with_plateau(series: RateSeries, t_max: float) -> RateSeries:
    """Continue a rate series beyond its grid at the frozen plateau value.

    The extended grid keeps dt; t_max must exceed the original span and
    remain an integer multiple of dt.
    """
    if t_max <= series.grid.t_max:
        raise ValueError("extension must lengthen the grid")
    grid = TimeGrid(t_max=t_max, dt=series.grid.dt)
    values = np.full(grid.n_steps + 1, series.plateau())
    values[: series.values.size] = series.values
    return _series(grid, values, series.variant, series.direction)
