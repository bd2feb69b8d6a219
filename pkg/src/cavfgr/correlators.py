"""Closed-form correlation functions entering golden-rule rate theory.

Nuclear correlator
------------------
With the donor surface propagating a thermal ground-state density, the
two-time correlator that drives the nonequilibrium forward rate is

    C(t, tau) = Gamma^2 Tr[rho_G e^{i H_D t / hbar} e^{-i H_A tau / hbar}
                            e^{-i H_D (t - tau) / hbar}]

and for a displaced harmonic model it evaluates exactly to

    C(t, tau) = Gamma^2 exp( i sgn omega_DA tau
                             + sum_j L_j(tau)
                             + (i / hbar) sum_j g_j sin(w_j tau / 2)
                                               * cos(w_j (t - tau / 2)) )

    L_j(tau) = -(R_j^2 w_j / 2 hbar) [ coth(beta hbar w_j / 2)
                                       * (1 - cos(w_j tau)) + i sin(w_j tau) ]

with sgn = +1 and g_j = -2 R_j S_j w_j for the forward direction, and
sgn = -1 and g_j = +2 R_j (R_j + S_j) w_j for the backward direction
(the roles of donor and acceptor swap, so the relevant displacement
becomes R_j + S_j).  Re L_j <= 0, so |C| <= Gamma^2 always.

Equilibrium correlator
----------------------
Preparing the thermal state on the parent surface itself removes the
t dependence: S_j -> 0 (forward) or S_j -> -R_j (backward) kills the
mixed term and leaves C_eq(tau) = Gamma^2 exp(i sgn omega_DA tau +
sum_j L_j(tau)).

Photon factor
-------------
A thermal, lossless cavity mode multiplies the correlator by

    C_p(tau) = 1 + alpha [ nbar e^{+i w_p tau} + (nbar + 1) e^{-i w_p tau} ],

alpha = (hbar g_p / Gamma)^2 and nbar the Bose occupation.  This equals
the hyperbolic form 1 + (hbar G^2 / 2 w_p Gamma^2) cosh(beta hbar w_p/2
- i w_p tau) / sinh(beta hbar w_p / 2) identically; the exponential form
is the overflow-safe one and is what `photon_factor` computes.

All per-mode reductions use numpy pairwise summation; repeated calls
are bit-reproducible and mode-permutation stable to below 1e-13.
"""

from __future__ import annotations

import numpy as np

from .model import CavityMode, DisplacedHarmonicModel, Direction, ThermalEnv

DEFAULT_EXP_CAP = 700.0


class CorrelatorOverflowError(FloatingPointError):
    """Raised when a correlator exponent's real part exceeds the cap."""


def _direction_tables(model: DisplacedHarmonicModel, direction: Direction):
    """Per-mode coefficient tables shared by the scalar and grid paths.

    Returns (w, R, g, sgn) where g is the mixed-term amplitude and sgn
    the sign of the bias phase.
    """
    w = model.mode_freqs
    r = model.da_shifts
    s = model.dg_shifts
    if direction == Direction.FORWARD:
        return w, r, -2.0 * r * s * w, 1.0
    return w, r, 2.0 * r * (r + s) * w, -1.0


def _l0_terms(w, r, beta, hbar, tau):
    """Column sum_j L_j(tau) for scalar or 1-d array tau.

    Evaluated with expm1-free trig; coth is safe because beta, w > 0.
    """
    tau = np.asarray(tau, dtype=np.float64)
    pref = r * r * w / (2.0 * hbar)
    cth = 1.0 / np.tanh(0.5 * beta * hbar * w)
    wt = np.multiply.outer(tau, w)
    re = -np.sum(pref * cth * (1.0 - np.cos(wt)), axis=-1)
    im = -np.sum(pref * np.sin(wt), axis=-1)
    return re, im


def nuclear_corr(
    model: DisplacedHarmonicModel,
    env: ThermalEnv,
    direction: Direction,
    t: float,
    tau,
    cap: float = DEFAULT_EXP_CAP,
):
    """Exact nuclear correlator C(t, tau) for one or many tau.

    Parameters
    ----------
    t : float
        Outer time, t >= 0.
    tau : float or 1-d array
        Inner time(s), |tau| <= t.
    cap : float
        Guard on the exponent's real part; exceeding it raises
        CorrelatorOverflowError instead of overflowing.

    Returns a complex scalar for scalar tau, else a complex array.
    Cost is O(n_modes) per point; use the rate routines for dense
    (t, tau) grids.
    """
    w, r, g, sgn = _direction_tables(model, direction)
    hbar = model.hbar
    tau_arr = np.asarray(tau, dtype=np.float64)
    re, im = _l0_terms(w, r, env.beta, hbar, tau_arr)
    if np.max(re, initial=-np.inf) > cap:
        raise CorrelatorOverflowError(
            f"correlator exponent real part exceeds cap {cap}"
        )
    mixed = np.sum(
        g * np.sin(np.multiply.outer(tau_arr, w) / 2.0)
        * np.cos(np.multiply.outer(t - tau_arr / 2.0, w)),
        axis=-1,
    )
    val = model.gamma ** 2 * np.exp(re + 1j * (sgn * model.omega_DA * tau_arr + im + mixed / hbar))
    return complex(val) if np.isscalar(tau) else val


def equilibrium_corr(
    model: DisplacedHarmonicModel,
    env: ThermalEnv,
    direction: Direction,
    tau,
    cap: float = DEFAULT_EXP_CAP,
):
    """Thermal-equilibrium correlator C_eq(tau); independent of t.

    Equals `nuclear_corr` on a model whose initial state is thermal on
    the parent surface (dg_shifts = 0 forward, -da_shifts backward).
    """
    w, r, _, sgn = _direction_tables(model, direction)
    tau_arr = np.asarray(tau, dtype=np.float64)
    re, im = _l0_terms(w, r, env.beta, model.hbar, tau_arr)
    if np.max(re, initial=-np.inf) > cap:
        raise CorrelatorOverflowError(
            f"correlator exponent real part exceeds cap {cap}"
        )
    val = model.gamma ** 2 * np.exp(re + 1j * (sgn * model.omega_DA * tau_arr + im))
    return complex(val) if np.isscalar(tau) else val


def mean_photon_number(env: ThermalEnv, omega_p: float, hbar: float = 1.0) -> float:
    """Bose occupation 1 / (exp(beta hbar omega_p) - 1), underflow-safe."""
    return 1.0 / np.expm1(env.beta * hbar * omega_p)


def coupling_alpha(cavity: CavityMode, gamma: float, hbar: float = 1.0) -> float:
    """Dimensionless cavity weight alpha = (hbar g_p / Gamma)^2."""
    if gamma == 0.0:
        if cavity.g_p == 0.0:
            return 0.0
        raise ZeroDivisionError("alpha undefined: g_p > 0 with gamma = 0")
    return (hbar * cavity.g_p / gamma) ** 2


def photon_factor(
    cavity: CavityMode,
    gamma: float,
    env: ThermalEnv,
    tau,
    hbar: float = 1.0,
):
    """Thermal cavity-mode factor C_p(tau) multiplying the correlator.

    Stable for arbitrarily large beta * hbar * omega_p.  Scalar tau
    gives a complex scalar, array tau a complex array.
    """
    alpha = coupling_alpha(cavity, gamma, hbar)
    nbar = mean_photon_number(env, cavity.omega_p, hbar)
    tau_arr = np.asarray(tau, dtype=np.float64)
    phase = cavity.omega_p * tau_arr
    val = 1.0 + alpha * (nbar * np.exp(1j * phase) + (nbar + 1.0) * np.exp(-1j * phase))
    return complex(val) if np.isscalar(tau) else val


def _photon_factor_hyperbolic(cavity, gamma, env, tau, hbar=1.0):
    """Literal hyperbolic-ratio form of C_p; for cross-checks only."""
    G = cavity.coupling_G(hbar)
    a = 0.5 * env.beta * hbar * cavity.omega_p
    z = a - 1j * cavity.omega_p * np.asarray(tau, dtype=np.float64)
    ratio = np.cosh(z) / np.sinh(a)
    return 1.0 + (hbar * G ** 2 / (2.0 * cavity.omega_p * gamma ** 2)) * ratio


def imt_gap_mean(model: DisplacedHarmonicModel, direction: Direction, t):
    """Mean energy gap <U(t)> over the evolving nuclear density.

    Forward:  hbar omega_DA - sum_j [ w_j^2 R_j^2 / 2
                                      + w_j^2 R_j S_j cos(w_j t) ]
    Backward: -hbar omega_DA + sum_j [ w_j^2 R_j (R_j + S_j) cos(w_j t)
                                       - w_j^2 R_j^2 / 2 ]

    Scalar t gives a float, array t a float array.
    """
    w = model.mode_freqs
    r = model.da_shifts
    s = model.dg_shifts
    t_arr = np.asarray(t, dtype=np.float64)
    coswt = np.cos(np.multiply.outer(t_arr, w))
    er = 0.5 * np.sum(w * w * r * r)
    if direction == Direction.FORWARD:
        val = model.hbar * model.omega_DA - er - np.sum(w * w * r * s * coswt, axis=-1)
    else:
        val = -model.hbar * model.omega_DA - er + np.sum(w * w * r * (r + s) * coswt, axis=-1)
    return float(val) if np.isscalar(t) else val


def imt_gap_variance(model: DisplacedHarmonicModel, env: ThermalEnv) -> float:
    """Classical gap variance sigma^2 = sum_j w_j^2 R_j^2 / beta = 2 E_r / beta."""
    w = model.mode_freqs
    return float(np.sum(w * w * model.da_shifts ** 2)) / env.beta


def rate_tables(
    model: DisplacedHarmonicModel,
    env: ThermalEnv,
    direction: Direction,
    nodes: np.ndarray,
    cap: float = DEFAULT_EXP_CAP,
):
    """Precomputed per-node tables for the grid rate kernels.

    For the shared t/tau grid ``nodes`` returns (base_re, base_im, P, Q)
    such that

        C(t_i, tau_k) / Gamma^2 = exp( base_re[k] + i ( base_im[k]
              + sum_j cos(w_j t_i) P[k, j] + sin(w_j t_i) Q[k, j] ) )

    using sin(w tau/2) cos(w (t - tau/2)) = cos(w t) sin(w tau) / 2
    + sin(w t) sin(w tau / 2)^2.  P and Q absorb g_j / hbar.
    """
    w, r, g, sgn = _direction_tables(model, direction)
    hbar = model.hbar
    base_re, l0_im = _l0_terms(w, r, env.beta, hbar, nodes)
    if np.max(base_re) > cap:
        raise CorrelatorOverflowError(
            f"correlator exponent real part exceeds cap {cap}"
        )
    base_im = sgn * model.omega_DA * nodes + l0_im
    wtau = np.multiply.outer(nodes, w)
    P = (0.5 * g / hbar) * np.sin(wtau)
    Q = (g / hbar) * np.sin(0.5 * wtau) ** 2
    return (
        np.ascontiguousarray(base_re),
        np.ascontiguousarray(base_im),
        np.ascontiguousarray(P),
        np.ascontiguousarray(Q),
    )
