"""Golden-rule rate coefficients, exact and Gaussian-approximated.

Time-resolved nonequilibrium rate (exact for displaced harmonic models):

    k(t) = (2 / hbar^2) Re  integral_0^t  dtau  F(tau) C(t, tau)

with C the nuclear correlator and F an optional cavity factor.  The
shared uniform grid carries both t and tau; the tau integral uses
closed Newton-Cotes rows (trapezoid at one panel, composite Simpson for
even rows, Simpson plus trapezoid tail for odd rows), fourth-order in
dt away from the first row.

Equilibrium rate: same integrand with the t-independent equilibrium
correlator, integrated over tau in [0, inf) as a running Simpson
integral until it stabilizes.

Gaussian family: a second-order cumulant treatment of the instantaneous
energy gap gives

    k_imt(t) = (2 Gamma^2 / hbar^2) Re integral_0^t dtau
               exp( i <U>_t tau / hbar - sigma^2 tau^2 / (2 hbar^2) )

evaluated in closed form via the Faddeeva function, its long-time limit
(a Gaussian lineshape at the current mean gap), and the classical
closed form at the dephased gap (`marcus_rate`).

A thermal cavity photon mode enters every family the same way: with
alpha = (hbar g_p / Gamma)^2 and nbar the Bose occupation,

    k_cav = k_free + alpha [ nbar k(+omega_p) + (nbar + 1) k(-omega_p) ]

where k(+-omega_p) is the same rate with the integrand dressed by
exp(+-i omega_p tau) (equivalently, the energy bias shifted by
-+ hbar omega_p in the Gaussian family's gap mean).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_simpson
from scipy.special import wofz

from . import _kernels
from .correlators import (
    DEFAULT_EXP_CAP,
    CorrelatorOverflowError,
    coupling_alpha,
    equilibrium_corr,
    imt_gap_mean,
    imt_gap_variance,
    mean_photon_number,
    photon_factor,
    rate_tables,
)
from .model import CavityMode, DisplacedHarmonicModel, Direction, ThermalEnv
from .model import reorganization_energy

VARIANTS = ("NE", "C-NE", "EQ", "C-EQ", "IMT", "C-IMT", "LT-IMT", "C-LT-IMT")

_GRID_TOL = 1e-9


class ConvergenceError(ArithmeticError):
    """Raised when the equilibrium running integral fails to stabilize."""


@dataclass(frozen=True)
class TimeGrid:
    """Uniform time grid 0, dt, ..., t_max with t_max an exact multiple of dt."""

    t_max: float
    dt: float

    def __post_init__(self):
        if not (np.isfinite(self.dt) and self.dt > 0.0):
            raise ValueError("dt must be finite and positive")
        if not (np.isfinite(self.t_max) and self.t_max > 0.0):
            raise ValueError("t_max must be finite and positive")
        m = round(self.t_max / self.dt)
        if m < 2 or abs(m * self.dt - self.t_max) > _GRID_TOL * max(1.0, self.t_max):
            raise ValueError(
                f"t_max = {self.t_max} is not an integer multiple (>= 2) of dt = {self.dt}"
            )

    @property
    def n_steps(self) -> int:
        return round(self.t_max / self.dt)

    def nodes(self) -> np.ndarray:
        return np.arange(self.n_steps + 1) * self.dt


@dataclass(frozen=True)
class RateSeries:
    """Rate coefficient sampled on a TimeGrid, tagged by variant and direction."""

    grid: TimeGrid
    values: np.ndarray
    variant: str
    direction: Direction

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64).copy()
        if v.shape != (self.grid.n_steps + 1,):
            raise ValueError("values length must match grid node count")
        if not np.all(np.isfinite(v)):
            raise ValueError("rate values must be finite")
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def plateau(self) -> float:
        """Final-node value, the plateau estimate k(t_max)."""
        return float(self.values[-1])


def _series(grid, values, variant, direction) -> RateSeries:
    return RateSeries(grid=grid, values=values, variant=variant,
                      direction=Direction(direction))


def _kernel_rates(model, env, direction, grid, colfac, cap):
    """Shared entry to the grid kernel; returns (L, M+1) real reductions."""
    nodes = grid.nodes()
    base_re, base_im, P, Q = rate_tables(model, env, direction, nodes, cap)
    colfac = np.ascontiguousarray(colfac, dtype=np.complex128)
    try:
        red = _kernels.rate_rows(nodes, model.mode_freqs, P, Q,
                                 base_re, base_im, colfac, grid.dt, cap)
    except OverflowError as exc:
        raise CorrelatorOverflowError(str(exc)) from exc
    return red * (2.0 * model.gamma ** 2 / model.hbar ** 2)


def nefgr_free(
    model: DisplacedHarmonicModel,
    env: ThermalEnv,
    direction: Direction,
    grid: TimeGrid,
    cap: float = DEFAULT_EXP_CAP,
) -> RateSeries:
    """Cavity-free nonequilibrium rate k(t) on the grid; k(0) = 0."""
    ones = np.ones((1, grid.n_steps + 1), dtype=np.complex128)
    red = _kernel_rates(model, env, direction, grid, ones, cap)
    return _series(grid, red[0], "NE", direction)


def nefgr_dressed(
    model: DisplacedHarmonicModel,
    env: ThermalEnv,
    direction: Direction,
    grid: TimeGrid,
    shift: float,
    cap: float = DEFAULT_EXP_CAP,
) -> RateSeries:
    """Nonequilibrium rate with the integrand dressed by exp(i shift tau).

    ``shift`` is a signed angular frequency.  For the forward direction
    this equals `nefgr_free` on a model with omega_DA + shift; shift = 0
    reproduces `nefgr_free` bit-identically.
    """
    nodes = grid.nodes()
    colfac = np.exp(1j * shift * nodes)[None, :]
    red = _kernel_rates(model, env, direction, grid, colfac, cap)
    return _series(grid, red[0], "NE", direction)


def _cavity_closure(model, cavity, env):
    alpha = coupling_alpha(cavity, model.gamma, model.hbar)
    nbar = mean_photon_number(env, cavity.omega_p, model.hbar)
    return alpha, nbar


def nefgr_cavity(
    model: DisplacedHarmonicModel,
    cavity: CavityMode,
    env: ThermalEnv,
    direction: Direction,
    grid: TimeGrid,
    cap: float = DEFAULT_EXP_CAP,
) -> RateSeries:
    """Cavity-modified nonequilibrium rate via the three-channel form.

    k = k_free + alpha [ nbar k(+omega_p) + (nbar + 1) k(-omega_p) ],
    all three reductions sharing one correlator evaluation.  With
    g_p = 0 the result equals `nefgr_free` bit-identically.
    """
    if cavity.g_p == 0.0:
        free = nefgr_free(model, env, direction, grid, cap)
        return _series(grid, free.values, "C-NE", direction)
    nodes = grid.nodes()
    phase = cavity.omega_p * nodes
    colfac = np.stack([
        np.ones_like(nodes, dtype=np.complex128),
        np.exp(1j * phase),
        np.exp(-1j * phase),
    ])
    red = _kernel_rates(model, env, direction, grid, colfac, cap)
    alpha, nbar = _cavity_closure(model, cavity, env)
    values = red[0] + alpha * (nbar * red[1] + (nbar + 1.0) * red[2])
    return _series(grid, values, "C-NE", direction)


def nefgr_cavity_direct(
    model: DisplacedHarmonicModel,
    cavity: CavityMode,
    env: ThermalEnv,
    direction: Direction,
    grid: TimeGrid,
    cap: float = DEFAULT_EXP_CAP,
) -> RateSeries:
    """Cavity-modified rate via direct quadrature of C_p(tau) C(t, tau).

    Mathematically identical to `nefgr_cavity`; kept as an independent
    evaluation path for cross-checks.
    """
    colfac = photon_factor(cavity, model.gamma, env, grid.nodes(), model.hbar)[None, :]
    red = _kernel_rates(model, env, direction, grid, colfac, cap)
    return _series(grid, red[0], "C-NE", direction)


def _efgr_defaults(model, env, extra_freqs):
    """Step and ceiling for the equilibrium running integral."""
    w = model.mode_freqs
    sigma = math.sqrt(imt_gap_variance(model, env))
    scales = [float(np.max(w)), abs(model.omega_DA), sigma / model.hbar]
    scales += [abs(f) for f in extra_freqs]
    w_fast = max(s for s in scales if s > 0.0)
    dtau = 2.0 * math.pi / (256.0 * w_fast)
    tau_ceiling = 200.0 / float(np.median(w))
    return dtau, tau_ceiling


def _efgr_single(model, env, direction, shift, rtol, dtau, tau_ceiling,
                 probe_frac, cap):
    """Running Simpson integral of the equilibrium integrand.

    Doubles the integration window until the running integral's
    variation over the trailing ``probe_frac`` of the window drops
    below rtol relative to its overall scale.
    """
    pref = 2.0 / model.hbar ** 2
    n = 2048
    while True:
        n_nodes = n + 1
        tau = np.arange(n_nodes) * dtau
        vals = equilibrium_corr(model, env, direction, tau, cap)
        if shift != 0.0:
            vals = vals * np.exp(1j * shift * tau)
        running = pref * cumulative_simpson(vals.real, dx=dtau, initial=0.0)
        scale = float(np.max(np.abs(running)))
        tail = running[int(n_nodes * (1.0 - probe_frac)):]
        spread = float(np.max(tail) - np.min(tail))
        if spread <= rtol * max(scale, 1e-300):
            return float(running[-1])
        if tau[-1] >= tau_ceiling:
            raise ConvergenceError(
                "equilibrium rate integral did not stabilize by "
                f"tau = {tau[-1]:.6g} (spread {spread:.3e}, scale {scale:.3e}); "
                "discrete sparse baths may never dephase"
            )
        n *= 2


def efgr(
    model: DisplacedHarmonicModel,
    env: ThermalEnv,
    direction: Direction,
    cavity: CavityMode | None = None,
    shift: float = 0.0,
    rtol: float = 1e-8,
    dtau: float | None = None,
    tau_ceiling: float | None = None,
    probe_frac: float = 0.1,
    cap: float = DEFAULT_EXP_CAP,
) -> float:
    """Equilibrium golden-rule rate constant.

    With ``cavity`` present (and g_p > 0) returns the three-channel
    cavity combination; ``shift`` dresses the integrand by
    exp(i shift tau) and is mutually exclusive with ``cavity``.
    Raises ConvergenceError if the running integral never stabilizes,
    which is the honest outcome for sparse discrete baths.
    """
    if cavity is not None and shift != 0.0:
        raise ValueError("pass either cavity or shift, not both")
    free_like = cavity is None or cavity.g_p == 0.0
    extra = [shift] if free_like else [cavity.omega_p]
    dtau_eff, ceil_eff = _efgr_defaults(model, env, extra)
    if dtau is not None:
        dtau_eff = dtau
    if tau_ceiling is not None:
        ceil_eff = tau_ceiling
    args = (rtol, dtau_eff, ceil_eff, probe_frac, cap)
    if free_like:
        return _efgr_single(model, env, direction, shift, *args)
    alpha, nbar = _cavity_closure(model, cavity, env)
    k0 = _efgr_single(model, env, direction, 0.0, *args)
    kp = _efgr_single(model, env, direction, +cavity.omega_p, *args)
    km = _efgr_single(model, env, direction, -cavity.omega_p, *args)
    return k0 + alpha * (nbar * kp + (nbar + 1.0) * km)


def _imt_closed_form(gamma, hbar, u_mean, sigma2, t):
    """Exact Gaussian tau-integral via the Faddeeva function.

    (2 Gamma^2 / hbar^2) Re int_0^t exp(i u tau / hbar
    - sigma^2 tau^2 / 2 hbar^2) dtau
      = (Gamma^2 / hbar) sqrt(2 pi) / sigma *
        [ exp(-y^2) - exp(-x^2) Re( exp(2 i x y) w(y + i x) ) ]
    with x = sigma t / (sqrt(2) hbar), y = u / (sqrt(2) sigma).
    """
    sigma = math.sqrt(sigma2)
    x = sigma * np.asarray(t) / (math.sqrt(2.0) * hbar)
    y = np.asarray(u_mean) / (math.sqrt(2.0) * sigma)
    pref = gamma ** 2 / hbar * math.sqrt(2.0 * math.pi) / sigma
    core = np.exp(-y * y) - np.exp(-x * x) * (np.exp(2j * x * y) * wofz(y + 1j * x)).real
    return pref * core


def imt(
    model: DisplacedHarmonicModel,
    env: ThermalEnv,
    direction: Direction,
    grid: TimeGrid,
    dress_shift: float = 0.0,
) -> RateSeries:
    """Instantaneous-Gaussian rate: second-order cumulant at the moving gap.

    The integrand freezes the gap statistics at time t, with mean
    <U>_t + dress_shift (``dress_shift`` is an energy, 0 or -+ hbar
    omega_p for cavity channels) and thermal variance sigma^2; the tau
    integral is then exact.  k(0) = 0 analytically and is emitted as
    exactly 0.  Requires sigma^2 > 0.
    """
    sigma2 = imt_gap_variance(model, env)
    if sigma2 <= 0.0:
        raise ValueError("gap variance is zero; Gaussian rate family undefined")
    nodes = grid.nodes()
    u = imt_gap_mean(model, direction, nodes) + dress_shift
    values = _imt_closed_form(model.gamma, model.hbar, u, sigma2, nodes)
    values[0] = 0.0
    return _series(grid, values, "IMT", direction)


def lt_imt(
    model: DisplacedHarmonicModel,
    env: ThermalEnv,
    direction: Direction,
    grid: TimeGrid,
    dress_shift: float = 0.0,
) -> RateSeries:
    """Long-time limit of `imt`: Gaussian lineshape at the moving mean gap.

    k(t) = (Gamma^2 / hbar) sqrt(2 pi / sigma^2)
           * exp( -(<U>_t + dress_shift)^2 / (2 sigma^2) ).
    """
    sigma2 = imt_gap_variance(model, env)
    if sigma2 <= 0.0:
        raise ValueError("gap variance is zero; Gaussian rate family undefined")
    nodes = grid.nodes()
    u = imt_gap_mean(model, direction, nodes) + dress_shift
    pref = model.gamma ** 2 / model.hbar * math.sqrt(2.0 * math.pi / sigma2)
    values = pref * np.exp(-u * u / (2.0 * sigma2))
    return _series(grid, values, "LT-IMT", direction)


def imt_cavity(
    model: DisplacedHarmonicModel,
    cavity: CavityMode,
    env: ThermalEnv,
    direction: Direction,
    grid: TimeGrid,
    long_time: bool = False,
) -> RateSeries:
    """Cavity-modified Gaussian rate (instantaneous or long-time flavor).

    Dressing by exp(-+i omega_p tau) shifts the gap mean by -+ hbar
    omega_p in both directions, so the three-channel combination reuses
    the free evaluator.  g_p = 0 returns the free series bit-identically.
    """
    fn = lt_imt if long_time else imt
    variant = "C-LT-IMT" if long_time else "C-IMT"
    free = fn(model, env, direction, grid)
    if cavity.g_p == 0.0:
        return _series(grid, free.values, variant, direction)
    alpha, nbar = _cavity_closure(model, cavity, env)
    e_p = model.hbar * cavity.omega_p
    kp = fn(model, env, direction, grid, dress_shift=+e_p)
    km = fn(model, env, direction, grid, dress_shift=-e_p)
    values = free.values + alpha * (nbar * kp.values + (nbar + 1.0) * km.values)
    return _series(grid, values, variant, direction)


def marcus_rate(
    model: DisplacedHarmonicModel,
    env: ThermalEnv,
    direction: Direction,
    gap_shift: float = 0.0,
) -> float:
    """Classical closed-form rate at the dephased (long-time average) gap.

    k = (Gamma^2 / hbar) sqrt(pi beta / E_r)
        * exp( -beta (dE - E_r + gap_shift)^2 / (4 E_r) )

    where dE = +-hbar omega_DA by direction.  This equals `lt_imt`
    evaluated at the dephased gap mean, since sigma^2 = 2 E_r / beta.
    """
    er = reorganization_energy(model)
    if er <= 0.0:
        raise ValueError("zero reorganization energy; classical rate undefined")
    sgn = 1.0 if direction == Direction.FORWARD else -1.0
    u = sgn * model.hbar * model.omega_DA - er + gap_shift
    beta = env.beta
    return (model.gamma ** 2 / model.hbar) * math.sqrt(math.pi * beta / er) * math.exp(
        -beta * u * u / (4.0 * er)
    )
