"""Brute-force Fock-space oracle for the closed-form correlator and rates.

Independent verification path: represent each of the three displaced
harmonic surfaces in a truncated number basis, build the initial
thermal density on the ground surface, and evaluate the two-time trace

    C(t, tau) = Gamma^2 Tr[ rho_G U_P(t) U_O(tau)^ U_P(t - tau)^ ]

by exact diagonalization, where P is the parent surface of the chosen
direction (donor forward, acceptor backward) and O the other surface.
No closed-form displaced-oscillator identities are used anywhere, so
agreement with the analytic correlator is a genuine cross-check.

The oracle certifies its own truncation honestly: every public entry
point re-evaluates probe points in an enlarged basis and refuses
(OracleConvergenceError) when the drift exceeds a small fraction of
Gamma^2, and refuses outright (OracleDomainError) outside the parameter
box where double-precision Fock arithmetic is trustworthy.  It is meant
for reduced-unit test models with one or two modes, not production use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .model import DisplacedHarmonicModel, Direction, ThermalEnv

# Parameter box inside which truncated double-precision Fock arithmetic
# is certifiable (reduced-unit magnitudes).
BOX_OMEGA = (0.5, 2.0)
BOX_SHIFT_MAX = 2.0
BOX_BETA_HW = (0.5, 20.0)
BOX_T_FACTOR = 10.0

_DIM_CAP = 4096
_PROBE_GROWTH = 10
_PROBE_TOL = 1e-9


class OracleDomainError(ValueError):
    """Parameters outside the oracle's certified box or size limits."""


class OracleConvergenceError(ArithmeticError):
    """Basis-growth probe detected unconverged truncation."""


@dataclass(frozen=True)
class FockConfig:
    """Truncation control for the Fock-space oracle.

    ``n_max`` is the per-mode basis size.  The total dimension
    n_max ** n_modes must stay at or below 4096, which limits the
    oracle to one- and two-mode models.
    """

    n_max: int = 60

    def __post_init__(self):
        if self.n_max < 10:
            raise OracleDomainError("n_max must be at least 10")

    def dim(self, n_modes: int) -> int:
        d = self.n_max ** n_modes
        if d > _DIM_CAP:
            raise OracleDomainError(
                f"basis dimension {d} exceeds cap {_DIM_CAP} for {n_modes} modes"
            )
        return d

    def probe_n(self, n_modes: int) -> int:
        """Largest admissible enlarged basis for the truncation probe."""
        n = self.n_max + _PROBE_GROWTH
        while n > self.n_max and n ** n_modes > _DIM_CAP:
            n -= 1
        if n == self.n_max:
            raise OracleDomainError(
                "cannot certify truncation: no basis headroom below the "
                f"dimension cap {_DIM_CAP}"
            )
        return n


def _check_box(model, env, t_values, tau_values):
    w = model.mode_freqs
    hbar = model.hbar
    if model.n_modes > 2:
        raise OracleDomainError("oracle supports at most two modes")
    if np.any(w < BOX_OMEGA[0]) or np.any(w > BOX_OMEGA[1]):
        raise OracleDomainError(f"mode frequencies outside certified box {BOX_OMEGA}")
    shifts = np.concatenate([np.abs(model.da_shifts), np.abs(model.dg_shifts)])
    if np.any(shifts > BOX_SHIFT_MAX):
        raise OracleDomainError(f"surface shifts outside certified box |d| <= {BOX_SHIFT_MAX}")
    bhw = env.beta * hbar * w
    if np.any(bhw < BOX_BETA_HW[0]) or np.any(bhw > BOX_BETA_HW[1]):
        raise OracleDomainError(f"beta * hbar * omega outside certified box {BOX_BETA_HW}")
    t_arr = np.atleast_1d(np.asarray(t_values, dtype=np.float64))
    tau_arr = np.atleast_1d(np.asarray(tau_values, dtype=np.float64))
    t_lim = BOX_T_FACTOR / float(np.max(w))
    if np.any(t_arr < 0.0) or np.any(t_arr > t_lim):
        raise OracleDomainError(f"t outside certified box [0, {t_lim:.6g}]")
    if np.any(np.abs(tau_arr) > np.maximum(t_arr, 0.0)):
        raise OracleDomainError("require |tau| <= t")


def _single_mode_ops(n_max, omega, hbar):
    """Dense q, p^2 operators for one mode in its number basis."""
    n = np.arange(n_max)
    off = np.sqrt((n[1:]) * hbar / (2.0 * omega))
    q = np.zeros((n_max, n_max))
    q[n[1:], n[1:] - 1] = off
    q[n[1:] - 1, n[1:]] = off
    # p^2 = (hbar omega / 2) [(2n + 1) on the diagonal, -sqrt((n+1)(n+2))
    # two off the diagonal], from p = i sqrt(hbar omega / 2) (a^ - a).
    p2 = np.zeros((n_max, n_max))
    p2[n, n] = hbar * omega / 2.0 * (2.0 * n + 1.0)
    ij = np.arange(n_max - 2)
    fall = -hbar * omega / 2.0 * np.sqrt((ij + 1.0) * (ij + 2.0))
    p2[ij, ij + 2] = fall
    p2[ij + 2, ij] = fall
    return q, p2


def _surface_h(n_max, omega, hbar, center, offset):
    """Single-mode displaced-oscillator Hamiltonian matrix.

    H = p^2/2 + omega^2 (q - center)^2 / 2 + offset, built from raw
    q and p^2 matrices with no displacement-operator shortcuts.
    """
    q, p2 = _single_mode_ops(n_max, omega, hbar)
    h = p2 / 2.0 + omega ** 2 / 2.0 * (q @ q)
    h -= omega ** 2 * center * q
    h += (omega ** 2 * center ** 2 / 2.0 + offset) * np.eye(n_max)
    return h


def _kron_all(mats):
    out = mats[0]
    for m in mats[1:]:
        out = np.kron(out, m)
    return out


class _FockEngine:
    """Cached diagonalizations for one (model, beta, n_max) combination."""

    def __init__(self, model: DisplacedHarmonicModel, env: ThermalEnv, n_max: int):
        self.model = model
        self.beta = env.beta
        self.n_max = n_max
        nm = model.n_modes
        hbar = model.hbar
        e_dim = n_max ** nm

        def build(centers, offset):
            parts = [
                _surface_h(n_max, model.mode_freqs[j], hbar, centers[j], 0.0)
                for j in range(nm)
            ]
            if nm == 1:
                h = parts[0]
            else:
                eye = np.eye(n_max)
                h = np.kron(parts[0], eye) + np.kron(eye, parts[1])
            return h + offset * np.eye(e_dim)

        zeros = np.zeros(nm)
        h_d = build(zeros, hbar * model.omega_DA)
        h_a = build(model.da_shifts, 0.0)
        h_g = build(-model.dg_shifts, model.e_ground)

        self.e_d, self.v_d = np.linalg.eigh(h_d)
        self.e_a, self.v_a = np.linalg.eigh(h_a)
        e_g, v_g = np.linalg.eigh(h_g)

        # Thermal density on the ground surface, referenced to its own
        # minimum eigenvalue so the Boltzmann weights never underflow
        # collectively.
        wts = np.exp(-self.beta * (e_g - e_g[0]))
        wts /= wts.sum()
        rho = (v_g * wts) @ v_g.T
        self.rho = rho
        self.rho_eigs = wts

        # Parent-basis objects per direction; the rotated densities are
        # cubic-cost, so build them once.
        self.mix = self.v_d.T @ self.v_a  # <d_m | a_n>
        self.rho_d = self.v_d.T @ rho @ self.v_d
        self.rho_a = self.v_a.T @ rho @ self.v_a

    def _parent(self, direction: Direction):
        if direction == Direction.FORWARD:
            return self.e_d, self.rho_d, self.e_a, self.mix
        return self.e_a, self.rho_a, self.e_d, self.mix.T

    def corr(self, direction: Direction, t: float, tau: float) -> complex:
        """One correlator value; the tau propagator rebuild is O(dim^3)."""
        e_p, rho_p, e_o, mix = self._parent(direction)
        hbar = self.model.hbar
        # Tr[rho U_P(t) U_O(tau)^ U_P(t-tau)^] in the parent eigenbasis.
        y = (mix * np.exp(-1j * e_o * tau / hbar)) @ mix.conj().T
        left = np.exp(1j * e_p * t / hbar)
        right = np.exp(-1j * e_p * (t - tau) / hbar)
        val = np.einsum("m,mn,n,nm->", left, y, right, rho_p, optimize=True)
        return self.model.gamma ** 2 * complex(val)

    def corr_grid(self, direction: Direction, ts, taus) -> np.ndarray:
        """Correlator on a (t, tau) product grid, one O(dim^3) pass per tau."""
        e_p, rho_p, e_o, mix = self._parent(direction)
        hbar = self.model.hbar
        ts = np.asarray(ts, dtype=np.float64)
        taus = np.asarray(taus, dtype=np.float64)
        out = np.empty((ts.size, taus.size), dtype=np.complex128)
        left = np.exp(1j * np.multiply.outer(ts, e_p) / hbar)
        for k, tau in enumerate(taus):
            y = (mix * np.exp(-1j * e_o * tau / hbar)) @ mix.conj().T
            z = y * rho_p.T  # z_mn = y_mn rho_nm
            phase = np.exp(1j * e_p * tau / hbar)
            # value(t) = sum_mn left_m(t) z_mn conj(left_n(t)) phase_n
            out[:, k] = np.einsum("tm,mn,tn->t", left, z, (phase / left), optimize=True)
        return self.model.gamma ** 2 * out


_ENGINES: dict[tuple, _FockEngine] = {}


def _engine(model, env, n_max) -> _FockEngine:
    key = (
        model.mode_freqs.tobytes(),
        model.da_shifts.tobytes(),
        model.dg_shifts.tobytes(),
        model.omega_DA,
        model.gamma,
        model.e_ground,
        model.hbar,
        env.beta,
        n_max,
    )
    eng = _ENGINES.get(key)
    if eng is None:
        if len(_ENGINES) > 8:
            _ENGINES.clear()
        eng = _FockEngine(model, env, n_max)
        _ENGINES[key] = eng
    return eng


def _probe(model, env, config, direction, points):
    """Re-evaluate sample points in an enlarged basis; refuse on drift."""
    n_hi = config.probe_n(model.n_modes)
    base = _engine(model, env, config.n_max)
    hi = _engine(model, env, n_hi)
    tol = _PROBE_TOL * model.gamma ** 2
    for t, tau in points:
        drift = abs(base.corr(direction, t, tau) - hi.corr(direction, t, tau))
        if drift > tol:
            raise OracleConvergenceError(
                f"truncation probe drift {drift:.3e} at (t, tau) = "
                f"({t:.6g}, {tau:.6g}) exceeds {tol:.3e}; "
                f"n_max = {config.n_max} is not converged here"
            )


def fock_nuclear_corr(
    model: DisplacedHarmonicModel,
    env: ThermalEnv,
    direction: Direction,
    t: float,
    tau: float,
    config: FockConfig = FockConfig(),
) -> complex:
    """Brute-force C(t, tau) with box checking and a truncation probe."""
    _check_box(model, env, t, tau)
    config.dim(model.n_modes)
    _probe(model, env, config, direction, [(t, tau)])
    return _engine(model, env, config.n_max).corr(direction, t, tau)


def fock_corr_grid(
    model: DisplacedHarmonicModel,
    env: ThermalEnv,
    direction: Direction,
    ts,
    taus,
    config: FockConfig = FockConfig(),
) -> np.ndarray:
    """Brute-force correlator on a (t, tau) product grid.

    Grid points with tau > t are evaluated too (the trace is defined
    for them); the box check instead requires max(|tau|) <= max(t).
    The truncation probe samples the extreme corners and the center.
    """
    ts = np.atleast_1d(np.asarray(ts, dtype=np.float64))
    taus = np.atleast_1d(np.asarray(taus, dtype=np.float64))
    _check_box(model, env, np.max(ts), [min(np.max(taus), np.max(ts))])
    if np.any(ts < 0.0) or np.any(np.abs(taus) > np.max(ts)):
        raise OracleDomainError("grid requires t >= 0 and |tau| <= max(t)")
    config.dim(model.n_modes)
    tmax, tmid = float(np.max(ts)), float(np.median(ts))
    umax, umid = float(np.max(taus)), float(np.median(taus))
    pts = [(tmax, min(umax, tmax)), (tmax, umid), (max(tmid, umid), umid)]
    _probe(model, env, config, direction, pts)
    return _engine(model, env, config.n_max).corr_grid(direction, ts, taus)


def oracle_rate(
    model: DisplacedHarmonicModel,
    env: ThermalEnv,
    direction: Direction,
    t: float,
    config: FockConfig = FockConfig(),
    rtol: float = 1e-8,
    shift: float = 0.0,
) -> float:
    """Adaptive-quadrature golden-rule rate from the brute-force correlator.

    k(t) = (2 / hbar^2) Re int_0^t exp(i shift tau) C(t, tau) dtau,
    evaluated by scipy's adaptive quadrature with relative tolerance
    ``rtol``.  Raises OracleConvergenceError if the quadrature reports
    trouble.
    """
    _check_box(model, env, t, t)
    config.dim(model.n_modes)
    if t == 0.0:
        return 0.0
    _probe(model, env, config, direction, [(t, t), (t, 0.5 * t)])
    eng = _engine(model, env, config.n_max)

    def integrand(tau):
        val = eng.corr(direction, t, tau)
        if shift != 0.0:
            val *= np.exp(1j * shift * tau)
        return val.real

    val, err, info, *rest = quad(integrand, 0.0, t, epsabs=0.0, epsrel=rtol,
                                 limit=400, full_output=True)
    if rest:
        raise OracleConvergenceError(f"rate quadrature failed: {rest[0]}")
    return 2.0 / model.hbar ** 2 * val
