"""Ohmic bath discretization and primary-mode normal-mode reduction.

The reduced test system used throughout is one primary reaction mode y
bilinearly coupled to ``n_secondary`` harmonic bath oscillators drawn
from an Ohmic spectral density J(w) = eta * w * exp(-w / omega_c).  The
three surfaces share the quadratic form; only the minima move:

    donor    minimum at y = -y0,  acceptor at y = +y0,
    ground   minimum at y = -y0 - s,

and each bath oscillator follows its bilinear coupling, x_alpha_min =
-c_alpha * y_min / omega_alpha^2.  Diagonalizing the mass-weighted
Hessian maps this onto the displaced-harmonic form consumed by the
correlator and rate routines; the donor-acceptor bias, electronic
coupling and hbar pass through unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import DisplacedHarmonicModel, ModelFormatError

# Relative eigenvalue floor below which the Hessian is treated as unstable.
_STABILITY_FLOOR = 1e-12


class BathStabilityError(ValueError):
    """Raised when the coupled Hessian is not positive definite."""


@dataclass(frozen=True)
class GOASpec:
    """Primary harmonic mode plus Ohmic bath, before normal-mode reduction.

    Parameters
    ----------
    Omega : float
        Bare primary-mode angular frequency.
    y0 : float
        Half the donor-acceptor separation along the primary mode.
    eta : float
        Ohmic friction strength (eta = 0 decouples the bath).
    omega_c : float
        Ohmic cutoff frequency.
    n_secondary : int
        Number of discrete bath oscillators.
    omega_DA : float
        Donor-acceptor energy bias divided by hbar.
    gamma : float
        Diabatic electronic coupling.
    s : float
        Ground-minus-donor shift of the primary-mode minimum.
    e_ground : float
        Ground-surface energy offset (inert for rates).
    hbar : float
        Reduced Planck constant of the unit system.
    """

    Omega: float
    y0: float
    eta: float
    omega_c: float
    n_secondary: int
    omega_DA: float
    gamma: float
    s: float = 0.0
    e_ground: float = 0.0
    hbar: float = 1.0

    def __post_init__(self):
        if self.Omega <= 0.0 or self.omega_c <= 0.0:
            raise ModelFormatError("Omega and omega_c must be positive")
        if self.eta < 0.0:
            raise ModelFormatError("eta must be nonnegative")
        if self.n_secondary < 1:
            raise ModelFormatError("n_secondary must be at least 1")
        if self.hbar <= 0.0:
            raise ModelFormatError("hbar must be positive")


@dataclass(frozen=True)
class DiscreteBath:
    """Discretized bath: strictly increasing frequencies and couplings."""

    freqs: np.ndarray
    couplings: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.freqs, dtype=np.float64).copy()
        c = np.asarray(self.couplings, dtype=np.float64).copy()
        if w.shape != c.shape or w.ndim != 1 or w.size == 0:
            raise ModelFormatError("bath freqs and couplings must match, 1-d, non-empty")
        if np.any(w <= 0.0) or np.any(np.diff(w) <= 0.0):
            raise ModelFormatError("bath frequencies must be positive and increasing")
        w.setflags(write=False)
        c.setflags(write=False)
        object.__setattr__(self, "freqs", w)
        object.__setattr__(self, "couplings", c)


def discretize_ohmic(eta: float, omega_c: float, n_secondary: int) -> DiscreteBath:
    """Discretize J(w) = eta * w * exp(-w / omega_c) into equal-weight modes.

    Frequencies are placed at omega_alpha = -omega_c * ln(1 - (alpha - 1/2) / N)
    for alpha = 1..N, and couplings satisfy
    c_alpha^2 = (2 eta omega_c / (pi N)) * omega_alpha^2, which makes the
    bath reorganization sum rule sum_alpha c_alpha^2 / (2 omega_alpha^2)
    = eta * omega_c / pi hold exactly for every N.
    """
    if eta < 0.0 or omega_c <= 0.0 or n_secondary < 1:
        raise ModelFormatError("require eta >= 0, omega_c > 0, n_secondary >= 1")
    alpha = np.arange(1, n_secondary + 1, dtype=np.float64)
    freqs = -omega_c * np.log1p(-(alpha - 0.5) / n_secondary)
    couplings = freqs * np.sqrt(2.0 * eta * omega_c / (np.pi * n_secondary))
    return DiscreteBath(freqs=freqs, couplings=couplings)


def _assemble_hessian(Omega: float, bath: DiscreteBath) -> np.ndarray:
    """Mass-weighted Hessian of primary mode + bilinearly coupled bath.

    The primary diagonal carries the counter-term sum c^2 / w^2 so the
    surface minima are pure translations of one quadratic form.
    """
    w = bath.freqs
    c = bath.couplings
    n = w.size + 1
    K = np.zeros((n, n))
    K[0, 0] = Omega * Omega + np.sum((c / w) ** 2)
    K[0, 1:] = c
    K[1:, 0] = c
    K[np.arange(1, n), np.arange(1, n)] = w * w
    return K


def _diagonalize(K: np.ndarray):
    lam, Q = np.linalg.eigh(K)
    if lam[0] <= _STABILITY_FLOOR * lam[-1]:
        raise BathStabilityError(
            f"coupled Hessian is not positive definite: min eigenvalue {lam[0]:.3e}"
        )
    return np.sqrt(lam), Q


def goa_to_normal_modes(spec: GOASpec) -> DisplacedHarmonicModel:
    """Reduce a primary-mode-plus-bath system to displaced normal modes.

    Builds the coupled Hessian, diagonalizes it, and projects the three
    surface minima onto the normal coordinates.  The resulting model has
    ``n_secondary + 1`` modes with the same reorganization energy
    2 * Omega^2 * y0^2 for every friction strength.
    """
    bath = discretize_ohmic(spec.eta, spec.omega_c, spec.n_secondary)
    freqs, Q = _diagonalize(_assemble_hessian(spec.Omega, bath))

    w2 = bath.freqs ** 2
    # Cartesian minima (y, x_alpha...) of each surface.
    d_donor = np.concatenate(([-spec.y0], bath.couplings * spec.y0 / w2))
    d_acceptor = -d_donor
    yg = -spec.y0 - spec.s
    d_ground = np.concatenate(([yg], -bath.couplings * yg / w2))

    da = Q.T @ (d_acceptor - d_donor)
    dg = Q.T @ (d_ground - d_donor)
    return DisplacedHarmonicModel(
        mode_freqs=freqs,
        da_shifts=da,
        dg_shifts=-dg,
        omega_DA=spec.omega_DA,
        gamma=spec.gamma,
        e_ground=spec.e_ground,
        hbar=spec.hbar,
        units="reduced",
    )
