"""Shared model builders for the test suite."""
import numpy as np

from cavfgr import (
    Direction,
    DisplacedHarmonicModel,
    GOASpec,
    ThermalEnv,
    goa_to_normal_modes,
)

FWD = Direction.FORWARD
BWD = Direction.BACKWARD

SEED = 20260818


def make_model(freqs, r, s, omega_DA=0.3, gamma=1.0, **kw):
    return DisplacedHarmonicModel(
        mode_freqs=np.asarray(freqs, float),
        da_shifts=np.asarray(r, float),
        dg_shifts=np.asarray(s, float),
        omega_DA=omega_DA,
        gamma=gamma,
        **kw,
    )


def single_mode_model(omega=1.3, r=0.9, s=0.6, omega_DA=0.7, gamma=1.0):
    """One-mode model inside the brute-force oracle's certified box."""
    return make_model([omega], [r], [s], omega_DA=omega_DA, gamma=gamma)


def two_mode_model(omega_DA=0.3, gamma=1.0):
    """Two-mode model inside the brute-force oracle's certified box.

    Frequencies and shifts are chosen so the Fock-space truncation
    certifies at a modest per-mode level.
    """
    return make_model([1.3, 0.8], [0.8, 0.6], [0.4, 0.3],
                      omega_DA=omega_DA, gamma=gamma)


def goa_model(temperature, eta, s=1.0, omega_DA=0.0, n_secondary=200,
              gamma=1.0):
    """Benchmark GOA model (Omega = omega_c/2, y0 = 1, omega_c = 1)."""
    spec = GOASpec(Omega=0.5, y0=1.0, eta=eta, omega_c=1.0,
                   n_secondary=n_secondary, omega_DA=omega_DA,
                   gamma=gamma, s=s)
    return goa_to_normal_modes(spec), ThermalEnv.from_temperature(temperature)


def random_model(rng, n_modes=5, omega_DA=0.4, gamma=1.0):
    """Random model with box-compatible frequencies and shifts."""
    freqs = np.sort(rng.uniform(0.5, 2.0, n_modes))
    r = rng.uniform(-1.0, 1.0, n_modes)
    s = rng.uniform(-1.0, 1.0, n_modes)
    return make_model(freqs, r, s, omega_DA=omega_DA, gamma=gamma)
