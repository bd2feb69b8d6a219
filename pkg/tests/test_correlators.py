"""Closed-form correlators, photon factors, and gap statistics."""
import numpy as np
import pytest

from cavfgr import (
    CavityMode,
    CorrelatorOverflowError,
    ThermalEnv,
    equilibrium_corr,
    fock_nuclear_corr,
    imt_gap_mean,
    imt_gap_variance,
    mean_photon_number,
    nuclear_corr,
    reorganization_energy,
)
from cavfgr.correlators import _photon_factor_hyperbolic, photon_factor, rate_tables
from util import BWD, FWD, make_model, random_model, single_mode_model

ENV = ThermalEnv(beta=1.0)


@pytest.mark.parametrize("direction", [FWD, BWD])
def test_tau_zero_equals_gamma_squared(direction):
    model = single_mode_model(gamma=1.7)
    for t in (0.0, 1.0, 5.5):
        val = nuclear_corr(model, ENV, direction, t, 0.0)
        assert val == 1.7**2 + 0.0j


def test_no_initial_displacement_removes_t_dependence():
    # With S = 0 the forward integrand carries no outer-time memory.
    model = single_mode_model(s=0.0)
    ref = nuclear_corr(model, ENV, FWD, 0.0, 0.8)
    for t in (1.0, 3.0, 9.0):
        assert nuclear_corr(model, ENV, FWD, t, 0.8) == ref


@pytest.mark.parametrize("direction", [FWD, BWD])
def test_matches_brute_force_single_mode(direction, rng):
    model = single_mode_model()
    for _ in range(4):
        t = rng.uniform(0.5, 6.0)
        tau = rng.uniform(0.0, t)
        closed = nuclear_corr(model, ENV, direction, t, tau)
        brute = fock_nuclear_corr(model, ENV, direction, t, tau)
        assert abs(closed - brute) <= 1e-10 * abs(closed)


def test_vector_tau_matches_scalar():
    model = single_mode_model()
    taus = np.linspace(0.0, 3.0, 7)
    vec = nuclear_corr(model, ENV, FWD, 2.0, taus)
    scal = np.array([nuclear_corr(model, ENV, FWD, 2.0, u) for u in taus])
    assert np.array_equal(vec, scal)


@pytest.mark.parametrize("direction", [FWD, BWD])
def test_equilibrium_corr_is_dephased_limit(direction):
    # Equilibrium initial conditions equal a model whose donor minimum
    # coincides with the initial-surface minimum: S := 0 forward,
    # S := -R backward.
    model = single_mode_model()
    shifted = make_model(
        model.mode_freqs,
        model.da_shifts,
        np.zeros(1) if direction is FWD else -model.da_shifts,
        omega_DA=model.omega_DA,
        gamma=model.gamma,
    )
    taus = np.linspace(0.0, 4.0, 9)
    eq = equilibrium_corr(model, ENV, direction, taus)
    ne = nuclear_corr(shifted, ENV, direction, 3.3, taus)
    assert np.allclose(eq, ne, rtol=1e-14, atol=0.0)


def test_photon_factor_forms_agree(rng):
    cav = CavityMode(omega_p=1.3, g_p=0.8)
    taus = rng.uniform(0.0, 20.0, 64)
    a = photon_factor(cav, 1.1, ENV, taus)
    b = _photon_factor_hyperbolic(cav, 1.1, ENV, taus)
    assert np.allclose(a, b, rtol=1e-13, atol=0.0)


def test_mean_photon_number():
    assert mean_photon_number(ENV, 1.0) == pytest.approx(
        1.0 / (np.e - 1.0), rel=1e-15)
    # Deep quantum limit: exponentially small occupation.
    assert mean_photon_number(ThermalEnv(beta=50.0), 1.0) == pytest.approx(
        np.exp(-50.0), rel=1e-10)


def test_gap_mean_closed_form():
    model = single_mode_model(omega=1.5, r=0.8, s=0.4, omega_DA=0.9)
    e_r = reorganization_energy(model)
    w, r, s = 1.5, 0.8, 0.4
    for t in (0.0, 1.2):
        assert imt_gap_mean(model, FWD, t) == pytest.approx(
            0.9 - e_r - w**2 * r * s * np.cos(w * t), rel=1e-14)
        assert imt_gap_mean(model, BWD, t) == pytest.approx(
            -0.9 - e_r + w**2 * r * (r + s) * np.cos(w * t), rel=1e-14)


def test_gap_variance_classical():
    model = single_mode_model()
    env = ThermalEnv(beta=0.25)
    assert imt_gap_variance(model, env) == pytest.approx(
        2.0 * reorganization_energy(model) / 0.25, rel=1e-14)


def test_overflow_guard():
    model = single_mode_model()
    with pytest.raises(CorrelatorOverflowError):
        nuclear_corr(model, ENV, FWD, 1.0, 0.9, cap=-1.0)


def test_determinism(rng):
    model = random_model(rng)
    taus = np.linspace(0.0, 5.0, 11)
    a = nuclear_corr(model, ENV, FWD, 2.0, taus)
    b = nuclear_corr(model, ENV, FWD, 2.0, taus)
    assert a.tobytes() == b.tobytes()


def test_rate_tables_shapes(rng):
    model = random_model(rng, n_modes=4)
    nodes = np.linspace(0.0, 3.0, 31)
    base_re, base_im, p, q = rate_tables(model, ENV, FWD, nodes)
    assert base_re.shape == (31,)
    assert base_im.shape == (31,)
    assert p.shape == (31, 4)
    assert q.shape == (31, 4)
    assert np.all(base_re <= 0.0)
    assert base_re[0] == 0.0 and base_im[0] == 0.0
