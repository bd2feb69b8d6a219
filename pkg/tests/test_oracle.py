"""Brute-force Fock oracle: self-certification and closed-form agreement."""
import numpy as np
import pytest

from cavfgr import (
    FockConfig,
    OracleConvergenceError,
    OracleDomainError,
    ThermalEnv,
    TimeGrid,
    fock_corr_grid,
    fock_nuclear_corr,
    nefgr_dressed,
    nuclear_corr,
    oracle_rate,
)
from util import BWD, FWD, make_model, single_mode_model, two_mode_model

ENV = ThermalEnv(beta=1.0)


@pytest.mark.parametrize("direction", [FWD, BWD])
def test_tau_zero_equals_gamma_squared(direction):
    model = single_mode_model(gamma=1.4)
    for t in (0.0, 1.0, 4.0):
        val = fock_nuclear_corr(model, ENV, direction, t, 0.0)
        assert abs(val - 1.4**2) <= 1e-12 * 1.4**2


def test_grid_matches_closed_form():
    model = single_mode_model()
    ts = np.linspace(0.5, 6.0, 6)
    taus = np.linspace(0.0, 6.0, 6)
    grid = fock_corr_grid(model, ENV, FWD, ts, taus, FockConfig(n_max=40))
    for i, t in enumerate(ts):
        closed = nuclear_corr(model, ENV, FWD, t, taus)
        rel = np.max(np.abs(grid[i] - closed) / np.abs(closed))
        assert rel <= 1e-8


def test_zero_temperature_lineshape():
    # At beta hbar omega = 20 and S = 0 the initial state is the donor
    # ground state, and the correlator has an elementary closed form.
    model = make_model([1.0], [0.9], [0.0], omega_DA=0.6, gamma=1.0)
    env = ThermalEnv(beta=20.0)
    t, tau = 3.0, 2.2
    val = fock_nuclear_corr(model, env, FWD, t, tau)
    expected = np.exp(1j * 0.6 * tau - (0.9**2 * 1.0 / 2.0)
                      * (1.0 - np.exp(-1j * 1.0 * tau)))
    assert abs(val - expected) <= 1e-6 * abs(expected)


def test_box_refusals():
    env = ENV
    with pytest.raises(OracleDomainError):
        fock_nuclear_corr(make_model([0.3], [0.5], [0.0]), env, FWD, 1.0, 0.5)
    with pytest.raises(OracleDomainError):
        fock_nuclear_corr(make_model([1.0], [2.5], [0.0]), env, FWD, 1.0, 0.5)
    with pytest.raises(OracleDomainError):
        fock_nuclear_corr(single_mode_model(), ThermalEnv(beta=0.1), FWD, 1.0, 0.5)
    with pytest.raises(OracleDomainError):
        fock_nuclear_corr(single_mode_model(), env, FWD, 20.0, 0.5)
    with pytest.raises(OracleDomainError):
        fock_nuclear_corr(single_mode_model(), env, FWD, 1.0, 1.5)
    with pytest.raises(OracleDomainError):
        fock_nuclear_corr(
            make_model([1.0, 0.9, 0.8], [0.1, 0.1, 0.1], [0.0, 0.0, 0.0]),
            env, FWD, 1.0, 0.5)


def test_hot_corner_refuses_honestly():
    # Large shifts at high temperature need more basis than the
    # dimension cap allows; the probe must catch it.
    model = make_model([2.0], [2.0], [2.0], omega_DA=0.0)
    env = ThermalEnv(beta=0.25)
    with pytest.raises(OracleConvergenceError):
        fock_nuclear_corr(model, env, FWD, 4.0, 3.0)


def test_dimension_cap():
    with pytest.raises(OracleDomainError):
        fock_nuclear_corr(two_mode_model(), ENV, FWD, 1.0, 0.5,
                          FockConfig(n_max=70))


def test_probe_headroom_required():
    # n_max = 64 fills the two-mode cap exactly; the enlarged probe
    # basis cannot fit, so certification is impossible.
    with pytest.raises(OracleDomainError):
        fock_nuclear_corr(two_mode_model(), ENV, FWD, 1.0, 0.5,
                          FockConfig(n_max=64))


def test_config_validation():
    with pytest.raises(OracleDomainError):
        FockConfig(n_max=5)
    assert FockConfig(n_max=40).dim(2) == 1600
    assert FockConfig(n_max=40).probe_n(1) == 50


def test_grid_tau_beyond_horizon_rejected():
    model = single_mode_model()
    with pytest.raises(OracleDomainError):
        fock_corr_grid(model, ENV, FWD, [1.0, 2.0], [0.0, 3.0])


def test_rate_zero_time():
    assert oracle_rate(single_mode_model(), ENV, FWD, 0.0) == 0.0


def test_rate_with_dressing_phase():
    model = single_mode_model()
    grid = TimeGrid(t_max=1.5, dt=0.005)
    series = nefgr_dressed(model, ENV, FWD, grid, shift=0.9)
    ref = oracle_rate(model, ENV, FWD, 1.5, shift=0.9)
    assert abs(series.values[-1] - ref) <= 1e-6 * abs(ref)


def test_backward_uses_acceptor_parent():
    # Backward and forward differ unless the model is symmetric; the
    # closed form tracks both.
    model = single_mode_model()
    t, tau = 3.0, 1.7
    fwd = fock_nuclear_corr(model, ENV, FWD, t, tau)
    bwd = fock_nuclear_corr(model, ENV, BWD, t, tau)
    assert abs(fwd - bwd) > 1e-3
    assert abs(bwd - nuclear_corr(model, ENV, BWD, t, tau)) <= 1e-9
