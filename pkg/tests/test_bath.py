"""Ohmic discretization and normal-mode reduction of the coupled system."""
import numpy as np
import pytest

from cavfgr import (
    BathStabilityError,
    DiscreteBath,
    GOASpec,
    ModelFormatError,
    discretize_ohmic,
    goa_to_normal_modes,
    reorganization_energy,
)
from cavfgr.bath import _assemble_hessian, _diagonalize
from util import goa_model


@pytest.mark.parametrize("n_secondary", [1, 10, 200])
def test_sum_rule(n_secondary):
    eta, omega_c = 1.7, 2.3
    bath = discretize_ohmic(eta, omega_c, n_secondary)
    total = np.sum(bath.couplings**2 / (2.0 * bath.freqs**2))
    target = eta * omega_c / np.pi
    assert abs(total - target) <= 1e-12 * target


def test_single_secondary_frequency():
    bath = discretize_ohmic(1.0, 2.0, 1)
    assert bath.freqs[0] == pytest.approx(2.0 * np.log(2.0), rel=1e-15)


def test_frequencies_increasing_positive():
    bath = discretize_ohmic(0.5, 1.0, 50)
    assert np.all(bath.freqs > 0.0)
    assert np.all(np.diff(bath.freqs) > 0.0)


def test_discretize_validation():
    with pytest.raises(ModelFormatError):
        discretize_ohmic(-0.1, 1.0, 10)
    with pytest.raises(ModelFormatError):
        discretize_ohmic(1.0, 0.0, 10)
    with pytest.raises(ModelFormatError):
        discretize_ohmic(1.0, 1.0, 0)


def test_zero_friction_decouples():
    spec = GOASpec(Omega=0.5, y0=1.0, eta=0.0, omega_c=1.0, n_secondary=10,
                   omega_DA=0.0, gamma=1.0)
    model = goa_to_normal_modes(spec)
    bare = discretize_ohmic(0.0, 1.0, 10).freqs
    expected = np.sort(np.concatenate(([0.5], bare)))
    assert np.allclose(model.mode_freqs, expected, rtol=1e-12)
    # Only the primary mode is displaced between donor and acceptor.
    assert np.sum(np.abs(model.da_shifts) > 1e-12) == 1
    assert reorganization_energy(model) == pytest.approx(
        2.0 * 0.5**2 * 1.0**2, rel=1e-12)


@pytest.mark.parametrize("eta", [0.5, 1.0, 5.0])
def test_reorganization_energy_friction_invariant(eta):
    model, _ = goa_model(temperature=1.0, eta=eta)
    assert reorganization_energy(model) == pytest.approx(0.5, rel=1e-10)


def test_zero_ground_shift():
    model, _ = goa_model(temperature=1.0, eta=1.0, s=0.0)
    assert np.all(model.dg_shifts == 0.0)


@pytest.mark.parametrize("s", [-3.0, 1.0, 5.0])
def test_ground_shift_energy_invariant(s):
    # The ground-surface displacement energy is preserved by the
    # orthogonal transform: sum_j w_j^2 S_j^2 / 2 = Omega^2 s^2 / 2.
    model, _ = goa_model(temperature=1.0, eta=1.0, s=s, n_secondary=50)
    lhs = 0.5 * np.sum(model.mode_freqs**2 * model.dg_shifts**2)
    assert lhs == pytest.approx(0.5 * 0.5**2 * s**2, rel=1e-10)


def test_shift_norm_invariant():
    spec = GOASpec(Omega=0.5, y0=1.0, eta=1.0, omega_c=1.0, n_secondary=30,
                   omega_DA=0.0, gamma=1.0)
    bath = discretize_ohmic(spec.eta, spec.omega_c, spec.n_secondary)
    model = goa_to_normal_modes(spec)
    expected = 4.0 * spec.y0**2 * (1.0 + np.sum(bath.couplings**2 / bath.freqs**4))
    assert np.sum(model.da_shifts**2) == pytest.approx(expected, rel=1e-12)


def test_passthrough_fields():
    spec = GOASpec(Omega=0.5, y0=1.0, eta=1.0, omega_c=1.0, n_secondary=5,
                   omega_DA=2.5, gamma=0.7, s=1.0, e_ground=-4.0, hbar=2.0)
    model = goa_to_normal_modes(spec)
    assert model.omega_DA == 2.5
    assert model.gamma == 0.7
    assert model.e_ground == -4.0
    assert model.hbar == 2.0
    assert model.units == "reduced"
    assert model.n_modes == 6


def test_goa_spec_validation():
    with pytest.raises(ModelFormatError):
        GOASpec(Omega=0.0, y0=1.0, eta=1.0, omega_c=1.0, n_secondary=5,
                omega_DA=0.0, gamma=1.0)
    with pytest.raises(ModelFormatError):
        GOASpec(Omega=0.5, y0=1.0, eta=-1.0, omega_c=1.0, n_secondary=5,
                omega_DA=0.0, gamma=1.0)
    with pytest.raises(ModelFormatError):
        GOASpec(Omega=0.5, y0=1.0, eta=1.0, omega_c=1.0, n_secondary=0,
                omega_DA=0.0, gamma=1.0)


def test_unstable_hessian_rejected():
    # A coupling strong enough to overwhelm the bare frequencies makes
    # the coupled quadratic form indefinite.
    bath = discretize_ohmic(1.0, 1.0, 3)
    K = _assemble_hessian(0.5, bath)
    K[0, 0] = 0.0
    with pytest.raises(BathStabilityError):
        _diagonalize(K)


def test_discrete_bath_validation():
    with pytest.raises(ModelFormatError):
        DiscreteBath(freqs=np.array([1.0, 1.0]), couplings=np.array([0.1, 0.1]))
    with pytest.raises(ModelFormatError):
        DiscreteBath(freqs=np.array([1.0, -2.0]), couplings=np.array([0.1, 0.1]))
    with pytest.raises(ModelFormatError):
        DiscreteBath(freqs=np.array([1.0]), couplings=np.array([0.1, 0.2]))
