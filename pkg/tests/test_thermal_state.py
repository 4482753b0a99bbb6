import numpy as np
import pytest
from hypothesis import given, strategies as st

from qcpower.thermal_state import boltzmann_weights, thermal_state
from qcpower.unit_models import ModelParams, analytic_ground_state, build_unit_hamiltonian, eigensystem

params_st = st.one_of(st.floats(-1.9, 4).map(ModelParams.xxz), st.floats(-4, 4).map(ModelParams.aniso))
temp_st = st.floats(0.0, 20.0)


@given(params_st, temp_st)
def test_density_matrix_invariants(p, T):
    ts = thermal_state(p, T)
    rho = ts.rho
    assert np.max(np.abs(rho - rho.conj().T)) < 1e-14
    assert abs(np.trace(rho) - 1) < 1e-12
    assert np.linalg.eigvalsh(rho).min() > -1e-12
    H = build_unit_hamiltonian(p).matrix
    assert np.max(np.abs(H @ rho - rho @ H)) < 1e-10


def test_zero_temperature_is_ground_projector():
    p = ModelParams.xxz(0.0)
    psi = analytic_ground_state(p)
    rho = thermal_state(p, 0.0).rho
    assert np.real(np.vdot(psi, rho @ psi)) > 1 - 1e-9


def test_zero_temperature_degenerate_ground_space():
    rho = thermal_state(ModelParams.xxz(-3.0), 0.0).rho
    np.testing.assert_allclose(np.sort(np.linalg.eigvalsh(rho))[-2:], [0.5, 0.5], atol=1e-12)


def test_infinite_temperature():
    rho = thermal_state(ModelParams.xxz(0.3), 1e9).rho
    assert np.max(np.abs(rho - np.eye(32) / 32)) < 1e-6


def test_ground_population_at_table_temperature():
    p = ModelParams.xxz(0.0)
    w, _ = eigensystem(p)
    boltz = np.exp(-(w - w[0]) / 0.16)
    ground = boltz[0] / boltz.sum()  # unique ground state at delta = 0
    assert ground == pytest.approx(0.994, abs=5e-4)
    psi = analytic_ground_state(p)
    rho = thermal_state(p, 0.16).rho
    assert np.real(np.vdot(psi, rho @ psi)) == pytest.approx(ground, rel=1e-12)


def test_negative_temperature_rejected():
    with pytest.raises(ValueError):
        thermal_state(ModelParams.xxz(0.0), -0.1)
    with pytest.raises(ValueError):
        boltzmann_weights([0.0, 1.0], -1.0)


def test_boltzmann_weights_shift_is_stable():
    w = boltzmann_weights(np.array([-1e4, -1e4 + 1.0]), 0.01)
    assert np.all(np.isfinite(w)) and w.sum() == pytest.approx(1.0)


@given(params_st, st.lists(st.floats(0.0, 10.0), min_size=2, max_size=6, unique=True))
def test_purity_and_energy_monotone_in_T(p, temps):
    temps = sorted(temps)
    H = build_unit_hamiltonian(p)
    states = [thermal_state(p, T) for T in temps]
    purity = [s.purity for s in states]
    energy = [s.expectation(H) for s in states]
    assert all(b <= a + 1e-12 for a, b in zip(purity, purity[1:]))
    assert all(b >= a - 1e-12 for a, b in zip(energy, energy[1:]))
