import numpy as np
import pytest

from lowdepthqc.circuit import Circuit, Gate, GateInstance
from lowdepthqc.simulator import (DENSITY_QUBIT_CAP, ShotConfig,
                                  ancilla_expectation_z, density_expectation_z,
                                  run_density, run_statevector,
                                  sample_expectation_z, sample_from_expectation)

from conftest import dense_unitary, random_circuit


def test_statevector_matches_dense_oracle(rng):
    for _ in range(60):
        width = int(rng.integers(1, 6))
        c = random_circuit(rng, width, int(rng.integers(1, 15)))
        amps = run_statevector(c).amps
        init = np.zeros(1 << width, dtype=complex)
        init[0] = 1.0
        want = dense_unitary(c) @ init
        assert np.allclose(amps, want, atol=1e-10)


def test_statevector_custom_init(rng):
    c = random_circuit(rng, 3, 10)
    init = rng.normal(size=8) + 1j * rng.normal(size=8)
    init /= np.linalg.norm(init)
    amps = run_statevector(c, init=init).amps
    assert np.allclose(amps, dense_unitary(c) @ init, atol=1e-10)


def test_density_matches_statevector_for_pure_evolution(rng):
    for _ in range(20):
        width = int(rng.integers(1, 5))
        c = random_circuit(rng, width, 10)
        psi = run_statevector(c).amps
        rho = run_density(c).rho
        assert np.allclose(rho, np.outer(psi, psi.conj()), atol=1e-10)
        for q in range(width):
            za = ancilla_expectation_z(run_statevector(c), q)
            zb = density_expectation_z(run_density(c), q)
            assert abs(za - zb) < 1e-10


def test_density_cap_enforced():
    from lowdepthqc.circuit import CircuitError

    big = Circuit(DENSITY_QUBIT_CAP + 1)
    with pytest.raises(CircuitError):
        run_density(big)


def test_expectation_z_plus_state():
    c = Circuit(2, (GateInstance(Gate.H, (), (0,)),))
    s = run_statevector(c)
    assert abs(ancilla_expectation_z(s, 0)) < 1e-12
    assert abs(ancilla_expectation_z(s, 1) - 1.0) < 1e-12


def test_sampling_unbiased_within_3_sigma():
    # 1000 independent seeds; the mean of +/-1 shots concentrates at z
    z = 0.3
    shots = 400
    sigma = np.sqrt((1 - z * z) / shots)
    misses = 0
    for seed in range(1000):
        est = sample_from_expectation(z, ShotConfig(shots, seed=seed))
        if abs(est - z) > 3 * sigma:
            misses += 1
    # P(|est - z| > 3 sigma) ~ 0.27%; 1000 trials stay well under 2%
    assert misses <= 20


def test_sampling_is_seed_deterministic():
    a = sample_from_expectation(0.1, ShotConfig(500, seed=7))
    b = sample_from_expectation(0.1, ShotConfig(500, seed=7))
    assert a == b
    c = Circuit(1, (GateInstance(Gate.RY, (), (0,), (0.8,)),))
    s = run_statevector(c)
    assert (sample_expectation_z(s, 0, ShotConfig(300, seed=3))
            == sample_expectation_z(s, 0, ShotConfig(300, seed=3)))


def test_sampling_extremes_are_exact():
    assert sample_from_expectation(1.0, ShotConfig(100, seed=0)) == 1.0
    assert sample_from_expectation(-1.0, ShotConfig(100, seed=0)) == -1.0
