import numpy as np
import pytest
import scipy.linalg

from compactferm.oracle import ExactPropagator, exact_evolve, exact_probability_series


def random_hermitian(n, seed):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return a + a.conj().T


def test_matches_expm():
    h = random_hermitian(12, 1)
    psi = np.eye(12)[0]
    for t in (0.0, 0.3, 2.0):
        np.testing.assert_allclose(exact_evolve(psi, t, h), scipy.linalg.expm(-1j * t * h) @ psi, atol=1e-10)


def test_rabi_two_level():
    g = 0.7
    h = np.array([[0, g], [g, 0]])
    times = np.linspace(0, 5, 41)
    ts = exact_probability_series(np.array([1.0, 0]), h, np.array([True, False]), times)
    np.testing.assert_allclose(ts.values, np.cos(g * times) ** 2, atol=1e-12)


def test_leading_axis_and_trajectory():
    h = random_hermitian(6, 2)
    prop = ExactPropagator(h)
    psi = np.linalg.qr(np.random.default_rng(3).normal(size=(6, 6)))[0][:2] / np.sqrt(2)
    traj = prop.trajectory(psi, [0.0, 0.4])
    assert traj.shape == (2, 2, 6)
    np.testing.assert_allclose(traj[1], prop.evolve(psi, 0.4), atol=1e-12)
    np.testing.assert_allclose(traj[1][0], scipy.linalg.expm(-0.4j * h) @ psi[0], atol=1e-10)


def test_energy_and_norm_conserved():
    h = random_hermitian(8, 4)
    prop = ExactPropagator(h)
    psi = np.ones(8) / np.sqrt(8)
    for p in prop.trajectory(psi, np.linspace(0, 3, 7)):
        assert np.linalg.norm(p) == pytest.approx(1, abs=1e-12)
        assert prop.energy(p) == pytest.approx(prop.energy(psi), abs=1e-12)


def test_rejects_bad_input():
    with pytest.raises(ValueError):
        ExactPropagator(np.array([[0, 1], [0, 0]]))
    with pytest.raises(ValueError):
        ExactPropagator(np.zeros((2, 3)))
    with pytest.raises(ValueError):
        exact_probability_series(np.array([1.0, 0]), np.eye(2), np.array([True, False]), [1.0, 0.0])


def test_initial_state_observable(setup_a, setup_b):
    for s in (setup_a, setup_b):
        ts = s.oracle_series(0.067, 5)
        assert ts.values[0] == pytest.approx(1.0)
        assert ts.metadata["mode"] == "oracle"
        v = s.initial_subspace_vector()
        assert np.linalg.norm(v) == pytest.approx(1.0)
        # aux still holds the marking: two branches with opposite signs
        assert np.count_nonzero(np.abs(v) > 1e-12) == 2
