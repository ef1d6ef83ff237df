import math

import numpy as np
import pytest

from compactferm import antisym
from compactferm.experiments import SCALAR_LAYOUT, antisym_histograms, measured_qubits, phi0
from compactferm.statevector import from_amplitudes, marginal
from compactferm.verify import aux_fidelity

LAY = SCALAR_LAYOUT
EMPTY, P0, P1, P2 = 0b000, 0b101, 0b110, 0b111


def idx(reg2, reg1, aux=0):
    return LAY.basis_index([reg1, reg2], aux)


def expected(entangled: bool) -> np.ndarray:
    # hand-derived: the pair branch is split by the aux rotation, the 01 part swapped
    v = np.zeros(1 << LAY.total_qubits, dtype=complex)
    v[idx(EMPTY, P0)] = 1 / math.sqrt(2)
    v[idx(P1, P0, 0b10 if entangled else 0)] = 0.5
    v[idx(P0, P1, 0b01 if entangled else 0)] = -0.5
    return v


def test_aux_rotation_unitary():
    u = antisym.AUX_ROTATION
    np.testing.assert_allclose(u.conj().T @ u, np.eye(4), atol=1e-15)
    s = 1 / math.sqrt(2)
    np.testing.assert_allclose(u[:, 0b10], [0, -s, s, 0])
    np.testing.assert_allclose(u[:, 0b01], [0, s, s, 0])


def test_pipeline_amplitudes():
    np.testing.assert_allclose(antisym.antisymmetrize(phi0(), uncompute=False).amplitudes,
                               expected(True), atol=1e-15)
    np.testing.assert_allclose(antisym.antisymmetrize(phi0()).amplitudes, expected(False), atol=1e-15)


def test_result_is_antisymmetric_and_aux_clean():
    out = antisym.antisymmetrize(phi0())
    assert 1 - aux_fidelity(out) < 1e-12
    a = out.amplitudes
    assert a[idx(P1, P0)] == pytest.approx(-a[idx(P0, P1)])


def test_position_of_largest():
    assert antisym.position_of_largest(LAY, idx(P1, P0)) == antisym.REG2_LARGER
    assert antisym.position_of_largest(LAY, idx(P0, P2)) == antisym.REG1_LARGER
    assert antisym.position_of_largest(LAY, idx(EMPTY, P2)) == 0
    assert antisym.position_of_largest(LAY, idx(P1, P1)) == 0


def test_mark_and_uncompute_are_inverse():
    st = from_amplitudes(LAY, {idx(P2, P1): 1.0})
    marked = antisym.mark_largest(st)
    assert marked.amplitudes[idx(P2, P1, antisym.REG2_LARGER)] == 1
    np.testing.assert_allclose(antisym.locate_largest_uncompute(marked).amplitudes, st.amplitudes)
    with pytest.raises(ValueError):
        antisym.mark_largest(marked)


def test_rejects_invalid_inputs():
    with pytest.raises(ValueError):
        antisym.antisymmetrize(from_amplitudes(LAY, {idx(P1, P1): 1.0}))
    with pytest.raises(ValueError):
        antisym.antisymmetrize(from_amplitudes(LAY, {idx(P0, P1): 1.0}))


def test_single_particle_untouched():
    st = from_amplitudes(LAY, {idx(EMPTY, P2): 1.0})
    np.testing.assert_allclose(antisym.antisymmetrize(st).amplitudes, st.amplitudes)


def test_exact_histograms():
    hist = antisym_histograms(shots=None)
    assert hist["uncomputed"]["exact"].probabilities == pytest.approx({"00-00": 0.5, "00-01": 0.25, "00-10": 0.25})
    assert hist["entangled"]["exact"].probabilities == pytest.approx({"00-00": 0.5, "01-01": 0.25, "10-10": 0.25})
    assert "sampled" not in hist["entangled"]


def test_sampled_histograms_reproducible():
    a = antisym_histograms(5000, seed=99)
    b = antisym_histograms(5000, seed=99)
    for name in a:
        assert a[name]["sampled"].counts == b[name]["sampled"].counts
        assert set(a[name]["sampled"].counts) <= set(a[name]["exact"].probabilities)


def test_measured_qubits():
    assert measured_qubits() == (6, 7, 3, 4)
    m = marginal(phi0(), LAY.momentum_qubits(2)).probabilities
    assert m == pytest.approx({"00": 0.5, "10": 0.5})
