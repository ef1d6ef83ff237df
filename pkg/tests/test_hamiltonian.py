import math

import numpy as np
import pytest

from compactferm.algebra import MemoryOperator, register_swap
from compactferm.hamiltonian import (
    build_generators, dense_hamiltonian, embed_exchange, enumerate_exchange_terms,
    exchange_generator, exchange_terms_csv, free_generator,
)
from compactferm.lattice import JelliumParams, LatticePoint, Spin, coupling, kinetic_energy
from compactferm.algebra import MemoryLayout
from compactferm.verify import check_exchange_hermitian, check_generator_equivalence

P = JelliumParams()
LAM1 = 340 / (60 * math.sqrt(2 * math.pi))


def inner(lattice, spin, p):
    return int(spin) << lattice.momentum_bits | lattice.code(p)


def test_free_generator(lattice_a):
    g = free_generator(lattice_a, P)
    assert g.qubits == (0, 1, 2, 3)
    d = g.matrix.diagonal().real
    for p in lattice_a.points:
        for s in Spin:
            assert d[inner(lattice_a, s, p)] == pytest.approx(kinetic_energy(p, P))
    assert d[0] == 0 and d[inner(lattice_a, Spin.UP, LatticePoint(1, 0))] == pytest.approx(340 * 2 * math.pi / 1800)


def test_exchange_matrix_element(lattice_a):
    g = exchange_generator(lattice_a, P).matrix
    ib = 4
    g0 = LatticePoint(0, 0)
    col = inner(lattice_a, Spin.UP, g0) << ib | inner(lattice_a, Spin.DOWN, g0)
    row = inner(lattice_a, Spin.UP, LatticePoint(0, 1)) << ib | inner(lattice_a, Spin.DOWN, LatticePoint(0, -1))
    assert g[row, col] == pytest.approx(LAM1)
    assert g[row, col] == pytest.approx(2.26066, abs=2e-5)
    # spins ride with their electrons: no spin-flip element
    flip = inner(lattice_a, Spin.DOWN, LatticePoint(0, 1)) << ib | inner(lattice_a, Spin.UP, LatticePoint(0, -1))
    assert g[flip, col] == 0


def test_exchange_terms(lattice_a):
    terms = enumerate_exchange_terms(lattice_a, P)
    assert all(t.q != LatticePoint(0, 0) for t in terms)
    assert all(t.out1 in lattice_a and t.out2 in lattice_a for t in terms)
    assert all(t.strength == pytest.approx(coupling(t.q, P)) for t in terms)
    # total momentum of the pair is preserved by construction
    assert all(t.out1 + t.out2 == t.k1 + t.k2 for t in terms)
    rows = exchange_terms_csv(terms[:2]).splitlines()
    assert rows[0] == "k1,k2,q,eta1,eta2,lambda_eV"
    assert len(rows) == 3


@pytest.mark.parametrize("name", ["A", "B"])
def test_exchange_hermitian_and_swap_symmetric(name, request):
    lat = request.getfixturevalue(f"lattice_{name.lower()}")
    g = exchange_generator(lat, P)
    assert g.is_hermitian()
    lay = MemoryLayout.for_lattice(lat, aux_bits=0)
    e = embed_exchange(lay, g)
    s = register_swap(lay)
    assert (s @ e @ s).max_abs_diff(e) < 1e-14


def test_generator_equivalence():
    r = check_generator_equivalence()
    assert r.passed, r.line()
    assert r.measured < 1e-10


def flipped_bracket(lattice, params):
    """Mutation: the mirrored half of the bracket carries the wrong sign."""
    m = exchange_generator(lattice, params).dense()
    m = np.triu(m) - np.tril(m, -1)
    return MemoryOperator(tuple(range(2 * (1 + lattice.momentum_bits))), m)


def scaled_twice(lattice, params):
    return exchange_generator(lattice, params) * 2.0


def test_mutations_detected():
    assert not check_exchange_hermitian(flipped_bracket).passed
    assert not check_generator_equivalence(flipped_bracket).passed
    assert check_exchange_hermitian(scaled_twice).passed
    assert not check_generator_equivalence(scaled_twice).passed


def test_dense_hamiltonian(setup_a, setup_b):
    h, sub = setup_a.hamiltonian, setup_a.subspace
    assert h.shape == (100, 100) and len(sub) == 100
    assert np.abs(h - h.conj().T).max() < 1e-14
    assert setup_b.hamiltonian.shape == (676, 676)
    # |up G, down G> has zero kinetic energy and couples to the first shell
    lay = setup_a.layout
    pair = lay.basis_index([0b10011, 0b11011])
    i = int(np.searchsorted(sub.indices, pair))
    assert sub.indices[i] == pair
    assert h[i, i] == 0
    assert np.count_nonzero(np.abs(h[:, i]) > 1e-12) == 4
    assert np.allclose(h[np.abs(h[:, i]) > 1e-12, i], LAM1)


def test_dense_hamiltonian_rejects_other_layouts(lattice_a):
    with pytest.raises(ValueError):
        dense_hamiltonian(lattice_a, P, MemoryLayout.for_lattice(lattice_a, n_registers=3))


def test_build_generators(lattice_b):
    g = build_generators(lattice_b, P)
    assert g.free.dim == 32 and g.exchange.dim == 1024
