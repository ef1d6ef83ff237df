import math

import pytest
from hypothesis import given, strategies as st

from compactferm.lattice import (
    CodificationError, JelliumParams, LatticePoint, RegularizationError, Spin,
    build_lattice, codification_csv, coupling, decode_state, encode_state, kinetic_energy,
)

P = JelliumParams()


def test_codification_a(lattice_a):
    assert len(lattice_a) == 5
    assert lattice_a.momentum_bits == 3
    expect = {"C": ((0, 1), 0b001), "F": ((-1, 0), 0b010), "G": ((0, 0), 0b011),
              "H": ((1, 0), 0b100), "K": ((0, -1), 0b101)}
    for label, ((i, j), code) in expect.items():
        p = lattice_a.by_label(label)
        assert (p.i, p.j) == (i, j)
        assert lattice_a.code(p) == code
        assert lattice_a.point(code) == p
    assert lattice_a.point(0) is None


def test_b_points_and_shells(lattice_b):
    assert len(lattice_b) == 13
    assert lattice_b.momentum_bits == 4
    pts = {(p.i, p.j) for p in lattice_b.points}
    assert pts == {(i, j) for i in range(-2, 3) for j in range(-2, 3) if abs(i) + abs(j) <= 2}
    assert {k: len(v) for k, v in lattice_b.shells().items()} == {0: 1, 1: 4, 2: 4, 4: 4}
    assert {lattice_b.label(p) for p in lattice_b.shells()[2]} == set("BDJL")


def test_b_extends_a(lattice_a, lattice_b):
    for p in lattice_a.points:
        assert lattice_b.code(p) == lattice_a.code(p)
        assert lattice_b.label(p) == lattice_a.label(p)
    assert len(set(lattice_b.codes)) == 13
    assert 0 not in lattice_b.codes


@pytest.mark.parametrize("name", ["A", "B"])
def test_centrosymmetric(name):
    lat = build_lattice(name)
    assert all(-p in lat for p in lat.points)
    assert all(-q in lat.transfers() for q in lat.transfers())


def test_kinetic_energy():
    assert kinetic_energy(LatticePoint(0, 0), P) == 0.0
    e01 = 340 * 2 * math.pi / 1800
    assert kinetic_energy(LatticePoint(0, 1), P) == pytest.approx(e01, rel=1e-12)
    assert kinetic_energy(LatticePoint(0, 1), P) == pytest.approx(1.18682, abs=1e-5)
    assert kinetic_energy(LatticePoint(1, 1), P) == pytest.approx(2.37365, abs=1e-5)
    assert kinetic_energy(LatticePoint(-2, 0), P) == pytest.approx(4 * e01, rel=1e-12)


def test_coupling():
    lam = 340 / (60 * math.sqrt(2 * math.pi))
    assert coupling(LatticePoint(0, 1), P) == pytest.approx(lam, rel=1e-12)
    assert coupling(LatticePoint(0, 1), P) == pytest.approx(2.26066, abs=2e-5)
    assert coupling(LatticePoint(0, 2), P) == pytest.approx(1.13033, abs=1e-5)
    assert coupling(LatticePoint(-1, 0), P) == coupling(LatticePoint(1, 0), P)
    with pytest.raises(RegularizationError):
        coupling(LatticePoint(0, 0), P)


def test_params_validation():
    for bad in [dict(N_e=0), dict(r_s=0.0), dict(E_0=-1.0)]:
        with pytest.raises(ValueError):
            JelliumParams(**bad)


def test_encode_examples(lattice_a):
    assert encode_state(1, Spin.UP, LatticePoint(0, 0), lattice_a) == "11011"
    assert encode_state(0, Spin.UP, None, lattice_a) == "00000"
    assert decode_state("10101", lattice_a) == (1, Spin.DOWN, LatticePoint(0, -1))
    with pytest.raises(CodificationError):
        encode_state(1, Spin.UP, LatticePoint(1, 1), lattice_a)
    with pytest.raises(CodificationError):
        decode_state("00100", lattice_a)
    with pytest.raises(CodificationError):
        decode_state("1101", lattice_a)


@given(st.sampled_from(["A", "B"]), st.integers(0, 12), st.sampled_from(list(Spin)))
def test_encode_roundtrip(name, k, spin):
    lat = build_lattice(name)
    p = lat.points[k % len(lat)]
    assert decode_state(encode_state(1, spin, p, lat), lat) == (1, spin, p)


def test_codification_csv(lattice_a):
    rows = codification_csv(lattice_a).splitlines()
    assert rows[0] == "bitstring,label,i,j"
    assert rows[1] == "000,None,,"
    assert rows[4] == "011,G,0,0"
    assert len(rows) == 7
