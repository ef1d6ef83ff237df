"""Kinetic and momentum-exchange generators of the 2D two-electron jellium model.

Register-level generators act on spin+momentum ("inner") qubits only; the
presence qubits enter as controls when the evolution factors are applied.
An inner code is ``spin << momentum_bits | momentum_code``.  The two-register
exchange generator is indexed by ``inner2 << inner_bits | inner1``.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.sparse as sp

from . import algebra
from .algebra import MemoryLayout, MemoryOperator
from .lattice import JelliumParams, LatticePoint, MomentumLattice, Spin, coupling, kinetic_energy

__all__ = [
    "ExchangeTerm",
    "GeneratorSet",
    "PairSubspace",
    "enumerate_exchange_terms",
    "free_generator",
    "exchange_generator",
    "build_generators",
    "embed_exchange",
    "second_quantized_exchange",
    "dense_hamiltonian",
    "exchange_terms_csv",
]

SPINS = (Spin.DOWN, Spin.UP)


@dataclass(frozen=True)
class ExchangeTerm:
    """``lambda_q a^dag_{k1+q,eta1} a^dag_{k2-q,eta2} a_{k2,eta2} a_{k1,eta1}``."""

    k1: LatticePoint
    k2: LatticePoint
    q: LatticePoint
    eta1: Spin
    eta2: Spin
    strength: float

    @property
    def out1(self) -> LatticePoint:
        return self.k1 + self.q

    @property
    def out2(self) -> LatticePoint:
        return self.k2 - self.q


@dataclass(frozen=True)
class GeneratorSet:
    free: MemoryOperator
    exchange: MemoryOperator


def _inner(lattice: MomentumLattice, spin: Spin, p: LatticePoint) -> int:
    return (int(spin) << lattice.momentum_bits) | lattice.code(p)


def enumerate_exchange_terms(lattice: MomentumLattice, params: JelliumParams) -> list[ExchangeTerm]:
    """All ordered (k1, eta1; k2, eta2) and q != 0 with both outgoing momenta on the lattice."""
    out = []
    qs = lattice.transfers()
    for k1 in lattice.points:
        for k2 in lattice.points:
            for q in qs:
                if k1 + q not in lattice or k2 - q not in lattice:
                    continue
                lam = coupling(q, params)
                for e1 in SPINS:
                    for e2 in SPINS:
                        out.append(ExchangeTerm(k1, k2, q, e1, e2, lam))
    return out


def free_generator(lattice: MomentumLattice, params: JelliumParams) -> MemoryOperator:
    """Diagonal ``sum_k e_k (1_spin x |k><k|)`` on one register's inner qubits."""
    nb = 1 + lattice.momentum_bits
    diag = np.zeros(1 << nb)
    for p in lattice.points:
        for s in SPINS:
            diag[_inner(lattice, s, p)] = kinetic_energy(p, params)
    return MemoryOperator(tuple(range(nb)), sp.diags_array(diag.astype(complex), format="csr"))


def exchange_generator(lattice: MomentumLattice, params: JelliumParams,
                       terms: list[ExchangeTerm] | None = None) -> MemoryOperator:
    """Two-register exchange generator from the symmetrized transfer bracket.

    Each term contributes ``lambda/2 [X (x) Y + Y (x) X]`` with
    ``X = |eta1,k1+q><eta1,k1|``, ``Y = |eta2,k2-q><eta2,k2|`` and the left
    factor on register 2.  Summing the bracket over ordered pairs visits every
    register assignment twice, hence the 1/2: the result moves a pair
    ``|x>_2 |y>_1`` to ``|x+q>_2 |y-q>_1`` with amplitude ``lambda_q`` once.
    """
    if terms is None:
        terms = enumerate_exchange_terms(lattice, params)
    ib = 1 + lattice.momentum_bits
    rows, cols, vals = [], [], []
    for t in terms:
        x_to, x_from = _inner(lattice, t.eta1, t.out1), _inner(lattice, t.eta1, t.k1)
        y_to, y_from = _inner(lattice, t.eta2, t.out2), _inner(lattice, t.eta2, t.k2)
        half = 0.5 * t.strength
        rows += [x_to << ib | y_to, y_to << ib | x_to]
        cols += [x_from << ib | y_from, y_from << ib | x_from]
        vals += [half, half]
    n = 1 << (2 * ib)
    m = sp.csr_array((np.asarray(vals, dtype=complex), (rows, cols)), shape=(n, n))
    m.sum_duplicates()
    return MemoryOperator(tuple(range(2 * ib)), m)


def build_generators(lattice: MomentumLattice, params: JelliumParams) -> GeneratorSet:
    return GeneratorSet(free_generator(lattice, params), exchange_generator(lattice, params))


def embed_exchange(layout: MemoryLayout, generator: MemoryOperator) -> MemoryOperator:
    """Exchange generator on the memory, active only when both registers are occupied."""
    placed = generator.relabel(layout.inner_qubits(1) + layout.inner_qubits(2))
    both = algebra.presence_projector(layout, 1, True) @ algebra.presence_projector(layout, 2, True)
    return (both @ placed).on(layout.memory_qubits)


def second_quantized_exchange(layout: MemoryLayout, lattice: MomentumLattice, params: JelliumParams,
                              prefactor: float = 0.5) -> MemoryOperator:
    """``prefactor * sum lambda_q a^dag a^dag a a`` from register-algebra operators.

    ``prefactor=0.5`` is the usual two-body normalization
    ``1/2 sum <rs|V|tu> a^dag_r a^dag_s a_u a_t``; ``prefactor=1`` is the
    bare ordered sum.
    """
    cre, ann = {}, {}

    def c(s, p):
        if (s, p) not in cre:
            cre[s, p] = algebra.creation(layout, lattice, s, p).matrix
        return cre[s, p]

    def a(s, p):
        if (s, p) not in ann:
            ann[s, p] = algebra.annihilation(layout, lattice, s, p).matrix
        return ann[s, p]

    n = 1 << layout.memory_bits
    total = sp.csr_array((n, n), dtype=complex)
    for t in enumerate_exchange_terms(lattice, params):
        total = total + (prefactor * t.strength) * (
            c(t.eta1, t.out1) @ c(t.eta2, t.out2) @ a(t.eta2, t.k2) @ a(t.eta1, t.k1))
    return MemoryOperator(layout.memory_qubits, total)


@dataclass(frozen=True, eq=False)
class PairSubspace:
    """Both registers occupied with physical contents, in ascending memory-index order."""

    layout: MemoryLayout
    lattice: MomentumLattice

    @cached_property
    def indices(self) -> np.ndarray:
        flag = 1 << (self.layout.bits_per_register - 1)
        codes = [flag | _inner(self.lattice, s, p) for p in self.lattice.points for s in SPINS]
        w = self.layout.bits_per_register
        return np.array(sorted(r2 << w | r1 for r1 in codes for r2 in codes), dtype=np.int64)

    def __len__(self) -> int:
        return len(self.indices)

    def _field(self, r: int, mask: int, shift: int = 0) -> np.ndarray:
        return (self.layout.register_value(self.indices, r) >> shift) & mask

    def inner(self, r: int) -> np.ndarray:
        return self._field(r, (1 << self.layout.inner_bits) - 1)

    def spin(self, r: int) -> np.ndarray:
        return self._field(r, 1, self.layout.momentum_bits)

    def momentum(self, r: int) -> list[LatticePoint]:
        return [self.lattice.point(int(c)) for c in self._field(r, (1 << self.layout.momentum_bits) - 1)]

    def pair_codes(self) -> np.ndarray:
        """Row/column indices into the exchange generator."""
        return self.inner(2) << self.layout.inner_bits | self.inner(1)

    def restrict(self, amplitudes: np.ndarray) -> np.ndarray:
        """Full-memory amplitudes (with aux) -> array ``(2**aux, len(self))``."""
        a = np.asarray(amplitudes).reshape(1 << self.layout.aux_bits, 1 << self.layout.memory_bits)
        return a[:, self.indices]

    def expand(self, sub: np.ndarray) -> np.ndarray:
        """Inverse of :meth:`restrict`, zero outside the subspace."""
        sub = np.atleast_2d(sub)
        out = np.zeros((sub.shape[0], 1 << self.layout.memory_bits), dtype=complex)
        out[:, self.indices] = sub
        return out.reshape(-1)

    def diagonal_operator(self, values: np.ndarray) -> np.ndarray:
        return np.diag(np.asarray(values, dtype=float))


def dense_hamiltonian(lattice: MomentumLattice, params: JelliumParams,
                      layout: MemoryLayout | None = None,
                      generators: GeneratorSet | None = None) -> tuple[np.ndarray, PairSubspace]:
    """Kinetic + exchange Hamiltonian on the doubly occupied subspace (eV)."""
    layout = layout or MemoryLayout.for_lattice(lattice)
    if layout.n_registers != 2:
        raise ValueError("dense Hamiltonian is defined for two registers")
    gens = generators or build_generators(lattice, params)
    sub = PairSubspace(layout, lattice)
    kin = gens.free.matrix.diagonal().real
    codes = sub.pair_codes()
    h = gens.exchange.matrix[codes][:, codes].toarray()
    h[np.diag_indices_from(h)] += kin[sub.inner(1)] + kin[sub.inner(2)]
    return h, sub


def exchange_terms_csv(terms: list[ExchangeTerm]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["k1", "k2", "q", "eta1", "eta2", "lambda_eV"])
    for t in terms:
        w.writerow([str(t.k1), str(t.k2), str(t.q), int(t.eta1), int(t.eta2), repr(t.strength)])
    return buf.getvalue()
