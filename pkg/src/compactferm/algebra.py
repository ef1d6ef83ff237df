"""Register-level operator algebra.

Operators are stored on the qubits they act on and embedded on demand.  The
matrix index of a :class:`MemoryOperator` is little-endian in its qubit
tuple: bit ``b`` of the index is the value of ``qubits[b]``.  Qubit ``q`` of
the memory contributes ``2**q`` to a basis index; register 1 holds the lowest
qubits, registers fill upward, and auxiliary qubits sit on top.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce
from itertools import product
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from .lattice import LatticePoint, MomentumLattice, Spin

__all__ = [
    "MemoryLayout",
    "MemoryOperator",
    "PauliTerm",
    "Mode",
    "modes",
    "set_scrap",
    "presence_projector",
    "projector_first_empty",
    "register_swap",
    "step_antisymmetrizer",
    "creation",
    "annihilation",
    "anticommutator",
    "canonical_part",
    "boundary_term",
    "physical_indices",
    "pauli_decompose",
    "pauli_reconstruct",
    "pauli_terms_to_text",
    "pauli_terms_from_text",
]

Mode = tuple[Spin, LatticePoint]


@dataclass(frozen=True)
class MemoryLayout:
    n_registers: int
    momentum_bits: int
    spin_bits: int = 1
    aux_bits: int = 2

    def __post_init__(self):
        if self.n_registers < 1 or self.momentum_bits < 1 or self.spin_bits not in (0, 1) or self.aux_bits < 0:
            raise ValueError(f"invalid layout {self}")

    @classmethod
    def for_lattice(cls, lattice: MomentumLattice, n_registers: int = 2, aux_bits: int = 2) -> MemoryLayout:
        return cls(n_registers, lattice.momentum_bits, 1, aux_bits)

    @property
    def bits_per_register(self) -> int:
        return 1 + self.spin_bits + self.momentum_bits

    @property
    def inner_bits(self) -> int:
        return self.spin_bits + self.momentum_bits

    @property
    def memory_bits(self) -> int:
        return self.n_registers * self.bits_per_register

    @property
    def total_qubits(self) -> int:
        return self.memory_bits + self.aux_bits

    def _check(self, r: int) -> int:
        if not 1 <= r <= self.n_registers:
            raise IndexError(f"register {r} outside 1..{self.n_registers}")
        return (r - 1) * self.bits_per_register

    def register_qubits(self, r: int) -> tuple[int, ...]:
        off = self._check(r)
        return tuple(range(off, off + self.bits_per_register))

    def inner_qubits(self, r: int) -> tuple[int, ...]:
        off = self._check(r)
        return tuple(range(off, off + self.inner_bits))

    def momentum_qubits(self, r: int) -> tuple[int, ...]:
        off = self._check(r)
        return tuple(range(off, off + self.momentum_bits))

    def spin_qubit(self, r: int) -> int:
        if not self.spin_bits:
            raise ValueError("layout has no spin qubit")
        return self._check(r) + self.momentum_bits

    def presence_qubit(self, r: int) -> int:
        return self._check(r) + self.bits_per_register - 1

    @property
    def memory_qubits(self) -> tuple[int, ...]:
        return tuple(range(self.memory_bits))

    @property
    def aux_qubits(self) -> tuple[int, ...]:
        return tuple(range(self.memory_bits, self.total_qubits))

    def register_value(self, index: int, r: int) -> int:
        """Register contents of a basis index as an unsigned integer (its ordering key)."""
        return (index >> self._check(r)) & ((1 << self.bits_per_register) - 1)

    def basis_index(self, registers: Sequence[int], aux: int = 0) -> int:
        """Basis index from register values listed as ``[reg1, reg2, ...]``."""
        if len(registers) != self.n_registers:
            raise ValueError("one value per register expected")
        idx = aux << self.memory_bits
        for r, v in enumerate(registers, start=1):
            idx |= v << self._check(r)
        return idx

    def format_index(self, index: int) -> str:
        """``AUX-REGn ... REG1`` with each field most significant bit first."""
        w = self.bits_per_register
        regs = " ".join(f"{self.register_value(index, r):0{w}b}" for r in range(self.n_registers, 0, -1))
        if not self.aux_bits:
            return regs
        return f"{index >> self.memory_bits:0{self.aux_bits}b}-{regs}"


def _scatter_table(positions: Sequence[int]) -> np.ndarray:
    """Map each local index to the index obtained by placing its bits at ``positions``."""
    k = len(positions)
    local = np.arange(1 << k, dtype=np.int64)
    out = np.zeros_like(local)
    for b, pos in enumerate(positions):
        out |= ((local >> b) & 1) << pos
    return out


@dataclass(frozen=True, eq=False)
class MemoryOperator:
    qubits: tuple[int, ...]
    matrix: sp.csr_array

    def __post_init__(self):
        qubits = tuple(int(q) for q in self.qubits)
        if len(set(qubits)) != len(qubits):
            raise ValueError("repeated qubit in operator support")
        m = sp.csr_array(self.matrix, dtype=complex)
        if m.shape != (1 << len(qubits),) * 2:
            raise ValueError(f"matrix shape {m.shape} does not match {len(qubits)} qubits")
        object.__setattr__(self, "qubits", qubits)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def identity(cls, qubits: Iterable[int]) -> MemoryOperator:
        qubits = tuple(qubits)
        return cls(qubits, sp.identity(1 << len(qubits), dtype=complex, format="csr"))

    @classmethod
    def zero(cls, qubits: Iterable[int]) -> MemoryOperator:
        qubits = tuple(qubits)
        return cls(qubits, sp.csr_array((1 << len(qubits),) * 2, dtype=complex))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def dense(self) -> np.ndarray:
        return self.matrix.toarray()

    def embed(self, qubits: Sequence[int]) -> sp.csr_array:
        """Matrix on a larger ordered support, identity on the added qubits."""
        qubits = tuple(qubits)
        if qubits == self.qubits:
            return self.matrix
        missing = set(self.qubits) - set(qubits)
        if missing:
            raise ValueError(f"target support lacks qubits {sorted(missing)}")
        pos = [qubits.index(q) for q in self.qubits]
        rest = [b for b in range(len(qubits)) if b not in pos]
        scat = _scatter_table(pos)
        cosets = _scatter_table(rest)
        coo = self.matrix.tocoo()
        rows = (scat[coo.row][:, None] | cosets[None, :]).ravel()
        cols = (scat[coo.col][:, None] | cosets[None, :]).ravel()
        vals = np.repeat(coo.data, len(cosets))
        n = 1 << len(qubits)
        return sp.csr_array((vals, (rows, cols)), shape=(n, n))

    def on(self, qubits: Sequence[int]) -> MemoryOperator:
        """The same operator embedded on ``qubits`` (a superset of the support)."""
        return MemoryOperator(tuple(qubits), self.embed(qubits))

    def relabel(self, qubits: Sequence[int]) -> MemoryOperator:
        """The same matrix placed on different qubits."""
        return MemoryOperator(tuple(qubits), self.matrix)

    def dagger(self) -> MemoryOperator:
        return MemoryOperator(self.qubits, self.matrix.conj().T)

    def _align(self, other: MemoryOperator) -> tuple[tuple[int, ...], sp.csr_array, sp.csr_array]:
        if other.qubits == self.qubits:
            return self.qubits, self.matrix, other.matrix
        support = tuple(sorted(set(self.qubits) | set(other.qubits)))
        return support, self.embed(support), other.embed(support)

    def __matmul__(self, other: MemoryOperator) -> MemoryOperator:
        q, a, b = self._align(other)
        return MemoryOperator(q, a @ b)

    def __add__(self, other: MemoryOperator) -> MemoryOperator:
        q, a, b = self._align(other)
        return MemoryOperator(q, a + b)

    def __sub__(self, other: MemoryOperator) -> MemoryOperator:
        q, a, b = self._align(other)
        return MemoryOperator(q, a - b)

    def __mul__(self, c: complex) -> MemoryOperator:
        return MemoryOperator(self.qubits, self.matrix * c)

    __rmul__ = __mul__

    def __neg__(self) -> MemoryOperator:
        return self * -1

    def max_abs_diff(self, other: MemoryOperator) -> float:
        _, a, b = self._align(other)
        d = (a - b).tocoo()
        return float(np.abs(d.data).max()) if d.nnz else 0.0

    def allclose(self, other: MemoryOperator, atol: float = 1e-10) -> bool:
        return self.max_abs_diff(other) <= atol

    def is_hermitian(self, atol: float = 1e-12) -> bool:
        return self.allclose(self.dagger(), atol)

    def is_unitary(self, atol: float = 1e-10) -> bool:
        return (self.dagger() @ self).allclose(MemoryOperator.identity(self.qubits), atol)


def _bits(s: str) -> int:
    s = s.replace(" ", "")
    if not s or set(s) - {"0", "1"}:
        raise ValueError(f"not a bitstring: {s!r}")
    return int(s, 2)


def set_scrap(to: str, frm: str, qubits: Sequence[int] | None = None) -> MemoryOperator:
    """Rank-one transfer ``|to><frm|``.

    Bitstrings are written most significant bit first; ``qubits`` lists the
    support least significant first and defaults to ``0..len-1``.
    """
    to, frm = to.replace(" ", ""), frm.replace(" ", "")
    if len(to) != len(frm):
        raise ValueError(f"bitstring lengths differ: {to!r} vs {frm!r}")
    qubits = tuple(range(len(to))) if qubits is None else tuple(qubits)
    if len(qubits) != len(to):
        raise ValueError("support size does not match bitstring length")
    n = 1 << len(to)
    m = sp.csr_array(([1.0 + 0j], ([_bits(to)], [_bits(frm)])), shape=(n, n))
    return MemoryOperator(qubits, m)


def presence_projector(layout: MemoryLayout, r: int, occupied: bool) -> MemoryOperator:
    diag = [0.0, 1.0] if occupied else [1.0, 0.0]
    return MemoryOperator((layout.presence_qubit(r),), sp.diags_array(diag, dtype=complex, format="csr"))


def projector_first_empty(layout: MemoryLayout, j: int, registers: Sequence[int] | None = None) -> MemoryOperator:
    """Projector onto the lowest ``j`` of ``registers`` occupied and the rest empty.

    ``registers`` defaults to all registers ``1..n``.  With an empty register
    list the result is the identity on the memory.
    """
    registers = list(range(1, layout.n_registers + 1)) if registers is None else sorted(registers)
    if not 0 <= j <= len(registers):
        raise ValueError(f"j={j} outside 0..{len(registers)}")
    out = MemoryOperator.identity(layout.memory_qubits)
    for pos, r in enumerate(registers):
        out = out @ presence_projector(layout, r, occupied=pos < j)
    return out.on(layout.memory_qubits)


def register_swap(layout: MemoryLayout, r1: int = 1, r2: int = 2) -> MemoryOperator:
    """Permutation exchanging the full contents of two registers."""
    qs = layout.memory_qubits
    a, b = layout.register_qubits(r1), layout.register_qubits(r2)
    perm = list(qs)
    for x, y in zip(a, b):
        perm[x], perm[y] = y, x
    idx = np.arange(1 << len(qs), dtype=np.int64)
    out = np.zeros_like(idx)
    for q, target in enumerate(perm):
        out |= ((idx >> q) & 1) << target
    n = 1 << len(qs)
    return MemoryOperator(qs, sp.csr_array((np.ones(n, dtype=complex), (out, idx)), shape=(n, n)))


def step_antisymmetrizer(layout: MemoryLayout, j: int) -> MemoryOperator:
    """Antisymmetrizer of register ``j`` against the registers below it.

    ``j = 1`` is the identity.  For ``j = 2`` it is ``(1 - SWAP)/sqrt(2)`` on
    the sector where both registers are occupied and the identity elsewhere;
    this is the (non-unitary) operator entering the creation operators.  The
    unitary, ancilla-assisted realization lives in :mod:`compactferm.antisym`.
    """
    mem = layout.memory_qubits
    if j == 1:
        return MemoryOperator.identity(mem)
    if j != 2:
        raise NotImplementedError("step antisymmetrizers are only provided for j <= 2")
    both = (presence_projector(layout, 1, True) @ presence_projector(layout, 2, True)).on(mem)
    ident = MemoryOperator.identity(mem)
    return (ident - both) + both @ (ident - register_swap(layout, 1, 2)) * (1 / math.sqrt(2))


def modes(lattice: MomentumLattice) -> list[Mode]:
    return [(s, p) for p in lattice.points for s in (Spin.DOWN, Spin.UP)]


def _inner_code(layout: MemoryLayout, lattice: MomentumLattice | None, spin, p) -> int:
    if lattice is None:
        code = int(p)
    else:
        code = lattice.code(p)
    if layout.spin_bits:
        return (int(Spin(spin)) << layout.momentum_bits) | code
    return code


def _register_transfer(layout: MemoryLayout, j: int, to: int, frm: int) -> MemoryOperator:
    w = layout.bits_per_register
    return set_scrap(f"{to:0{w}b}", f"{frm:0{w}b}", layout.register_qubits(j))


def _creation_terms(layout: MemoryLayout, inner: int) -> list[tuple[MemoryOperator, MemoryOperator]]:
    """(A_j, P (|1><0| s^dag)_j P) pairs of the n-register creation operator."""
    n, w = layout.n_registers, layout.bits_per_register
    occupied = (1 << (w - 1)) | inner
    out = []
    for j in range(1, n + 1):
        above = projector_first_empty(layout, 0, range(j + 1, n + 1))
        below = projector_first_empty(layout, j - 1, range(1, j))
        term = above @ _register_transfer(layout, j, occupied, 0) @ below
        out.append((step_antisymmetrizer(layout, j), term.on(layout.memory_qubits)))
    return out


def creation(layout: MemoryLayout, lattice: MomentumLattice | None, spin, p) -> MemoryOperator:
    """n-register creation operator for mode ``(spin, p)``.

    With ``lattice=None``, ``p`` is taken as a raw momentum code.
    """
    inner = _inner_code(layout, lattice, spin, p)
    ops = [a @ t for a, t in _creation_terms(layout, inner)]
    return reduce(lambda x, y: x + y, ops)


def annihilation(layout: MemoryLayout, lattice: MomentumLattice | None, spin, p) -> MemoryOperator:
    """n-register annihilation operator, built term by term as ``P (|0><1| s)_j P . A_j``."""
    inner = _inner_code(layout, lattice, spin, p)
    ops = [t.dagger() @ a for a, t in _creation_terms(layout, inner)]
    return reduce(lambda x, y: x + y, ops)


def anticommutator(layout: MemoryLayout, lattice: MomentumLattice | None, r: Mode, s: Mode) -> MemoryOperator:
    """``{a_r, a^dag_s}`` as a memory operator."""
    a_r = annihilation(layout, lattice, *r)
    c_s = creation(layout, lattice, *s)
    return a_r @ c_s + c_s @ a_r


def canonical_part(layout: MemoryLayout, r: Mode, s: Mode) -> MemoryOperator:
    """``delta_rs`` times the projector onto an empty top register over any lower filling."""
    mem = layout.memory_qubits
    if r != s:
        return MemoryOperator.zero(mem)
    n = layout.n_registers
    lower = MemoryOperator.zero(mem)
    for j in range(n):
        lower = lower + projector_first_empty(layout, j, range(1, n))
    return (presence_projector(layout, n, False) @ lower).on(mem)


def boundary_term(layout: MemoryLayout, lattice: MomentumLattice | None, r: Mode, s: Mode) -> MemoryOperator:
    """Extra piece of ``{a_r, a^dag_s}`` supported on the fully occupied memory.

    ``A (|1><1| x |s><r|)_n (x) P_{n-1} A``: the top register's particle ``r``
    is replaced by ``s``.
    """
    n, w = layout.n_registers, layout.bits_per_register
    flag = 1 << (w - 1)
    ir = _inner_code(layout, lattice, *r)
    ks = _inner_code(layout, lattice, *s)
    mid = _register_transfer(layout, n, flag | ks, flag | ir) @ projector_first_empty(layout, n - 1, range(1, n))
    a = step_antisymmetrizer(layout, n)
    return a @ mid.on(layout.memory_qubits) @ a


def physical_indices(layout: MemoryLayout, lattice: MomentumLattice | None = None,
                     codes: Iterable[int] | None = None) -> np.ndarray:
    """Memory-space basis indices where every register is empty or validly occupied.

    Valid momentum codes come from ``lattice`` or from an explicit ``codes`` list.
    """
    if codes is None:
        codes = lattice.codes
    flag = 1 << (layout.bits_per_register - 1)
    spins = range(1 << layout.spin_bits)
    per_register = [0] + [flag | (s << layout.momentum_bits) | c for s in spins for c in codes]
    w = layout.bits_per_register
    out = [sum(v << (w * k) for k, v in enumerate(vals))
           for vals in product(per_register, repeat=layout.n_registers)]
    return np.array(sorted(out), dtype=np.int64)


# --- Pauli decomposition -------------------------------------------------------

_PAULI = {
    "I": np.array([[1, 0], [0, 1]], dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}
_WORD = "IXYZ"
# W[p, 2*r + c] = sigma_p[c, r] / 2, so sum_rc W[p, rc] M[r, c] = tr(sigma_p M) / 2
_W = np.array([[_PAULI[p][c, r] / 2 for r in range(2) for c in range(2)] for p in _WORD])


@dataclass(frozen=True)
class PauliTerm:
    """``coefficient * word``; ``word[0]`` acts on the most significant qubit."""

    coefficient: complex
    word: str

    def matrix(self) -> np.ndarray:
        return self.coefficient * reduce(np.kron, (_PAULI[ch] for ch in self.word))


def pauli_decompose(op: MemoryOperator | np.ndarray, tol: float = 1e-14) -> list[PauliTerm]:
    m = op.dense() if isinstance(op, MemoryOperator) else np.asarray(op, dtype=complex)
    dim = m.shape[0]
    if m.shape != (dim, dim) or dim < 1 or dim & (dim - 1):
        raise ValueError(f"matrix shape {m.shape} is not a power-of-two square")
    k = dim.bit_length() - 1
    if k == 0:
        return [PauliTerm(complex(m[0, 0]), "")] if abs(m[0, 0]) > tol else []
    # axes (r_{k-1}..r_0, c_{k-1}..c_0) -> interleaved (r_t, c_t) pairs, MSB first
    t = m.reshape([2] * (2 * k))
    order = [ax for pair in zip(range(k), range(k, 2 * k)) for ax in pair]
    t = t.transpose(order).reshape([4] * k)
    for axis in range(k):
        t = np.moveaxis(np.tensordot(_W, t, axes=([1], [axis])), 0, axis)
    out = []
    for idx in zip(*np.nonzero(np.abs(t) > tol)):
        out.append(PauliTerm(complex(t[idx]), "".join(_WORD[i] for i in idx)))
    return out


def pauli_reconstruct(terms: Sequence[PauliTerm], n_qubits: int | None = None) -> np.ndarray:
    if not terms:
        if n_qubits is None:
            raise ValueError("cannot infer size of an empty term list")
        return np.zeros((1 << n_qubits,) * 2, dtype=complex)
    return sum(t.matrix() for t in terms)


def pauli_terms_to_text(terms: Sequence[PauliTerm]) -> str:
    return "".join(f"{t.coefficient.real!r} {t.coefficient.imag!r} {t.word}\n" for t in terms)


def pauli_terms_from_text(text: str) -> list[PauliTerm]:
    out = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        re_, im_, word = line.split()
        if set(word) - set(_WORD):
            raise ValueError(f"bad Pauli word {word!r}")
        out.append(PauliTerm(complex(float(re_), float(im_)), word))
    return out
