"""Dense statevector engine: embedded/controlled application, marginals, sampling."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .algebra import MemoryLayout, MemoryOperator

__all__ = [
    "StateVector",
    "Histogram",
    "init_vacuum",
    "from_amplitudes",
    "apply",
    "apply_matrix",
    "permute",
    "marginal",
    "outcome_probability",
    "sample",
    "format_outcome",
]

NORM_TOL = 1e-10


@dataclass
class StateVector:
    amplitudes: np.ndarray
    layout: MemoryLayout

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if self.amplitudes.shape != (1 << self.layout.total_qubits,):
            raise ValueError("amplitude vector does not match layout")

    @property
    def n_qubits(self) -> int:
        return self.layout.total_qubits

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def copy(self) -> StateVector:
        return StateVector(self.amplitudes.copy(), self.layout)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def branches(self, cutoff: float = 1e-12) -> dict[str, complex]:
        """Nonzero amplitudes keyed by :meth:`MemoryLayout.format_index`."""
        nz = np.nonzero(np.abs(self.amplitudes) > cutoff)[0]
        return {self.layout.format_index(int(i)): complex(self.amplitudes[i]) for i in nz}


@dataclass
class Histogram:
    """Outcome bitstrings mapped to counts (sampled) or probabilities (exact)."""

    qubits: tuple[int, ...]
    probabilities: dict[str, float]
    counts: dict[str, int] | None = None
    shots: int | None = None
    metadata: dict = field(default_factory=dict)

    def to_csv(self, exact: Mapping[str, float] | None = None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        header = ["bitstring", "count", "probability"]
        if exact is not None:
            header.append("exact_probability")
        w.writerow(header)
        keys = sorted(set(self.probabilities) | set(exact or {}))
        for k in keys:
            row = [k, "" if self.counts is None else self.counts.get(k, 0),
                   repr(float(self.probabilities.get(k, 0.0)))]
            if exact is not None:
                row.append(repr(float(exact.get(k, 0.0))))
            w.writerow(row)
        return buf.getvalue()


def init_vacuum(layout: MemoryLayout) -> StateVector:
    amp = np.zeros(1 << layout.total_qubits, dtype=complex)
    amp[0] = 1.0
    return StateVector(amp, layout)


def from_amplitudes(layout: MemoryLayout, branches: Mapping[int, complex], normalize: bool = False) -> StateVector:
    """Normalized state with the given amplitudes on basis indices."""
    amp = np.zeros(1 << layout.total_qubits, dtype=complex)
    for idx, a in branches.items():
        amp[idx] += a
    norm = np.linalg.norm(amp)
    if normalize:
        amp /= norm
    elif abs(norm - 1) > NORM_TOL:
        raise ValueError(f"amplitudes have norm {norm:.6g}; pass normalize=True")
    return StateVector(amp, layout)


def _axes(n: int, qubits: Sequence[int]) -> list[int]:
    # C-order reshape to [2]*n puts qubit q on axis n-1-q
    return [n - 1 - q for q in qubits]


def apply_matrix(state: StateVector, matrix: np.ndarray, qubits: Sequence[int],
                 controls: Sequence[tuple[int, int]] = ()) -> StateVector:
    """Apply a dense ``2^k x 2^k`` block on ``qubits`` where all ``controls`` hold their values.

    The block index is little-endian in ``qubits``.  Cosets of the untouched
    qubits are processed together as one matrix product.
    """
    qubits = tuple(qubits)
    n = state.n_qubits
    ctrl_q = [c for c, _ in controls]
    if set(ctrl_q) & set(qubits):
        raise ValueError("control qubits overlap the acted qubits")
    if len(set(ctrl_q)) != len(ctrl_q) or len(set(qubits)) != len(qubits):
        raise ValueError("repeated qubit")
    if any(not 0 <= q < n for q in (*qubits, *ctrl_q)):
        raise IndexError("qubit index out of range")
    k = len(qubits)
    matrix = np.asarray(matrix, dtype=complex)
    if matrix.shape != (1 << k, 1 << k):
        raise ValueError("matrix does not match acted qubits")

    psi = state.amplitudes.reshape([2] * n).copy()
    sel = [slice(None)] * n
    for q, v in controls:
        sel[n - 1 - q] = int(v)
    sel = tuple(sel)
    sub = psi[sel]
    # axes of the sliced array: drop controlled axes, keep order
    remaining = [ax for ax in range(n) if ax not in _axes(n, ctrl_q)]
    pos = [remaining.index(ax) for ax in _axes(n, reversed(qubits))]
    moved = np.moveaxis(sub, pos, range(sub.ndim - k, sub.ndim))
    shape = moved.shape
    block = moved.reshape(-1, 1 << k) @ matrix.T
    psi[sel] = np.moveaxis(block.reshape(shape), range(sub.ndim - k, sub.ndim), pos)
    return StateVector(psi.reshape(-1), state.layout)


def apply(state: StateVector, op: MemoryOperator, controls: Sequence[tuple[int, int]] = (),
          check_unitary: bool = False) -> StateVector:
    if check_unitary and not op.is_unitary():
        raise ValueError("operator is not unitary")
    return apply_matrix(state, op.dense(), op.qubits, controls)


def permute(state: StateVector, perm: np.ndarray, phases: np.ndarray | None = None) -> StateVector:
    """Basis permutation ``|i> -> phases[i] |perm[i]>``; ``perm`` must be a bijection."""
    perm = np.asarray(perm)
    if np.bincount(perm, minlength=len(perm)).max() != 1:
        raise ValueError("not a permutation")
    amp = state.amplitudes if phases is None else state.amplitudes * phases
    out = np.empty_like(amp)
    out[perm] = amp
    return StateVector(out, state.layout)


def format_outcome(layout: MemoryLayout, qubits: Sequence[int], value: int) -> str:
    """Outcome bitstring, highest qubit first, with a dash after the auxiliary bits.

    Bit ``b`` of ``value`` is the outcome of ``sorted(qubits)[b]``.
    """
    qs = sorted(qubits)
    aux = set(layout.aux_qubits)
    chars = []
    for b in range(len(qs) - 1, -1, -1):
        chars.append(str((value >> b) & 1))
        if qs[b] in aux and b > 0 and qs[b - 1] not in aux:
            chars.append("-")
    return "".join(chars)


def _marginal_array(state: StateVector, qubits: Sequence[int]) -> np.ndarray:
    qs = sorted(qubits)
    if len(set(qs)) != len(qs):
        raise ValueError("duplicate qubit indices")
    n = state.n_qubits
    if any(not 0 <= q < n for q in qs):
        raise IndexError("qubit index out of range")
    p = state.probabilities().reshape([2] * n)
    keep = _axes(n, reversed(qs))  # most significant kept qubit first
    drop = tuple(ax for ax in range(n) if ax not in keep)
    m = p.sum(axis=drop)
    # remaining axes are in increasing axis order == decreasing qubit order
    return m.reshape(-1)


def marginal(state: StateVector, qubits: Sequence[int], cutoff: float = 1e-14) -> Histogram:
    """Exact Born-rule marginal over ``qubits``."""
    m = _marginal_array(state, qubits)
    probs = {format_outcome(state.layout, qubits, v): float(m[v]) for v in range(len(m)) if m[v] > cutoff}
    return Histogram(tuple(sorted(qubits)), probs)


def outcome_probability(state: StateVector, qubits: Sequence[int], value: int) -> float:
    """Probability that ``qubits`` (little-endian in sorted order) read ``value``."""
    return float(_marginal_array(state, qubits)[value])


def sample(state: StateVector, qubits: Sequence[int], shots: int,
           seed: int | np.random.Generator | None = None) -> Histogram:
    """Multinomial shot sampling of :func:`marginal`; deterministic for a fixed seed."""
    if shots < 1:
        raise ValueError("shots must be >= 1")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    m = _marginal_array(state, qubits)
    m = np.clip(m, 0.0, None)
    counts = rng.multinomial(shots, m / m.sum())
    keys = [format_outcome(state.layout, qubits, v) for v in range(len(m))]
    nz = [v for v in range(len(m)) if counts[v] or m[v] > 1e-14]
    return Histogram(
        tuple(sorted(qubits)),
        {keys[v]: counts[v] / shots for v in nz},
        counts={keys[v]: int(counts[v]) for v in nz},
        shots=shots,
        metadata={"seed": seed if not isinstance(seed, np.random.Generator) else None},
    )
