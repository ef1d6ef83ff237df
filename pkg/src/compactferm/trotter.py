"""Presence-controlled evolution factors and the first-order Trotter product."""
from __future__ import annotations

import math
import weakref
from dataclasses import dataclass
from typing import Iterator

import numpy as np
import scipy.sparse as sp

from .algebra import MemoryOperator
from .hamiltonian import GeneratorSet
from .statevector import StateVector, apply_matrix

__all__ = ["TrotterConfig", "exp_generator", "u11", "u22", "trotter_step", "trotter_evolve", "trotter_trajectory"]


@dataclass(frozen=True)
class TrotterConfig:
    """``dt`` is the sampling step (eV^-1); each step is split into ``n_trotter`` Trotter intervals."""

    dt: float
    n_trotter: int = 1

    def __post_init__(self):
        if not self.dt > 0 or not math.isfinite(self.dt):
            raise ValueError("dt must be positive and finite")
        if self.n_trotter < 1:
            raise ValueError("n_trotter must be >= 1")

    @property
    def interval(self) -> float:
        return self.dt / self.n_trotter


_eig_cache: "weakref.WeakKeyDictionary[MemoryOperator, tuple]" = weakref.WeakKeyDictionary()
_unitary_cache: "weakref.WeakKeyDictionary[MemoryOperator, dict]" = weakref.WeakKeyDictionary()


def exp_generator(gen: MemoryOperator, dt: float) -> np.ndarray:
    """``exp(-i dt G)`` for a Hermitian generator, from a cached eigendecomposition."""
    if gen not in _eig_cache:
        m = gen.matrix
        if (m - sp.diags_array(m.diagonal(), format="csr")).count_nonzero() == 0:
            _eig_cache[gen] = ("diag", m.diagonal().real)
        else:
            w, v = np.linalg.eigh(m.toarray())
            _eig_cache[gen] = ("eigh", w, v)
    entry = _eig_cache[gen]
    if entry[0] == "diag":
        return np.diag(np.exp(-1j * dt * entry[1]))
    _, w, v = entry
    memo = _unitary_cache.setdefault(gen, {})
    if dt not in memo:
        if len(memo) >= 8:
            memo.pop(next(iter(memo)))
        memo[dt] = (v * np.exp(-1j * dt * w)) @ v.conj().T
    return memo[dt]


def u11(state: StateVector, dt: float, generators: GeneratorSet) -> StateVector:
    """Kinetic phase on every occupied register (identity on empty ones)."""
    layout = state.layout
    u = exp_generator(generators.free, dt)
    for r in range(1, layout.n_registers + 1):
        state = apply_matrix(state, u, layout.inner_qubits(r), controls=[(layout.presence_qubit(r), 1)])
    return state


def u22(state: StateVector, dt: float, generators: GeneratorSet) -> StateVector:
    """Exchange unitary on registers 1 and 2, controlled on both presence qubits."""
    layout = state.layout
    if layout.n_registers != 2:
        raise ValueError("exchange factor is defined for two registers")
    u = exp_generator(generators.exchange, dt)
    return apply_matrix(state, u, layout.inner_qubits(1) + layout.inner_qubits(2),
                        controls=[(layout.presence_qubit(1), 1), (layout.presence_qubit(2), 1)])


def trotter_step(state: StateVector, config: TrotterConfig, generators: GeneratorSet) -> StateVector:
    """One sampling step: ``(U11(h) U22(h))^n_trotter`` with ``h = dt / n_trotter``.

    In the operator product U22 acts on the state first.
    """
    h = config.interval
    for _ in range(config.n_trotter):
        state = u11(u22(state, h, generators), h, generators)
    return state


def trotter_evolve(state: StateVector, t_total: float, config: TrotterConfig,
                   generators: GeneratorSet) -> StateVector:
    n_steps = round(t_total / config.dt)
    if n_steps < 0 or abs(n_steps * config.dt - t_total) > 1e-9 * max(1.0, abs(t_total)):
        raise ValueError(f"t_total={t_total} is not a non-negative multiple of dt={config.dt}")
    for _ in range(n_steps):
        state = trotter_step(state, config, generators)
    return state


def trotter_trajectory(state: StateVector, config: TrotterConfig, generators: GeneratorSet,
                       n_points: int) -> Iterator[StateVector]:
    """States at ``t = j * dt`` for ``j = 0 .. n_points-1``, evolved incrementally."""
    for j in range(n_points):
        yield state
        if j + 1 < n_points:
            state = trotter_step(state, config, generators)
