"""Exact reference dynamics by eigendecomposition of the dense Hamiltonian.

Vectors live on a :class:`~compactferm.hamiltonian.PairSubspace`; a leading
axis (e.g. the auxiliary register) is carried along untouched.
"""
from __future__ import annotations

import numpy as np

from .spectral import TimeSeries

__all__ = ["ExactPropagator", "exact_evolve", "exact_probability_series"]


class ExactPropagator:
    """Caches ``H = V D V^dag`` for repeated evolution."""

    def __init__(self, hamiltonian: np.ndarray, atol: float = 1e-12):
        h = np.asarray(hamiltonian, dtype=complex)
        if h.ndim != 2 or h.shape[0] != h.shape[1]:
            raise ValueError("Hamiltonian must be square")
        if np.max(np.abs(h - h.conj().T)) > atol:
            raise ValueError("Hamiltonian is not Hermitian")
        self.hamiltonian = h
        self.energies, self.vectors = np.linalg.eigh(h)

    def evolve(self, initial: np.ndarray, t: float) -> np.ndarray:
        psi = np.asarray(initial, dtype=complex)
        c = psi @ self.vectors.conj()
        return (c * np.exp(-1j * self.energies * t)) @ self.vectors.T

    def trajectory(self, initial: np.ndarray, times: np.ndarray) -> np.ndarray:
        """Array of shape ``(len(times), *initial.shape)``."""
        psi = np.asarray(initial, dtype=complex)
        c = psi @ self.vectors.conj()
        phases = np.exp(-1j * np.multiply.outer(np.asarray(times, dtype=float), self.energies))
        phases = phases.reshape((len(phases),) + (1,) * (psi.ndim - 1) + (len(self.energies),))
        return (c[None, ...] * phases) @ self.vectors.T

    def energy(self, psi: np.ndarray) -> float:
        psi = np.asarray(psi)
        return float(np.real(np.sum(psi.conj() * (psi @ self.hamiltonian.T))))


def exact_evolve(initial: np.ndarray, t: float, hamiltonian: np.ndarray) -> np.ndarray:
    return ExactPropagator(hamiltonian).evolve(initial, t)


def exact_probability_series(initial: np.ndarray, hamiltonian: np.ndarray | ExactPropagator,
                             mask: np.ndarray, times: np.ndarray) -> TimeSeries:
    """Probability of the subspace states selected by ``mask`` at each time."""
    prop = hamiltonian if isinstance(hamiltonian, ExactPropagator) else ExactPropagator(hamiltonian)
    times = np.asarray(times, dtype=float)
    if np.any(np.diff(times) < 0):
        raise ValueError("times must be sorted")
    traj = prop.trajectory(initial, times)
    p = np.sum(np.abs(traj[..., np.asarray(mask, dtype=bool)]) ** 2, axis=tuple(range(1, traj.ndim)))
    return TimeSeries(times, np.clip(p, 0.0, 1.0), {"mode": "oracle"})
