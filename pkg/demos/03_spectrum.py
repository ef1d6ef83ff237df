"""Oscillation frequencies of P(t) from the discrete Fourier transform.

Discretization A has a single frequency.  B mixes four energy levels; five of
the six differences show up at 250 points, the weakest one needs a longer
record.  Peak errors are one frequency bin.
"""
import numpy as np

from compactferm.experiments import EvolutionSetup
from compactferm.spectral import find_peaks, fourier_spectrum


def show(label, series, threshold):
    spec = fourier_spectrum(series)
    peaks = find_peaks(spec, threshold)
    print(f"{label}: bin {spec.spacing:.4f} eV, threshold {threshold:.0%}")
    for p in peaks:
        print(f"  f = {p.frequency:.3f} +- {p.error:.3f} eV   T = {p.period:.3f} +- {p.period_error:.3f} eV^-1")


a = EvolutionSetup("A")
show("A, oracle, 400 points", a.oracle_series(0.067, 400), 0.05)
show("A, 1000 shots, 400 points", a.trotter_series(0.067, 400, shots=1000, seed=1), 0.05)

b = EvolutionSetup("B")
show("B, oracle, 250 points", b.oracle_series(0.067, 250), 0.04)
show("B, trotter, 250 points", b.trotter_series(0.067, 250), 0.04)
show("B, oracle, 1000 points", b.oracle_series(0.067, 1000), 0.02)

# Each line is a level difference over 2 pi (hbar = 1, times in eV^-1).
# The two aux branches evolve identically, so every level shows up twice.
psi = b.initial_subspace_vector()
w = np.sum(np.abs(psi @ b.propagator.vectors.conj()) ** 2, axis=0)
levels = np.unique(np.round(b.propagator.energies[w > 1e-10], 9))
gaps = np.abs(np.subtract.outer(levels, levels))[np.triu_indices(len(levels), 1)]
print("populated levels (eV):", ", ".join(f"{e:.3f}" for e in levels))
print("gaps / 2 pi (eV):", ", ".join(f"{g:.3f}" for g in np.sort(gaps) / (2 * np.pi)))
