"""Two electrons with opposite spin start at zero momentum and exchange momentum.

The simulator applies the kinetic and exchange factors alternately; the exact
oracle diagonalizes the same Hamiltonian on the doubly occupied subspace.
We print P(register 1 at zero momentum) from both, plus a 1000-shot estimate.
"""
import numpy as np

from compactferm.experiments import EVOLVE_DEFAULTS, EvolutionSetup

for disc, (n, dt) in EVOLVE_DEFAULTS.items():
    setup = EvolutionSetup(disc)
    exact = setup.oracle_series(dt, n)
    trot = setup.trotter_series(dt, n)
    shots = setup.trotter_series(dt, n, shots=1000, seed=7)
    print(f"discretization {disc.value}: {len(setup.lattice)} momenta, "
          f"{setup.layout.total_qubits} qubits, {n} points every {dt} eV^-1")
    print("    t      oracle  trotter  1000 shots")
    for j in range(0, n, max(1, n // 10)):
        print(f"  {exact.times[j]:5.2f}   {exact.values[j]:.4f}  {trot.values[j]:.4f}   {shots.values[j]:.3f}")
    print(f"  max |trotter - oracle| = {np.abs(trot.values - exact.values).max():.4f}\n")

# Where does the probability go?  Every momentum shell takes part in B,
# including the diagonal (+-1, +-1) one.
setup = EvolutionSetup("B")
times = 0.067 * np.arange(250)
traj = setup.propagator.trajectory(setup.initial_subspace_vector(), times)
print("B, register 1, 250 points at 0.067: largest population per shell")
for norm2, pts in setup.lattice.shells().items():
    mask = setup.shell_mask(norm2, register=1)
    pop = np.sum(np.abs(traj[..., mask]) ** 2, axis=(1, 2))
    j = int(np.argmax(pop))
    labels = "".join(setup.lattice.label(p) for p in pts)
    print(f"  |k|^2 = {norm2} ({labels}): {pop[j]:.4f} at t = {times[j]:.2f}")
