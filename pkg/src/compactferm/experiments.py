"""The concrete setups: scalar antisymmetrization demo and two-electron evolution."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import antisym
from .algebra import MemoryLayout
from .hamiltonian import GeneratorSet, PairSubspace, build_generators, dense_hamiltonian
from .lattice import Discretization, JelliumParams, LatticePoint, MomentumLattice, Spin, build_lattice
from .oracle import ExactPropagator, exact_probability_series
from .statevector import Histogram, StateVector, from_amplitudes, marginal, outcome_probability, sample
from .spectral import TimeSeries
from .trotter import TrotterConfig, trotter_trajectory

__all__ = [
    "SCALAR_LAYOUT",
    "SCALAR_MOMENTA",
    "phi0",
    "measured_qubits",
    "antisym_histograms",
    "P0",
    "EvolutionSetup",
    "EVOLVE_DEFAULTS",
    "SPECTRUM_DEFAULTS",
]

# Scalar particles: presence + two momentum qubits per register, 00 meaning "None".
SCALAR_LAYOUT = MemoryLayout(n_registers=2, momentum_bits=2, spin_bits=0, aux_bits=2)
SCALAR_MOMENTA = {"None": 0b00, "p0": 0b01, "p1": 0b10, "p2": 0b11}

P0 = LatticePoint(0, 0)

# (n_points, dt) per discretization
EVOLVE_DEFAULTS = {Discretization.A: (100, 0.055), Discretization.B: (151, 0.03)}
SPECTRUM_DEFAULTS = {Discretization.A: (400, 0.067), Discretization.B: (250, 0.067)}


def _scalar_register(momentum: str | None) -> int:
    if momentum is None:
        return 0
    return 0b100 | SCALAR_MOMENTA[momentum]


def phi0() -> StateVector:
    """(|Omega>_2 |1 p0>_1 + |1 p1>_2 |1 p0>_1) / sqrt2, aux cleared."""
    lay = SCALAR_LAYOUT
    s = 1 / math.sqrt(2)
    return from_amplitudes(lay, {
        lay.basis_index([_scalar_register("p0"), _scalar_register(None)]): s,
        lay.basis_index([_scalar_register("p0"), _scalar_register("p1")]): s,
    })


def measured_qubits(layout: MemoryLayout = SCALAR_LAYOUT) -> tuple[int, ...]:
    """Aux qubits plus the momentum qubits of register 2."""
    return layout.aux_qubits + layout.momentum_qubits(2)


def antisym_histograms(shots: int | None = 5000, seed: int | None = None) -> dict[str, dict]:
    """Exact and sampled histograms of the demo with and without the uncompute stage.

    Returns ``{"entangled": {...}, "uncomputed": {...}}`` each holding the
    final ``state``, the ``exact`` histogram and, if ``shots``, a ``sampled`` one.
    Both stages draw from one generator seeded with ``seed``.
    """
    rng = np.random.default_rng(seed)
    out = {}
    qubits = measured_qubits()
    for name, uncompute in (("entangled", False), ("uncomputed", True)):
        st = antisym.antisymmetrize(phi0(), uncompute=uncompute)
        entry: dict = {"state": st, "exact": marginal(st, qubits)}
        if shots:
            h = sample(st, qubits, shots, rng)
            h.metadata["seed"] = seed
            entry["sampled"] = h
        out[name] = entry
    return out


@dataclass(eq=False)
class EvolutionSetup:
    """Two electrons on a momentum lattice, with the simulator and the exact oracle."""

    discretization: Discretization
    params: JelliumParams = field(default_factory=JelliumParams)

    def __post_init__(self):
        self.discretization = Discretization(self.discretization)

    @cached_property
    def lattice(self) -> MomentumLattice:
        return build_lattice(self.discretization)

    @cached_property
    def layout(self) -> MemoryLayout:
        return MemoryLayout.for_lattice(self.lattice, n_registers=2, aux_bits=2)

    @cached_property
    def generators(self) -> GeneratorSet:
        return build_generators(self.lattice, self.params)

    @cached_property
    def _dense(self) -> tuple[np.ndarray, PairSubspace]:
        return dense_hamiltonian(self.lattice, self.params, self.layout, self.generators)

    @property
    def hamiltonian(self) -> np.ndarray:
        return self._dense[0]

    @property
    def subspace(self) -> PairSubspace:
        return self._dense[1]

    @cached_property
    def propagator(self) -> ExactPropagator:
        return ExactPropagator(self.hamiltonian)

    def _register(self, spin: Spin, p: LatticePoint) -> int:
        lay = self.layout
        return (1 << (lay.bits_per_register - 1)) | (int(spin) << lay.momentum_bits) | self.lattice.code(p)

    def initial_state(self) -> StateVector:
        """Two opposite-spin electrons at p0, antisymmetrized with the aux left entangled.

        ``|up p0>_2 |down p0>_1`` is passed through the marking, aux rotation
        and conditional swap stages, giving
        ``(|10>|up p0, down p0> - |01>|down p0, up p0>) / sqrt2``.
        """
        lay = self.layout
        start = from_amplitudes(lay, {lay.basis_index([self._register(Spin.DOWN, P0),
                                                       self._register(Spin.UP, P0)]): 1.0})
        return antisym.antisymmetrize(start, uncompute=False)

    @property
    def observed_qubits(self) -> tuple[int, ...]:
        return self.layout.momentum_qubits(1)

    @property
    def p0_code(self) -> int:
        return self.lattice.code(P0)

    def p0_mask(self) -> np.ndarray:
        return np.array([p == P0 for p in self.subspace.momentum(1)])

    def shell_mask(self, norm2: int, register: int | None = None) -> np.ndarray:
        """Subspace states with a momentum of ``|k|^2 = norm2`` in ``register`` (either if None)."""
        regs = (1, 2) if register is None else (register,)
        m = np.zeros(len(self.subspace), dtype=bool)
        for r in regs:
            m |= np.array([p.norm2 == norm2 for p in self.subspace.momentum(r)])
        return m

    def initial_subspace_vector(self) -> np.ndarray:
        return self.subspace.restrict(self.initial_state().amplitudes)

    def oracle_series(self, dt: float, n_points: int) -> TimeSeries:
        times = dt * np.arange(n_points)
        ts = exact_probability_series(self.initial_subspace_vector(), self.propagator, self.p0_mask(), times)
        ts.metadata.update(discretization=self.discretization.value, dt=dt, n_points=n_points)
        return ts

    def trotter_series(self, dt: float, n_points: int, n_trotter: int = 1,
                       shots: int = 0, seed: int | None = None) -> TimeSeries:
        """P(p0 in register 1) at ``j*dt``; exact marginals if ``shots == 0``."""
        cfg = TrotterConfig(dt, n_trotter)
        rng = np.random.default_rng(seed)
        qubits = self.observed_qubits
        key = f"{self.p0_code:0{self.layout.momentum_bits}b}"
        vals = []
        for st in trotter_trajectory(self.initial_state(), cfg, self.generators, n_points):
            if shots:
                h: Histogram = sample(st, qubits, shots, rng)
                vals.append(h.counts.get(key, 0) / shots)
            else:
                vals.append(min(1.0, outcome_probability(st, qubits, self.p0_code)))
        meta = dict(mode="trotter", discretization=self.discretization.value, dt=dt,
                    n_points=n_points, n_trotter=n_trotter, shots=shots, seed=seed)
        return TimeSeries(dt * np.arange(n_points), np.array(vals), meta)
