"""Conformance checks: each returns a :class:`CheckResult` with the measured figure."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.sparse as sp

from . import algebra, antisym
from .algebra import MemoryLayout, MemoryOperator
from .experiments import EvolutionSetup, phi0
from .hamiltonian import embed_exchange, exchange_generator, second_quantized_exchange
from .lattice import JelliumParams, build_lattice
from .statevector import StateVector, marginal
from .trotter import TrotterConfig, trotter_step

__all__ = [
    "CheckResult",
    "aux_fidelity",
    "antisym_marginal_error",
    "check_antisym_probabilities",
    "check_aux_disentangled",
    "check_anticommutators",
    "check_exchange_hermitian",
    "check_generator_equivalence",
    "trotter_errors",
    "check_trotter_order",
    "check_conservation",
    "check_forbidden_shell",
    "run_all",
]

ExchangeBuilder = Callable[..., MemoryOperator]


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    measured: float
    tolerance: str

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name}: measured {self.measured:.3e} (require {self.tolerance})"


def aux_fidelity(state: StateVector) -> float:
    """<00| rho_aux |00> for the reduced aux state."""
    lay = state.layout
    a = state.amplitudes.reshape(1 << lay.aux_bits, 1 << lay.memory_bits)
    return float(np.vdot(a[0], a[0]).real)


def antisym_marginal_error(state: StateVector) -> float:
    """Max deviation of the register-2 momentum marginal from (None, p0, p1) = (1/2, 1/4, 1/4)."""
    lay = state.layout
    got = marginal(state, lay.momentum_qubits(2)).probabilities
    want = {"00": 0.5, "01": 0.25, "10": 0.25}
    return max(abs(got.get(k, 0.0) - want.get(k, 0.0)) for k in set(got) | set(want))


def check_antisym_probabilities() -> CheckResult:
    err = antisym_marginal_error(antisym.antisymmetrize(phi0()))
    return CheckResult("antisymmetrization marginal (1/2, 1/4, 1/4)", err <= 1e-10, err, "<= 1e-10")


def check_aux_disentangled() -> CheckResult:
    gap = 1 - aux_fidelity(antisym.antisymmetrize(phi0()))
    return CheckResult("aux register returned to |00>", gap <= 1e-10, gap, "1 - F <= 1e-10")


def check_anticommutators(discretization: str = "A") -> CheckResult:
    """Worst entry of {a_r, a^dag_s} - canonical - boundary, plus nilpotency and adjointness."""
    lat = build_lattice(discretization)
    lay = MemoryLayout.for_lattice(lat, aux_bits=0)
    phys = algebra.physical_indices(lay, lat)
    ms = algebra.modes(lat)
    cre = {m: algebra.creation(lay, lat, *m) for m in ms}
    ann = {m: algebra.annihilation(lay, lat, *m) for m in ms}
    worst = 0.0
    for r in ms:
        worst = max(worst, ann[r].max_abs_diff(cre[r].dagger()))
        sq = (cre[r] @ cre[r]).matrix
        worst = max(worst, float(abs(sq).max()) if sq.nnz else 0.0)
        for s in ms:
            d = ann[r] @ cre[s] + cre[s] @ ann[r] - algebra.canonical_part(lay, r, s) \
                - algebra.boundary_term(lay, lat, r, s)
            block = d.matrix[phys][:, phys]
            if block.nnz:
                worst = max(worst, float(abs(block).max()))
    return CheckResult(f"anticommutators, nilpotency, adjointness ({discretization})", worst <= 1e-10, worst, "<= 1e-10")


def _exchange(lattice, params, builder: ExchangeBuilder | None):
    return (builder or exchange_generator)(lattice, params)


def check_exchange_hermitian(exchange_builder: ExchangeBuilder | None = None) -> CheckResult:
    lat = build_lattice("A")
    g = _exchange(lat, JelliumParams(), exchange_builder)
    err = g.max_abs_diff(g.dagger())
    return CheckResult("exchange generator Hermitian", err <= 1e-12, err, "<= 1e-12")


def check_generator_equivalence(exchange_builder: ExchangeBuilder | None = None) -> CheckResult:
    """Antisymmetric-sector projection of the register generator vs. 1/2 sum a^dag a^dag a a."""
    lat = build_lattice("A")
    params = JelliumParams()
    lay = MemoryLayout.for_lattice(lat, aux_bits=0)
    g = embed_exchange(lay, _exchange(lat, params, exchange_builder)).matrix
    brute = second_quantized_exchange(lay, lat, params).matrix
    mem = lay.memory_qubits
    both = (algebra.presence_projector(lay, 1, True) @ algebra.presence_projector(lay, 2, True)).on(mem).matrix
    swap = algebra.register_swap(lay).matrix
    proj = both @ (sp.identity(1 << len(mem), format="csr") - swap) * 0.5
    phys = algebra.physical_indices(lay, lat)
    diff = (proj @ g @ proj - brute)[phys][:, phys]
    err = float(abs(diff).max()) if diff.nnz else 0.0
    return CheckResult("exchange generator == second-quantized sum (A)", err <= 1e-10, err, "<= 1e-10")


def trotter_errors(setup: EvolutionSetup, t: float, ns=(1, 2, 4, 8, 16)) -> np.ndarray:
    """Infidelity 1 - |<exact|trotter>|^2 of the state at ``t`` for each ``n_trotter``."""
    init = setup.initial_state()
    exact = setup.subspace.expand(setup.propagator.evolve(setup.initial_subspace_vector(), t))
    out = []
    for n in ns:
        st = trotter_step(init, TrotterConfig(t, n), setup.generators)
        out.append(1 - abs(np.vdot(exact, st.amplitudes)) ** 2)
    return np.array(out)


def check_trotter_order(t: float = 0.067, ns=(1, 2, 4, 8, 16)) -> CheckResult:
    errs = trotter_errors(EvolutionSetup("A"), t, ns)
    slope = float(np.polyfit(np.log(ns), np.log(errs), 1)[0])
    return CheckResult("Trotter error log-log slope (A)", -2.2 <= slope <= -1.8, slope, "in [-2.2, -1.8]")


def _commutator_norm(diag: np.ndarray, h: np.ndarray) -> float:
    return float(np.abs(np.subtract.outer(diag, diag) * h).max())


def check_conservation(discretization: str = "B") -> CheckResult:
    setup = EvolutionSetup(discretization)
    sub, h = setup.subspace, setup.hamiltonian
    m1, m2 = sub.momentum(1), sub.momentum(2)
    s1, s2 = sub.spin(1), sub.spin(2)
    charges = [
        np.array([a.i + b.i for a, b in zip(m1, m2)]),
        np.array([a.j + b.j for a, b in zip(m1, m2)]),
        (s1 == 1).astype(int) + (s2 == 1).astype(int),
        (s1 == 0).astype(int) + (s2 == 0).astype(int),
        s1, s2,
    ]
    worst = max(_commutator_norm(c, h) for c in charges)
    prop = setup.propagator
    psi0 = setup.initial_subspace_vector()
    e0 = prop.energy(psi0)
    for psi in prop.trajectory(psi0, 0.067 * np.arange(0, 250, 7)):
        worst = max(worst, abs(np.linalg.norm(psi) - 1), abs(prop.energy(psi) - e0))
    return CheckResult(f"momentum/spin conservation, norm and <H> ({discretization})", worst < 1e-10, worst, "< 1e-10")


def check_forbidden_shell(n_points: int = 250, dt: float = 0.067) -> CheckResult:
    """Largest probability of either register holding a (+-1, +-1) momentum (B)."""
    setup = EvolutionSetup("B")
    mask = setup.shell_mask(2)
    traj = setup.propagator.trajectory(setup.initial_subspace_vector(), dt * np.arange(n_points))
    p = np.sum(np.abs(traj[..., mask]) ** 2, axis=(1, 2))
    top = float(p.max())
    return CheckResult("{B,D,J,L} shell never populated (B)", top < 1e-8, top, "< 1e-8")


def run_all(exchange_builder: ExchangeBuilder | None = None) -> list[CheckResult]:
    return [
        check_antisym_probabilities(),
        check_aux_disentangled(),
        check_anticommutators("A"),
        check_exchange_hermitian(exchange_builder),
        check_generator_equivalence(exchange_builder),
        check_trotter_order(),
        check_conservation("B"),
        check_forbidden_shell(),
    ]
