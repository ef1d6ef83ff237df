"""Compact register encoding of fermions on a statevector simulator."""
from .algebra import MemoryLayout, MemoryOperator
from .experiments import EvolutionSetup
from .lattice import Discretization, JelliumParams, LatticePoint, MomentumLattice, Spin, build_lattice
from .statevector import Histogram, StateVector

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "Discretization",
    "EvolutionSetup",
    "Histogram",
    "JelliumParams",
    "LatticePoint",
    "MemoryLayout",
    "MemoryOperator",
    "MomentumLattice",
    "Spin",
    "StateVector",
    "build_lattice",
]
