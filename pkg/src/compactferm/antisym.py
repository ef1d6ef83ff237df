"""Ancilla-assisted unitary antisymmetrization of a two-register memory.

The two auxiliary qubits address the register holding the larger ordering key
(the register bitstring read as an unsigned integer): aux ``10`` points to
register 2, aux ``01`` to register 1.  Stages are basis permutations and a
4x4 aux rotation, so no comparator circuit is synthesized.

Input convention: on every doubly occupied branch the larger key sits in
register 2 and the aux register is cleared.
"""
from __future__ import annotations

import math

import numpy as np

from .algebra import MemoryLayout
from .statevector import StateVector, apply_matrix, permute

__all__ = [
    "REG2_LARGER",
    "REG1_LARGER",
    "position_of_largest",
    "mark_largest",
    "antisymmetrize_aux",
    "AUX_ROTATION",
    "conditional_swap_phase",
    "locate_largest_uncompute",
    "antisymmetrize",
]

REG2_LARGER = 0b10
REG1_LARGER = 0b01

_s = 1 / math.sqrt(2)
# columns are images of aux |00>, |01>, |10>, |11> (little-endian in aux qubits)
AUX_ROTATION = np.array([
    [1, 0, 0, 0],
    [0, _s, -_s, 0],
    [0, _s, _s, 0],
    [0, 0, 0, 1],
], dtype=complex)


def _check_layout(layout: MemoryLayout):
    if layout.n_registers != 2 or layout.aux_bits != 2:
        raise ValueError("antisymmetrization needs two registers and two auxiliary qubits")


def position_of_largest(layout: MemoryLayout, index: np.ndarray | int) -> np.ndarray:
    """Aux code of the register with the larger key; 0 unless both registers are occupied."""
    index = np.asarray(index, dtype=np.int64)
    flag = 1 << (layout.bits_per_register - 1)
    r1 = layout.register_value(index, 1)
    r2 = layout.register_value(index, 2)
    both = (r1 & flag).astype(bool) & (r2 & flag).astype(bool)
    code = np.where(r2 > r1, REG2_LARGER, np.where(r1 > r2, REG1_LARGER, 0))
    return np.where(both, code, 0)


def _comparator_xor(state: StateVector) -> StateVector:
    layout = state.layout
    idx = np.arange(len(state.amplitudes), dtype=np.int64)
    perm = idx ^ (position_of_largest(layout, idx) << layout.memory_bits)
    return permute(state, perm)


def _support(state: StateVector, tol: float = 1e-12) -> np.ndarray:
    return np.nonzero(np.abs(state.amplitudes) > tol)[0]


def mark_largest(state: StateVector) -> StateVector:
    """Write the position of the larger register onto a cleared aux register."""
    _check_layout(state.layout)
    if np.any(_support(state) >> state.layout.memory_bits):
        raise ValueError("auxiliary register is not cleared")
    return _comparator_xor(state)


def antisymmetrize_aux(state: StateVector) -> StateVector:
    """aux ``|10> -> (|10> - |01>)/sqrt2`` and ``|01> -> (|10> + |01>)/sqrt2``."""
    _check_layout(state.layout)
    return apply_matrix(state, AUX_ROTATION, state.layout.aux_qubits)


def conditional_swap_phase(state: StateVector) -> StateVector:
    """Exchange the two registers on branches whose second aux qubit is 1.

    The exchange sign is carried by the minus produced in
    :func:`antisymmetrize_aux`, so no further phase is needed here.
    """
    layout = state.layout
    _check_layout(layout)
    idx = np.arange(len(state.amplitudes), dtype=np.int64)
    r1 = layout.register_value(idx, 1)
    r2 = layout.register_value(idx, 2)
    w = layout.bits_per_register
    swapped = (idx >> layout.memory_bits << layout.memory_bits) | r1 << w | r2
    ctrl = (idx >> layout.aux_qubits[0]) & 1
    return permute(state, np.where(ctrl == 1, swapped, idx))


def locate_largest_uncompute(state: StateVector) -> StateVector:
    """XOR the aux register with the position of the larger register."""
    _check_layout(state.layout)
    return _comparator_xor(state)


def antisymmetrize(state: StateVector, uncompute: bool = True) -> StateVector:
    """Run mark -> aux rotation -> conditional swap (-> uncompute).

    Doubly occupied branches must have a strictly larger key in register 2;
    equal keys would violate Pauli exclusion and reversed order is not
    reachable by filling the memory in order.
    """
    layout = state.layout
    _check_layout(layout)
    sup = _support(state)
    pos = position_of_largest(layout, sup)
    r1 = layout.register_value(sup, 1)
    r2 = layout.register_value(sup, 2)
    flag = 1 << (layout.bits_per_register - 1)
    both = ((r1 & flag) > 0) & ((r2 & flag) > 0)
    if np.any(both & (pos != REG2_LARGER)):
        raise ValueError("doubly occupied branch without a strictly larger key in register 2")
    out = conditional_swap_phase(antisymmetrize_aux(mark_largest(state)))
    return locate_largest_uncompute(out) if uncompute else out
