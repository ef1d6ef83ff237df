"""Momentum lattices, jellium constants and the register codification.

A register stores one particle as ``[presence | spin | momentum]`` with the
presence bit most significant.  The all-zeros momentum pattern never encodes
a physical momentum, so an empty register is the all-zeros bitstring.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from enum import Enum, IntEnum

__all__ = [
    "Discretization",
    "Spin",
    "LatticePoint",
    "MomentumLattice",
    "JelliumParams",
    "CodificationError",
    "RegularizationError",
    "build_lattice",
    "kinetic_energy",
    "coupling",
    "encode_state",
    "decode_state",
    "codification_csv",
]


class CodificationError(ValueError):
    """A momentum or bitstring that the active codification cannot represent."""


class RegularizationError(ValueError):
    """Raised for the excluded zero momentum transfer."""


class Discretization(str, Enum):
    A = "A"
    B = "B"


class Spin(IntEnum):
    DOWN = 0
    UP = 1


@dataclass(frozen=True, order=True)
class LatticePoint:
    """Dimensionless lattice momentum; the physical value is sqrt(4 pi / N_e) * (i, j)."""

    i: int
    j: int

    def __add__(self, other: LatticePoint) -> LatticePoint:
        return LatticePoint(self.i + other.i, self.j + other.j)

    def __sub__(self, other: LatticePoint) -> LatticePoint:
        return LatticePoint(self.i - other.i, self.j - other.j)

    def __neg__(self) -> LatticePoint:
        return LatticePoint(-self.i, -self.j)

    @property
    def norm2(self) -> int:
        return self.i * self.i + self.j * self.j

    def __str__(self) -> str:
        return f"({self.i},{self.j})"


# Points of the 13-point diamond |i| + |j| <= 2, lettered row by row from the
# top (j = 2) and left to right.  The letters of the 5-point lattice agree with
# this reading: C=(0,1), F=(-1,0), G=(0,0), H=(1,0), K=(0,-1).
_DIAMOND_LABELS = dict(zip(
    "ABCDEFGHIJKLM",
    [LatticePoint(i, j) for j in range(2, -3, -1) for i in range(-2, 3) if abs(i) + abs(j) <= 2],
))

# Codes of the 5-point table; the 13-point codification keeps these values and
# numbers the remaining letters alphabetically after them.
_TABLE_A = {"C": 0b001, "F": 0b010, "G": 0b011, "H": 0b100, "K": 0b101}


@dataclass(frozen=True)
class MomentumLattice:
    discretization: Discretization
    labels: tuple[str, ...]
    points: tuple[LatticePoint, ...]
    codes: tuple[int, ...]
    momentum_bits: int
    _by_point: dict = field(init=False, repr=False, compare=False)
    _by_code: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        by_point = dict(zip(self.points, self.codes))
        by_code = dict(zip(self.codes, self.points))
        if len(by_point) != len(self.points) or len(by_code) != len(self.codes):
            raise CodificationError("codification is not injective")
        if 0 in by_code:
            raise CodificationError("the all-zeros momentum pattern is reserved")
        object.__setattr__(self, "_by_point", by_point)
        object.__setattr__(self, "_by_code", by_code)

    def __len__(self) -> int:
        return len(self.points)

    def __contains__(self, p: LatticePoint) -> bool:
        return p in self._by_point

    def code(self, p: LatticePoint) -> int:
        try:
            return self._by_point[p]
        except KeyError:
            raise CodificationError(f"{p} is not on lattice {self.discretization.value}") from None

    def point(self, code: int) -> LatticePoint | None:
        """Decode a momentum pattern; ``None`` for the all-zeros pattern."""
        if code == 0:
            return None
        try:
            return self._by_code[code]
        except KeyError:
            raise CodificationError(f"momentum pattern {code:0{self.momentum_bits}b} is unassigned") from None

    def label(self, p: LatticePoint) -> str:
        return self.labels[self.points.index(p)]

    def by_label(self, label: str) -> LatticePoint:
        return self.points[self.labels.index(label)]

    def shells(self) -> dict[int, list[LatticePoint]]:
        """Points grouped by |k|^2, i.e. by kinetic energy."""
        out: dict[int, list[LatticePoint]] = {}
        for p in self.points:
            out.setdefault(p.norm2, []).append(p)
        return dict(sorted(out.items()))

    def transfers(self) -> list[LatticePoint]:
        """All nonzero differences of lattice points, sorted."""
        qs = {a - b for a in self.points for b in self.points}
        qs.discard(LatticePoint(0, 0))
        return sorted(qs)


@dataclass(frozen=True)
class JelliumParams:
    N_e: int = 2
    r_s: float = 30.0
    E_0: float = 340.0  # eV

    def __post_init__(self):
        if self.N_e < 1 or not self.r_s > 0 or not self.E_0 > 0:
            raise ValueError(f"invalid jellium parameters {self}")

    @property
    def k_scale2(self) -> float:
        """Squared conversion factor from lattice units to dimensionless momentum."""
        return 4 * math.pi / self.N_e


def build_lattice(discretization: Discretization | str) -> MomentumLattice:
    disc = Discretization(discretization)
    if disc is Discretization.A:
        labels = tuple(_TABLE_A)
        codes = tuple(_TABLE_A.values())
        bits = 3
    else:
        rest = [lab for lab in _DIAMOND_LABELS if lab not in _TABLE_A]
        labels = tuple(_TABLE_A) + tuple(rest)
        codes = tuple(_TABLE_A.values()) + tuple(range(len(_TABLE_A) + 1, len(_DIAMOND_LABELS) + 1))
        bits = 4
    points = tuple(_DIAMOND_LABELS[lab] for lab in labels)
    return MomentumLattice(disc, labels, points, codes, bits)


def kinetic_energy(p: LatticePoint, params: JelliumParams) -> float:
    """e_k = |k|^2 E_0 / (2 r_s^2) in eV."""
    return params.k_scale2 * p.norm2 * params.E_0 / (2 * params.r_s ** 2)


def coupling(q: LatticePoint, params: JelliumParams) -> float:
    """lambda_q = E_0 / (r_s N_e |q|) in eV; the zero transfer is excluded."""
    if q.norm2 == 0:
        raise RegularizationError("momentum transfer q = (0,0) is excluded by regularization")
    return params.E_0 / (params.r_s * params.N_e * math.sqrt(params.k_scale2 * q.norm2))


def encode_state(presence: int, spin: Spin | int, p: LatticePoint | None,
                 lattice: MomentumLattice) -> str:
    """Register bitstring ``presence spin momentum``, most significant bit first."""
    width = 2 + lattice.momentum_bits
    if not presence:
        return "0" * width
    if p is None:
        raise CodificationError("an occupied register needs a momentum")
    return f"1{int(Spin(spin))}{lattice.code(p):0{lattice.momentum_bits}b}"


def decode_state(bits: str, lattice: MomentumLattice) -> tuple[int, Spin | None, LatticePoint | None]:
    if len(bits) != 2 + lattice.momentum_bits or set(bits) - {"0", "1"}:
        raise CodificationError(f"malformed register bitstring {bits!r}")
    if bits[0] == "0":
        if "1" in bits:
            raise CodificationError(f"empty register with stray bits {bits!r}")
        return 0, None, None
    return 1, Spin(int(bits[1])), lattice.point(int(bits[2:], 2))


def codification_csv(lattice: MomentumLattice) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["bitstring", "label", "i", "j"])
    w.writerow(["0" * lattice.momentum_bits, "None", "", ""])
    for lab, p, c in sorted(zip(lattice.labels, lattice.points, lattice.codes), key=lambda t: t[2]):
        w.writerow([f"{c:0{lattice.momentum_bits}b}", lab, p.i, p.j])
    return buf.getvalue()
