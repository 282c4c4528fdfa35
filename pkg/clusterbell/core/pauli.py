"""Signed Pauli algebra and cycle-graph stabilizer groups.

Paulis are stored in symplectic form with Python ints as bit masks
(bit j = qubit j). The operator is ``i**phase * prod_j E(a_j, b_j)`` with
``E(a, b) = i**(a*b) X**a Z**b``, so ``E(1, 1) = Y`` and every Hermitian
Pauli string has phase 0 or 2.
"""
from __future__ import annotations

import enum
import logging
import re
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass, field
from functools import reduce

import numpy as np

from clusterbell.core import gf2
from clusterbell.core.errors import DimensionError, InvalidGraphError

logger = logging.getLogger(__name__)

_SIGNS = {0: "+", 1: "+i", 2: "-", 3: "-i"}
_PAULI_RE = re.compile(r"^\s*([+\-−]?)(i?)\s*([IXYZ]+)\s*$")

_I2 = np.eye(2, dtype=complex)
_X2 = np.array([[0, 1], [1, 0]], dtype=complex)
_Y2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z2 = np.array([[1, 0], [0, -1]], dtype=complex)
SINGLE_QUBIT_MATRICES = {"I": _I2, "X": _X2, "Y": _Y2, "Z": _Z2}


def _mask(n: int) -> int:
    return (1 << n) - 1


def _rot_prev(bits: int, n: int) -> int:
    """bit j of the result is bit j-1 (cyclic) of ``bits``."""
    return ((bits << 1) | (bits >> (n - 1))) & _mask(n)


def _rot_next(bits: int, n: int) -> int:
    """bit j of the result is bit j+1 (cyclic) of ``bits``."""
    return ((bits >> 1) | ((bits & 1) << (n - 1))) & _mask(n)


@dataclass(frozen=True, order=True)
class BinaryVector:
    """A length-n vector over F2, x_0 is the leftmost character when rendered."""

    n: int
    bits: int = 0

    def __post_init__(self) -> None:
        if self.n < 1:
            raise DimensionError(f"vector length must be positive, got {self.n}")
        if self.bits < 0 or self.bits >> self.n:
            raise DimensionError(f"bits {self.bits:#x} do not fit in {self.n} positions")

    @classmethod
    def from_string(cls, text: str) -> "BinaryVector":
        text = text.strip()
        if not text or set(text) - {"0", "1"}:
            raise ValueError(f"not a bitstring: {text!r}")
        return cls(len(text), sum(1 << j for j, ch in enumerate(text) if ch == "1"))

    @classmethod
    def from_iterable(cls, values: Iterable[int]) -> "BinaryVector":
        vals = [int(v) & 1 for v in values]
        return cls(len(vals), sum(v << j for j, v in enumerate(vals)))

    @classmethod
    def zeros(cls, n: int) -> "BinaryVector":
        return cls(n, 0)

    @classmethod
    def ones(cls, n: int) -> "BinaryVector":
        return cls(n, _mask(n))

    def __getitem__(self, j: int) -> int:
        return (self.bits >> (j % self.n)) & 1

    def __len__(self) -> int:
        return self.n

    def __iter__(self) -> Iterator[int]:
        return (self[j] for j in range(self.n))

    def __xor__(self, other: "BinaryVector") -> "BinaryVector":
        _check_n(self.n, other.n)
        return BinaryVector(self.n, self.bits ^ other.bits)

    def __and__(self, other: "BinaryVector") -> "BinaryVector":
        _check_n(self.n, other.n)
        return BinaryVector(self.n, self.bits & other.bits)

    def dot(self, other: "BinaryVector") -> int:
        _check_n(self.n, other.n)
        return (self.bits & other.bits).bit_count() & 1

    @property
    def weight(self) -> int:
        return self.bits.bit_count()

    def support(self) -> tuple[int, ...]:
        return tuple(j for j in range(self.n) if (self.bits >> j) & 1)

    def to_array(self) -> np.ndarray:
        return np.array(list(self), dtype=np.uint8)

    def __str__(self) -> str:
        return "".join(str(b) for b in self)


def _check_n(n: int, m: int) -> None:
    if n != m:
        raise DimensionError(f"size mismatch: {n} vs {m}")


@dataclass(frozen=True)
class PauliOperator:
    n: int
    x: int = 0
    z: int = 0
    phase: int = 0

    def __post_init__(self) -> None:
        if self.n < 1:
            raise DimensionError(f"qubit count must be positive, got {self.n}")
        if (self.x | self.z) >> self.n or self.x < 0 or self.z < 0:
            raise DimensionError(f"Pauli bits do not fit in {self.n} qubits")
        object.__setattr__(self, "phase", self.phase % 4)

    @classmethod
    def identity(cls, n: int) -> "PauliOperator":
        return cls(n)

    @classmethod
    def weyl(cls, a: BinaryVector, b: BinaryVector, phase: int = 0) -> "PauliOperator":
        """E(a, b) times i**phase."""
        _check_n(a.n, b.n)
        return cls(a.n, a.bits, b.bits, phase)

    @classmethod
    def single(cls, n: int, qubit: int, label: str) -> "PauliOperator":
        bit = 1 << qubit
        x = bit if label in "XY" else 0
        z = bit if label in "YZ" else 0
        return cls(n, x, z)

    @property
    def xbits(self) -> BinaryVector:
        return BinaryVector(self.n, self.x)

    @property
    def zbits(self) -> BinaryVector:
        return BinaryVector(self.n, self.z)

    @property
    def support_mask(self) -> int:
        return self.x | self.z

    def support(self) -> tuple[int, ...]:
        return BinaryVector(self.n, self.support_mask).support()

    @property
    def weight(self) -> int:
        return self.support_mask.bit_count()

    def is_hermitian(self) -> bool:
        return self.phase % 2 == 0

    @property
    def sign(self) -> int:
        """+1 or -1 for Hermitian operators."""
        if not self.is_hermitian():
            raise ValueError(f"{self} has an imaginary phase")
        return 1 if self.phase == 0 else -1

    def unsigned(self) -> "PauliOperator":
        return PauliOperator(self.n, self.x, self.z, 0)

    def with_phase(self, phase: int) -> "PauliOperator":
        return PauliOperator(self.n, self.x, self.z, phase)

    def __neg__(self) -> "PauliOperator":
        return self.with_phase(self.phase + 2)

    def __mul__(self, other: "PauliOperator") -> "PauliOperator":
        return multiply(self, other)

    def label(self, j: int) -> str:
        a = (self.x >> j) & 1
        b = (self.z >> j) & 1
        return "IZXY"[2 * a + b]

    def letters(self) -> str:
        return "".join(self.label(j) for j in range(self.n))

    def __str__(self) -> str:
        return render_pauli(self)

    def to_matrix(self) -> np.ndarray:
        """Dense 2^n x 2^n matrix; qubit j is bit j of the basis index."""
        factors = [SINGLE_QUBIT_MATRICES[self.label(j)] for j in reversed(range(self.n))]
        return (1j ** self.phase) * reduce(np.kron, factors)


def multiply(p: PauliOperator, q: PauliOperator) -> PauliOperator:
    """Exact product PQ with the phase tracked mod 4."""
    _check_n(p.n, q.n)
    a, b, c, d = p.x, p.z, q.x, q.z
    phase = (
        p.phase
        + q.phase
        + (a & b).bit_count()
        + (c & d).bit_count()
        + 2 * (b & c).bit_count()
        - ((a ^ c) & (b ^ d)).bit_count()
    )
    return PauliOperator(p.n, a ^ c, b ^ d, phase)


def commutes(p: PauliOperator, q: PauliOperator) -> bool:
    _check_n(p.n, q.n)
    return ((p.x & q.z).bit_count() + (p.z & q.x).bit_count()) % 2 == 0


def locally_commutes(p: PauliOperator, q: PauliOperator) -> bool:
    """Qubit-wise commutation: equal factors or an identity on every qubit."""
    _check_n(p.n, q.n)
    overlap = p.support_mask & q.support_mask
    differ = (p.x ^ q.x) | (p.z ^ q.z)
    return overlap & differ == 0


def render_pauli(p: PauliOperator, signed: bool = True) -> str:
    letters = p.letters()
    return _SIGNS[p.phase] + letters if signed else letters


def parse_pauli(text: str) -> PauliOperator:
    """Inverse of render_pauli; also accepts the unicode minus sign."""
    m = _PAULI_RE.match(text)
    if m is None:
        raise ValueError(f"cannot parse Pauli string {text!r}")
    sign, imag, letters = m.groups()
    phase = (2 if sign in ("-", "−") else 0) + (1 if imag else 0)
    x = z = 0
    for j, ch in enumerate(letters):
        if ch in "XY":
            x |= 1 << j
        if ch in "YZ":
            z |= 1 << j
    return PauliOperator(len(letters), x, z, phase)


@dataclass(frozen=True)
class CycleGraph:
    n: int

    def __post_init__(self) -> None:
        if self.n < 3:
            raise InvalidGraphError(f"a cycle needs at least 3 vertices, got {self.n}")

    def neighbors(self, j: int) -> tuple[int, int]:
        return ((j - 1) % self.n, (j + 1) % self.n)

    def edges(self) -> list[tuple[int, int]]:
        return [(j, (j + 1) % self.n) for j in range(self.n)]

    def distance(self, i: int, j: int) -> int:
        d = abs(i - j) % self.n
        return min(d, self.n - d)


def cubic_sign(x: BinaryVector) -> int:
    """g_n(x) = sum_j x_{j-1} x_j x_{j+1} mod 2."""
    n, bits = x.n, x.bits
    return (_rot_prev(bits, n) & bits & _rot_next(bits, n)).bit_count() & 1


def neighbor_parity(x: BinaryVector) -> BinaryVector:
    """(x_{j-1} + x_{j+1}) mod 2 for every j."""
    return BinaryVector(x.n, _rot_prev(x.bits, x.n) ^ _rot_next(x.bits, x.n))


def cycle_stabilizer(n: int, x: BinaryVector) -> PauliOperator:
    """Closed form of prod_j S_j^{x_j} on the n-cycle."""
    if n < 3:
        raise InvalidGraphError(f"a cycle needs at least 3 vertices, got {n}")
    _check_n(n, x.n)
    return PauliOperator(n, x.bits, neighbor_parity(x).bits, 2 * cubic_sign(x))


class Membership(enum.Enum):
    PLUS = "plus"
    MINUS = "minus"
    NOT_MEMBER = "not_member"


@dataclass(frozen=True)
class Submeasurement:
    pauli: PauliOperator
    sign: int

    @property
    def signed(self) -> PauliOperator:
        return self.pauli if self.sign > 0 else -self.pauli

    @property
    def support_mask(self) -> int:
        return self.pauli.support_mask


@dataclass(frozen=True)
class StabilizerGroup:
    """Group generated by n commuting Hermitian Paulis, membership by elimination."""

    n: int
    generators: tuple[PauliOperator, ...]
    graph: CycleGraph | None = None
    _basis: tuple[tuple[int, int, int], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if len(self.generators) != self.n:
            raise DimensionError(f"expected {self.n} generators, got {len(self.generators)}")
        for g in self.generators:
            _check_n(self.n, g.n)
        # rows: (pivot bit, symplectic vector, generator combination)
        rows: list[tuple[int, int, int]] = []
        for i, g in enumerate(self.generators):
            vec, combo = self._vector(g), 1 << i
            for pivot, rvec, rcombo in rows:
                if vec >> pivot & 1:
                    vec ^= rvec
                    combo ^= rcombo
            if vec == 0:
                raise DimensionError(f"generator {i} is dependent on earlier ones")
            pivot = vec.bit_length() - 1
            rows = [
                (p, v ^ vec, c ^ combo) if v >> pivot & 1 else (p, v, c)
                for p, v, c in rows
            ]
            rows.append((pivot, vec, combo))
        object.__setattr__(self, "_basis", tuple(rows))

    def _vector(self, p: PauliOperator) -> int:
        return p.x | (p.z << self.n)

    @property
    def order(self) -> int:
        return 1 << self.n

    def decompose(self, p: PauliOperator) -> int | None:
        """Generator combination whose product matches p up to phase."""
        _check_n(self.n, p.n)
        vec, combo = self._vector(p), 0
        for pivot, rvec, rcombo in self._basis:
            if vec >> pivot & 1:
                vec ^= rvec
                combo ^= rcombo
        return combo if vec == 0 else None

    def element(self, combination: BinaryVector | int) -> PauliOperator:
        bits = combination.bits if isinstance(combination, BinaryVector) else combination
        out = PauliOperator.identity(self.n)
        for i, g in enumerate(self.generators):
            if bits >> i & 1:
                out = multiply(out, g)
        return out

    def elements(self) -> Iterator[tuple[BinaryVector, PauliOperator]]:
        for bits in range(self.order):
            yield BinaryVector(self.n, bits), self.element(bits)

    def membership_with_sign(self, p: PauliOperator) -> Membership:
        if not p.is_hermitian():
            return Membership.NOT_MEMBER
        combo = self.decompose(p)
        if combo is None:
            return Membership.NOT_MEMBER
        product = self.element(combo)
        return Membership.PLUS if product.phase == p.phase else Membership.MINUS

    def submeasurements(self, x: BinaryVector) -> list[Submeasurement]:
        return stabilizer_submeasurements(self, x)


def generators(graph: CycleGraph) -> StabilizerGroup:
    """S_j = Z_{j-1} X_j Z_{j+1}."""
    n = graph.n
    gens = []
    for j in range(n):
        left, right = graph.neighbors(j)
        gens.append(PauliOperator(n, 1 << j, (1 << left) | (1 << right)))
    return StabilizerGroup(n, tuple(gens), graph)


def membership_with_sign(group: StabilizerGroup, p: PauliOperator) -> Membership:
    return group.membership_with_sign(p)


def submeasurement_kernel(group: StabilizerGroup, x: BinaryVector) -> np.ndarray:
    """Basis (rows) of the masks q with E(q, q & x) in +-S.

    A Pauli lies in the span of a maximal isotropic group iff it commutes with
    every generator, which is linear in q.
    """
    _check_n(group.n, x.n)
    rows = [(g.z ^ (x.bits & g.x)) for g in group.generators]
    return gf2.nullspace(gf2.int_rows(rows, group.n), group.n)


def stabilizer_submeasurements(group: StabilizerGroup, x: BinaryVector) -> list[Submeasurement]:
    """Every submeasurement of E(1, x) that lies in +-S, identity first."""
    basis = gf2.row_ints(submeasurement_kernel(group, x))
    masks = {0}
    for b in basis:
        masks |= {m ^ b for m in masks}
    out = []
    for q in sorted(masks):
        candidate = PauliOperator(group.n, q, q & x.bits)
        status = group.membership_with_sign(candidate)
        if status is Membership.NOT_MEMBER:
            raise AssertionError(f"kernel element {candidate} is not in the group")
        out.append(Submeasurement(candidate, 1 if status is Membership.PLUS else -1))
    return out


def nontrivial_stabilizers(n: int) -> list[tuple[BinaryVector, PauliOperator]]:
    """(x, S_x) for every nonzero x on the n-cycle, in increasing x order."""
    vectors = (BinaryVector(n, bits) for bits in range(1, 1 << n))
    return [(x, cycle_stabilizer(n, x)) for x in vectors]


def bitstring(bits: int, n: int) -> str:
    return str(BinaryVector(n, bits))


def parity(mask: int, outcome: int) -> int:
    return (mask & outcome).bit_count() & 1


def product(ops: Sequence[PauliOperator]) -> PauliOperator:
    if not ops:
        raise ValueError("empty product has no qubit count")
    return reduce(multiply, ops)
