"""Game instances and win conditions.

A win condition is a list of parity constraints ``(mask, parity)``: the
outputs on ``mask`` must XOR to ``parity``. The quantum player, the
Bell-operator expansion and the classical search all consume this form.
"""
from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from functools import lru_cache

from clusterbell.core.errors import DimensionError
from clusterbell.core.pauli import (
    BinaryVector,
    CycleGraph,
    StabilizerGroup,
    Submeasurement,
    cubic_sign,
    cycle_stabilizer,
    generators,
    neighbor_parity,
    parity,
)
from clusterbell.modes.games.inputs import InputKind, InputSet, build_input_set

logger = logging.getLogger(__name__)

Constraint = tuple[int, int]


class GameKind(str, enum.Enum):
    CBF = "cbf"
    SS = "ss"


@lru_cache(maxsize=None)
def cycle_group(n: int) -> StabilizerGroup:
    return generators(CycleGraph(n))


@lru_cache(maxsize=4096)
def _submeasurements(n: int, bits: int) -> tuple[Submeasurement, ...]:
    return tuple(cycle_group(n).submeasurements(BinaryVector(n, bits)))


def cbf_local_inputs(x: BinaryVector) -> list[tuple[int, int]]:
    """s_j = (x_j, x_{j-1} + x_{j+1} mod 2)."""
    b = neighbor_parity(x)
    return [(x[j], b[j]) for j in range(x.n)]


def cbf_support(x: BinaryVector) -> int:
    """Mask of the parties whose local input is not (0, 0)."""
    return x.bits | neighbor_parity(x).bits


def cbf_constraints(x: BinaryVector) -> list[Constraint]:
    return [(cbf_support(x), cubic_sign(x))]


def ss_submeasurements(x: BinaryVector) -> tuple[Submeasurement, ...]:
    return _submeasurements(x.n, x.bits)


def ss_constraints(x: BinaryVector) -> list[Constraint]:
    return [
        (s.support_mask, 0 if s.sign > 0 else 1)
        for s in ss_submeasurements(x)
        if s.support_mask
    ]


def _check(x: BinaryVector, y: BinaryVector) -> None:
    if x.n != y.n:
        raise DimensionError(f"input has length {x.n}, output has length {y.n}")


def satisfies(constraints: list[Constraint], y: BinaryVector | int) -> bool:
    bits = y.bits if isinstance(y, BinaryVector) else y
    return all(parity(mask, bits) == target for mask, target in constraints)


def cbf_referee(x: BinaryVector, y: BinaryVector) -> bool:
    _check(x, y)
    return satisfies(cbf_constraints(x), y)


def ss_referee(x: BinaryVector, y: BinaryVector) -> bool:
    _check(x, y)
    return satisfies(ss_constraints(x), y)


@dataclass(frozen=True)
class GameInstance:
    kind: GameKind
    inputs: InputSet
    _constraints: dict = field(init=False, repr=False, compare=False, default_factory=dict)

    @classmethod
    def build(cls, kind: GameKind | str, inputs: InputKind | str, n: int = 6) -> "GameInstance":
        return cls(GameKind(kind), build_input_set(inputs, n))

    @property
    def n(self) -> int:
        return self.inputs.n

    @property
    def bits_per_party(self) -> int:
        return 2 if self.kind is GameKind.CBF else 1

    @property
    def graph(self) -> CycleGraph:
        return CycleGraph(self.n)

    @property
    def label(self) -> str:
        return f"{self.kind.value.upper()}(C{self.n}, {self.inputs.kind.value})"

    def constraints(self, x: BinaryVector) -> list[Constraint]:
        key = x.bits
        if key not in self._constraints:
            if self.kind is GameKind.CBF:
                self._constraints[key] = cbf_constraints(x)
            else:
                self._constraints[key] = ss_constraints(x)
        return self._constraints[key]

    def referee(self, x: BinaryVector, y: BinaryVector) -> bool:
        _check(x, y)
        return satisfies(self.constraints(x), y)

    def measurement_bases(self, x: BinaryVector) -> str:
        """Per-party Pauli basis of the perfect quantum strategy."""
        if self.kind is GameKind.SS:
            return "".join("Y" if bit else "X" for bit in x)
        letters = {(1, 0): "X", (0, 1): "Z", (1, 1): "Y", (0, 0): "Z"}
        return "".join(letters[s] for s in cbf_local_inputs(x))

    def stabilizer(self, x: BinaryVector):
        return cycle_stabilizer(self.n, x)
