"""Input sets for the cycle games."""
from __future__ import annotations

import enum
import logging
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from clusterbell.core.errors import UnsupportedInputSetError
from clusterbell.core.pauli import BinaryVector

logger = logging.getLogger(__name__)

# (x_p0, x_p1, x_p2) assignments kept by the five-input sets
HLF_VALUES = ((0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0), (1, 1, 1))
FULL_INPUT_LIMIT = 20


class InputKind(str, enum.Enum):
    FULL = "full"
    MERMIN55 = "mermin55"
    HLF8 = "hlf8"
    HLF5 = "hlf5"
    HLFN5 = "hlfn5"
    CUSTOM = "custom"


@dataclass(frozen=True)
class InputSet:
    kind: InputKind
    n: int
    inputs: tuple[BinaryVector, ...]

    def __post_init__(self) -> None:
        if not self.inputs:
            raise UnsupportedInputSetError("input set is empty")
        for x in self.inputs:
            if x.n != self.n:
                raise UnsupportedInputSetError(f"input {x} has length {x.n}, expected {self.n}")
        if len(set(self.inputs)) != len(self.inputs):
            raise UnsupportedInputSetError("input set contains duplicates")

    def __len__(self) -> int:
        return len(self.inputs)

    def __iter__(self):
        return iter(self.inputs)

    def labels(self) -> list[str]:
        return [str(x) for x in self.inputs]


def hlf_positions(n: int) -> tuple[int, int, int]:
    """The three free input positions of the hidden-linear-function sets."""
    return (0, 2 * (n // 6), 2 * (n // 3))


def _sorted(vectors: Iterable[BinaryVector]) -> tuple[BinaryVector, ...]:
    return tuple(sorted(vectors, key=str))


def _hlf_inputs(n: int, values: Sequence[tuple[int, int, int]]) -> tuple[BinaryVector, ...]:
    positions = hlf_positions(n)
    out = []
    for triple in values:
        bits = 0
        for p, v in zip(positions, triple):
            bits |= v << p
        out.append(BinaryVector(n, bits))
    return _sorted(out)


def _require_six(kind: InputKind, n: int) -> None:
    if n != 6:
        raise UnsupportedInputSetError(f"{kind.value} is defined for n = 6 only, got n = {n}")


def build_input_set(kind: InputKind | str, n: int, custom: Optional[Sequence[str | BinaryVector]] = None) -> InputSet:
    kind = InputKind(kind)
    if n < 3:
        raise UnsupportedInputSetError(f"the cycle needs n >= 3, got {n}")
    if kind is InputKind.FULL:
        if n > FULL_INPUT_LIMIT:
            raise UnsupportedInputSetError(f"full input set for n = {n} is too large to materialise")
        inputs = _sorted(BinaryVector(n, b) for b in range(1 << n))
    elif kind is InputKind.MERMIN55:
        _require_six(kind, n)
        excluded = {"010101", "101010"}
        inputs = _sorted(
            x for x in (BinaryVector(n, b) for b in range(1 << n))
            if x.weight > 1 and str(x) not in excluded
        )
    elif kind is InputKind.HLF8:
        _require_six(kind, n)
        inputs = _hlf_inputs(n, [(a, b, c) for a in (0, 1) for b in (0, 1) for c in (0, 1)])
    elif kind is InputKind.HLF5:
        _require_six(kind, n)
        inputs = _hlf_inputs(n, HLF_VALUES)
    elif kind is InputKind.HLFN5:
        if n < 6 or n % 2:
            raise UnsupportedInputSetError(f"hlfn5 needs an even n >= 6, got {n}")
        inputs = _hlf_inputs(n, HLF_VALUES)
    else:
        if not custom:
            raise UnsupportedInputSetError("custom input set needs at least one input")
        inputs = tuple(
            c if isinstance(c, BinaryVector) else BinaryVector.from_string(c) for c in custom
        )
    logger.debug("Built %s input set with %d inputs for n=%d", kind.value, len(inputs), n)
    return InputSet(kind, n, inputs)
