"""Deterministic classical strategies for the cycle games.

Inputs are seen through *features*: the bits a party receives. A CBF party p
holds features ``a_p`` (index 2p) and ``b_p`` (index 2p+1); an SS party p holds
``x_p`` (index p). A depth-D strategy computes output j from the features of
parties within cycle distance D of j.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from clusterbell.core.errors import GeometryError, UnsupportedInputSetError
from clusterbell.core.pauli import BinaryVector, CycleGraph, neighbor_parity
from clusterbell.modes.games.inputs import hlf_positions
from clusterbell.modes.games.referee import GameInstance, GameKind, satisfies

logger = logging.getLogger(__name__)


def features_per_party(kind: GameKind) -> int:
    return 2 if kind is GameKind.CBF else 1


def feature_owner(kind: GameKind, feature: int) -> int:
    return feature // features_per_party(kind)


def feature_name(kind: GameKind, feature: int) -> str:
    if kind is GameKind.SS:
        return f"x{feature}"
    return f"{'ab'[feature % 2]}{feature // 2}"


def parse_feature(kind: GameKind, name: str) -> int:
    letter, index = name[0], int(name[1:])
    if kind is GameKind.SS:
        if letter != "x":
            raise ValueError(f"SS features are x<j>, got {name!r}")
        return index
    if letter not in "ab":
        raise ValueError(f"CBF features are a<j> or b<j>, got {name!r}")
    return 2 * index + "ab".index(letter)


def feature_bits(kind: GameKind, x: BinaryVector) -> int:
    if kind is GameKind.SS:
        return x.bits
    b = neighbor_parity(x).bits
    out = 0
    for p in range(x.n):
        out |= ((x.bits >> p) & 1) << (2 * p)
        out |= ((b >> p) & 1) << (2 * p + 1)
    return out


@dataclass(frozen=True)
class OutputRule:
    """Truth table of one output; bit i of the table index is feature ``features[i]``."""

    features: tuple[int, ...] = ()
    table: tuple[int, ...] = (0,)

    def __post_init__(self) -> None:
        if len(self.table) != 1 << len(self.features):
            raise ValueError(f"table has {len(self.table)} entries for {len(self.features)} features")
        if len(set(self.features)) != len(self.features):
            raise ValueError("feature listed twice")

    def __call__(self, fbits: int) -> int:
        index = 0
        for i, f in enumerate(self.features):
            index |= ((fbits >> f) & 1) << i
        return self.table[index] & 1


@dataclass(frozen=True)
class GeometricCircuitStrategy:
    kind: GameKind
    n: int
    depth: int
    rules: tuple[OutputRule, ...]
    fan_in: Optional[int] = None

    def __post_init__(self) -> None:
        if len(self.rules) != self.n:
            raise ValueError(f"{len(self.rules)} output rules for {self.n} parties")
        if self.fan_in is None:
            object.__setattr__(self, "fan_in", 3 * features_per_party(self.kind))

    def check_geometry(self) -> None:
        graph = CycleGraph(self.n)
        for j, rule in enumerate(self.rules):
            for f in rule.features:
                owner = feature_owner(self.kind, f)
                if graph.distance(j, owner) > self.depth:
                    raise GeometryError(j, owner, self.depth)

    def outputs(self, x: BinaryVector) -> BinaryVector:
        fbits = feature_bits(self.kind, x)
        return BinaryVector(self.n, sum(rule(fbits) << j for j, rule in enumerate(self.rules)))

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "n": self.n,
            "depth": self.depth,
            "fan_in": self.fan_in,
            "outputs": [
                {
                    "inputs": [feature_name(self.kind, f) for f in rule.features],
                    "table": "".join(str(v) for v in rule.table),
                }
                for rule in self.rules
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "GeometricCircuitStrategy":
        kind = GameKind(data["kind"])
        rules = tuple(
            OutputRule(
                tuple(parse_feature(kind, name) for name in row["inputs"]),
                tuple(int(ch) for ch in row["table"]),
            )
            for row in data["outputs"]
        )
        return cls(kind, int(data["n"]), int(data["depth"]), rules, data.get("fan_in"))


@dataclass(frozen=True)
class LocalStrategy:
    """Depth-0 strategy: party j answers from its own features only."""

    kind: GameKind
    tables: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        width = 1 << features_per_party(self.kind)
        for j, table in enumerate(self.tables):
            if len(table) != width:
                raise ValueError(f"party {j} table has {len(table)} entries, expected {width}")

    @property
    def n(self) -> int:
        return len(self.tables)

    def to_circuit(self) -> GeometricCircuitStrategy:
        l = features_per_party(self.kind)
        rules = tuple(
            OutputRule(tuple(l * j + s for s in range(l)), tuple(table))
            for j, table in enumerate(self.tables)
        )
        return GeometricCircuitStrategy(self.kind, self.n, 0, rules)

    def outputs(self, x: BinaryVector) -> BinaryVector:
        return self.to_circuit().outputs(x)


@dataclass(frozen=True)
class AffineStrategyParams:
    """y_j = alpha + beta x_p + gamma x_q + delta x_p x_q over the free positions output j reads."""

    output: int
    positions: tuple[int, ...]
    alpha: int = 0
    beta: int = 0
    gamma: int = 0
    delta: int = 0

    def coefficient(self, monomial: tuple[int, ...]) -> int:
        if not monomial:
            return self.alpha
        if len(monomial) == 2:
            return self.delta
        return self.beta if monomial[0] == self.positions[0] else self.gamma

    def to_rule(self) -> OutputRule:
        k = len(self.positions)
        table = []
        for index in range(1 << k):
            values = {p: (index >> i) & 1 for i, p in enumerate(self.positions)}
            value = self.alpha
            if k >= 1:
                value ^= self.beta & values[self.positions[0]]
            if k == 2:
                value ^= self.gamma & values[self.positions[1]]
                value ^= self.delta & values[self.positions[0]] & values[self.positions[1]]
            table.append(value)
        return OutputRule(self.positions, tuple(table))


def evaluate_strategy(strategy: GeometricCircuitStrategy | LocalStrategy, game: GameInstance) -> Fraction:
    """Exact win rate over the game's uniform input distribution."""
    circuit = strategy.to_circuit() if isinstance(strategy, LocalStrategy) else strategy
    if circuit.kind is not game.kind or circuit.n != game.n:
        raise ValueError(f"{circuit.kind.value} strategy on {circuit.n} parties cannot play {game.label}")
    circuit.check_geometry()
    wins = sum(satisfies(game.constraints(x), circuit.outputs(x)) for x in game.inputs)
    return Fraction(wins, len(game.inputs))


def cbf_depth1_perfect_strategy(n: int) -> GeometricCircuitStrategy:
    """y_j = a_{j-1} a_j (b_j + a_{j-1}) = x_{j-1} x_j x_{j+1}."""
    CycleGraph(n)
    rules = []
    for j in range(n):
        a_prev, a_self, b_self = 2 * ((j - 1) % n), 2 * j, 2 * j + 1
        table = tuple(
            (i & 1) & ((i >> 1) & 1) & (((i >> 2) & 1) ^ (i & 1)) for i in range(8)
        )
        rules.append(OutputRule((a_prev, a_self, b_self), table))
    return GeometricCircuitStrategy(GameKind.CBF, n, 1, tuple(rules))


def ss_depth_plus_one_perfect_strategy(n: int, depth: int) -> GeometricCircuitStrategy:
    """Perfect depth-(D+1) answer to the five-input SS game on C_{6D}, D odd."""
    if depth < 1 or depth % 2 == 0 or n != 6 * depth:
        raise UnsupportedInputSetError(f"need n = 6D with D odd, got n = {n}, D = {depth}")
    p0, p1, p2 = hlf_positions(n)
    products = {
        (depth + 1) % n: (p0, p1),
        (3 * depth + 1) % n: (p1, p2),
        (5 * depth + 1) % n: (p0, p2),
    }
    rules = []
    for j in range(n):
        if j in products:
            rules.append(OutputRule(tuple(sorted(products[j])), (0, 0, 0, 1)))
        else:
            rules.append(OutputRule())
    return GeometricCircuitStrategy(GameKind.SS, n, depth + 1, tuple(rules))


def strategy_from_params(n: int, depth: int, params: Sequence[AffineStrategyParams]) -> GeometricCircuitStrategy:
    rules = [OutputRule()] * n
    for p in params:
        rules[p.output] = p.to_rule()
    return GeometricCircuitStrategy(GameKind.SS, n, depth, tuple(rules))
