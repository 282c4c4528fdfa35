"""Gate and circuit types, cluster-state preparation and compilation passes."""
from __future__ import annotations

import json
import logging
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from clusterbell.core import config
from clusterbell.core.errors import DimensionError
from clusterbell.core.pauli import CycleGraph

logger = logging.getLogger(__name__)

SINGLE_QUBIT_KINDS = ("RZ", "RXY", "BASIS_ROT")
TWO_QUBIT_KINDS = ("CZ", "RXX")
BASES = ("X", "Y", "Z")

_TWO_PI = 2 * math.pi


@dataclass(frozen=True)
class GateOp:
    kind: str
    targets: tuple[int, ...]
    theta: float = 0.0
    phi: float = 0.0
    basis: str = ""

    def __post_init__(self) -> None:
        if self.kind not in SINGLE_QUBIT_KINDS + TWO_QUBIT_KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        arity = 2 if self.kind in TWO_QUBIT_KINDS else 1
        if len(self.targets) != arity or len(set(self.targets)) != arity:
            raise ValueError(f"{self.kind} needs {arity} distinct targets, got {self.targets}")
        if not (math.isfinite(self.theta) and math.isfinite(self.phi)):
            raise ValueError(f"non-finite angle in {self}")
        if self.kind == "BASIS_ROT" and self.basis not in BASES:
            raise ValueError(f"basis must be one of {BASES}, got {self.basis!r}")

    @property
    def is_two_qubit(self) -> bool:
        return self.kind in TWO_QUBIT_KINDS

    @property
    def is_virtual(self) -> bool:
        """Z rotations are frame updates with no duration and no error."""
        return self.kind == "RZ"

    def matrix(self) -> np.ndarray:
        if self.kind == "RZ":
            return rz_matrix(self.theta)
        if self.kind == "RXY":
            return rxy_matrix(self.phi, self.theta)
        if self.kind == "BASIS_ROT":
            return basis_rotation(self.basis).matrix() if self.basis != "Z" else np.eye(2, dtype=complex)
        if self.kind == "CZ":
            return np.diag([1, 1, 1, -1]).astype(complex)
        return rxx_matrix(self.theta)

    def duration(self, t1: float, t2: float) -> float:
        if self.is_virtual:
            return 0.0
        return t2 if self.is_two_qubit else t1

    def to_dict(self) -> dict:
        out: dict = {"gate": self.kind, "targets": list(self.targets)}
        if self.kind in ("RZ", "RXX"):
            out["angle"] = self.theta
        elif self.kind == "RXY":
            out["angle"] = self.theta
            out["phi"] = self.phi
        elif self.kind == "BASIS_ROT":
            out["basis"] = self.basis
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "GateOp":
        return cls(
            kind=data["gate"],
            targets=tuple(int(t) for t in data["targets"]),
            theta=float(data.get("angle", 0.0)),
            phi=float(data.get("phi", 0.0)),
            basis=data.get("basis", ""),
        )


def rz(q: int, theta: float) -> GateOp:
    return GateOp("RZ", (q,), theta=theta)


def rxy(q: int, phi: float, theta: float) -> GateOp:
    return GateOp("RXY", (q,), theta=theta, phi=phi)


def ry(q: int, theta: float) -> GateOp:
    return rxy(q, math.pi / 2, theta)


def rxx(j: int, k: int, theta: float) -> GateOp:
    return GateOp("RXX", (j, k), theta=theta)


def cz(j: int, k: int) -> GateOp:
    return GateOp("CZ", (j, k))


def rz_matrix(theta: float) -> np.ndarray:
    return np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)])


def rxy_matrix(phi: float, theta: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array(
        [[c, -1j * s * np.exp(-1j * phi)], [-1j * s * np.exp(1j * phi), c]],
        dtype=complex,
    )


def rxx_matrix(theta: float) -> np.ndarray:
    """exp(-i theta X(x)X)."""
    xx = np.fliplr(np.eye(4)).astype(complex)
    return math.cos(theta) * np.eye(4, dtype=complex) - 1j * math.sin(theta) * xx


def basis_rotation(basis: str, qubit: int = 0) -> GateOp:
    """Physical rotation mapping the chosen Pauli onto Z before readout."""
    if basis == "X":
        return ry(qubit, -math.pi / 2)
    if basis == "Y":
        return rxy(qubit, 0.0, math.pi / 2)
    return GateOp("BASIS_ROT", (qubit,), basis="Z")


def hadamard_gates(q: int) -> list[GateOp]:
    """H up to global phase: RZ(pi) first, then RY(pi/2)."""
    return [rz(q, math.pi), ry(q, math.pi / 2)]


@dataclass(frozen=True)
class Circuit:
    n: int
    layers: tuple[tuple[GateOp, ...], ...] = ()

    def __post_init__(self) -> None:
        for i, layer in enumerate(self.layers):
            used: set[int] = set()
            for gate in layer:
                if any(t >= self.n or t < 0 for t in gate.targets):
                    raise DimensionError(f"layer {i}: {gate.kind} targets {gate.targets} outside {self.n} qubits")
                if used & set(gate.targets):
                    raise ValueError(f"layer {i} touches qubit(s) {sorted(used & set(gate.targets))} twice")
                used |= set(gate.targets)

    @classmethod
    def from_gates(cls, n: int, gates: Iterable[GateOp]) -> "Circuit":
        """ASAP layering that keeps per-qubit order."""
        layers: list[list[GateOp]] = []
        level = [0] * n
        for gate in gates:
            at = max(level[t] for t in gate.targets)
            if at == len(layers):
                layers.append([])
            layers[at].append(gate)
            for t in gate.targets:
                level[t] = at + 1
        return cls(n, tuple(tuple(layer) for layer in layers))

    @property
    def depth(self) -> int:
        return len(self.layers)

    def gates(self) -> list[GateOp]:
        return [g for layer in self.layers for g in layer]

    def count(self, kind: str) -> int:
        return sum(1 for g in self.gates() if g.kind == kind)

    def then(self, other: "Circuit") -> "Circuit":
        if other.n != self.n:
            raise DimensionError(f"cannot append {other.n}-qubit circuit to {self.n} qubits")
        return Circuit(self.n, self.layers + other.layers)

    def layer_time(self, index: int, t1: float, t2: float) -> float:
        return max((g.duration(t1, t2) for g in self.layers[index]), default=0.0)

    def to_json(self) -> str:
        return json.dumps([[g.to_dict() for g in layer] for layer in self.layers])

    @classmethod
    def from_json(cls, n: int, text: str) -> "Circuit":
        data = json.loads(text)
        return cls(n, tuple(tuple(GateOp.from_dict(g) for g in layer) for layer in data))


def edge_layers(graph: CycleGraph) -> list[list[tuple[int, int]]]:
    """Cycle edges in disjoint layers: two for even n, three for odd n."""
    n = graph.n
    first = [(j, j + 1) for j in range(0, n - 1, 2)]
    second = [(j, j + 1) for j in range(1, n - 1, 2)]
    if n % 2 == 0:
        second.append((n - 1, 0))
        return [first, second]
    return [first, second, [(n - 1, 0)]]


def _angle_is_zero(theta: float) -> bool:
    r = math.remainder(theta, _TWO_PI)
    return abs(r) < config.ANGLE_EPSILON


def _merge_pair(a: GateOp, b: GateOp) -> Optional[GateOp]:
    """Single gate equal to b after a (up to phase), or None if they do not combine."""
    if a.kind == "RZ" and b.kind == "RZ":
        return rz(a.targets[0], a.theta + b.theta)
    if a.kind == "RXY" and b.kind == "RXY":
        dphi = math.remainder(a.phi - b.phi, _TWO_PI)
        if abs(dphi) < config.ANGLE_EPSILON:
            return rxy(a.targets[0], a.phi, a.theta + b.theta)
        if abs(abs(dphi) - math.pi) < config.ANGLE_EPSILON:
            return rxy(a.targets[0], a.phi, a.theta - b.theta)
    return None


def merge_rotations(n: int, gates: Sequence[GateOp]) -> list[GateOp]:
    """Fuse consecutive same-axis rotations per qubit and drop identities."""
    ops: list[Optional[GateOp]] = []
    stacks: list[list[int]] = [[] for _ in range(n)]
    for gate in gates:
        if gate.is_two_qubit or gate.kind == "BASIS_ROT":
            if gate.kind == "BASIS_ROT" and gate.basis == "Z":
                continue
            ops.append(gate)
            for t in gate.targets:
                stacks[t].append(len(ops) - 1)
            continue
        q = gate.targets[0]
        top = stacks[q][-1] if stacks[q] else None
        merged = None
        if top is not None:
            prev = ops[top]
            merged = _merge_pair(prev, gate) if prev is not None and not prev.is_two_qubit else None
        if merged is None:
            if _angle_is_zero(gate.theta):
                continue
            ops.append(gate)
            stacks[q].append(len(ops) - 1)
        elif _angle_is_zero(merged.theta):
            ops[top] = None
            stacks[q].pop()
        else:
            ops[top] = merged
    return [g for g in ops if g is not None]


def preparation_circuit(graph: CycleGraph, form: str = "RXX") -> Circuit:
    """Circuit taking |0...0> to the cycle cluster state (up to global phase)."""
    form = form.upper()
    n = graph.n
    layers = edge_layers(graph)
    if form == "CZ":
        prep = tuple(ry(q, math.pi / 2) for q in range(n))
        cz_layers = tuple(tuple(cz(j, k) for j, k in layer) for layer in layers)
        return Circuit(n, (prep,) + cz_layers)
    if form != "RXX":
        raise ValueError(f"unknown preparation form {form!r}")

    # CZ = e^{i pi/4} RZ(pi/2)xRZ(pi/2) . V RXX(pi/4) V^dagger, where the
    # first target's U maps X to Z and the second target's maps X to -Z.
    # Diagonal pieces commute, so the RZ corrections collect at the end.
    gates: list[GateOp] = [ry(q, math.pi / 2) for q in range(n)]
    degree = [0] * n
    for layer in layers:
        for j, k in layer:
            first, second = (j, k) if j % 2 == 0 or k % 2 == 1 else (k, j)
            gates += _u_dagger_first(first) + [ry(second, -math.pi / 2)]
            gates.append(rxx(first, second, math.pi / 4))
            gates += hadamard_gates(first) + [ry(second, math.pi / 2)]
            degree[j] += 1
            degree[k] += 1
    gates += [rz(q, degree[q] * math.pi / 2) for q in range(n)]
    merged = merge_rotations(n, gates)
    circuit = Circuit.from_gates(n, merged)
    logger.debug(
        "compiled %d-qubit cluster state: %d RXX, %d RXY, %d RZ, depth %d",
        n, circuit.count("RXX"), circuit.count("RXY"), circuit.count("RZ"), circuit.depth,
    )
    return circuit


def _u_dagger_first(q: int) -> list[GateOp]:
    # H^dagger = H, written so that cancellation against hadamard_gates is adjacent
    return [ry(q, -math.pi / 2), rz(q, -math.pi)]


def su2_to_rxy(u: np.ndarray) -> Optional[GateOp]:
    """RXY(phi, theta) with u = RZ(gamma) . RXY(phi, theta) up to phase.

    Returns None when u is diagonal (a pure frame update).
    """
    c = min(1.0, abs(u[0, 0]))
    theta = 2 * math.acos(c)
    if theta < config.ANGLE_EPSILON:
        return None
    if abs(u[1, 1]) > 1e-9:
        phi = float(np.angle(u[1, 0]) - np.angle(u[1, 1]) + math.pi / 2)
    else:
        phi = float((np.angle(u[1, 0]) - np.angle(u[0, 1])) / 2)
    return rxy(0, math.remainder(phi, _TWO_PI), theta)


def measurement_circuit(prep: Circuit, bases: str, fuse: bool = True) -> Circuit:
    """Append basis rotations; with ``fuse`` each qubit's trailing single-qubit
    segment becomes one physical rotation and trailing Z rotations are dropped."""
    if len(bases) != prep.n:
        raise DimensionError(f"basis pattern {bases!r} does not cover {prep.n} qubits")
    gates = prep.gates() + [
        GateOp("BASIS_ROT", (q,), basis=b) for q, b in enumerate(bases)
    ]
    if not fuse:
        return Circuit.from_gates(prep.n, gates)
    return Circuit.from_gates(prep.n, fuse_tails(prep.n, gates))


def fuse_tails(n: int, gates: Sequence[GateOp]) -> list[GateOp]:
    last_two_qubit = [-1] * n
    for i, g in enumerate(gates):
        if g.is_two_qubit:
            for t in g.targets:
                last_two_qubit[t] = i
    head: list[GateOp] = []
    tails: list[np.ndarray] = [np.eye(2, dtype=complex) for _ in range(n)]
    for i, g in enumerate(gates):
        if not g.is_two_qubit and i > last_two_qubit[g.targets[0]]:
            q = g.targets[0]
            tails[q] = g.matrix() @ tails[q]
        else:
            head.append(g)
    out = merge_rotations(n, head)
    for q in range(n):
        fused = su2_to_rxy(tails[q])
        if fused is not None:
            out.append(rxy(q, fused.phi, fused.theta))
    return out
