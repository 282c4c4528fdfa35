"""Trapped-ion Pauli noise model and stochastic trajectories.

Channels: single-qubit depolarizing after every physical single-qubit gate,
two-qubit depolarizing and joint X(x)X flips after every entangling gate,
X(x)X crosstalk on spectator pairs, and Z dephasing on idle qubits.
"""
from __future__ import annotations

import json
import logging
import math
from dataclasses import asdict, dataclass, replace
from typing import Optional

import numpy as np

from clusterbell.core import config
from clusterbell.core.circuit import Circuit, measurement_circuit, rxx
from clusterbell.core.errors import ConfigError
from clusterbell.core.simulator import (
    StateVector,
    apply_circuit,
    apply_gate,
    apply_pauli_label,
    sample_outcomes,
    sample_rows,
)

logger = logging.getLogger(__name__)

PAULI_LABELS = "IXYZ"
# chunk size for per-stream batching; results do not depend on worker count
SHOT_CHUNK = 4096
# stream keys under a TrajectoryRng root: (SHOT_STREAM, setting, chunk), (READOUT_STREAM, setting)
SHOT_STREAM = 0
READOUT_STREAM = 1

Pair = tuple[int, int]


@dataclass(frozen=True)
class NoiseParams:
    p1d: float = 0.0
    p2d: float = 0.0
    p2XX: float = 0.0
    T2: float = config.DEFAULT_T2
    t1: float = config.SINGLE_QUBIT_GATE_TIME
    t2: float = config.TWO_QUBIT_GATE_TIME
    pc: float = 0.0
    # ((target pair), (spectator pairs...)) entries; None selects the default rule
    crosstalk_pairs: Optional[tuple[tuple[Pair, tuple[Pair, ...]], ...]] = None

    def __post_init__(self) -> None:
        for name in ("p1d", "p2d", "p2XX", "pc"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ConfigError(f"{name} must lie in [0, 1], got {value}")
        if self.T2 <= 0:
            raise ConfigError(f"T2 must be positive, got {self.T2}")
        if self.t1 < 0 or self.t2 < 0:
            raise ConfigError("gate times must be non-negative")

    @classmethod
    def noiseless(cls) -> "NoiseParams":
        return cls(T2=math.inf)

    @classmethod
    def device(cls, p1d: float = config.FITTED_P1D, p2XX: float = config.FITTED_P2XX,
               p2d: float = config.FITTED_P2D) -> "NoiseParams":
        """Fitted device model with the fixed dephasing, timing and crosstalk values."""
        return cls(p1d=p1d, p2d=p2d, p2XX=p2XX, pc=config.CROSSTALK_RATE)

    def with_rates(self, p1d: float, p2XX: float, p2d: float) -> "NoiseParams":
        return replace(self, p1d=p1d, p2XX=p2XX, p2d=p2d)

    @property
    def is_noiseless(self) -> bool:
        return self.p1d == self.p2d == self.p2XX == self.pc == 0.0 and math.isinf(self.T2)

    def p_idle(self, t: float) -> float:
        if t <= 0 or math.isinf(self.T2):
            return 0.0
        return (1.0 - math.exp(-t / (2.0 * self.T2))) / 2.0

    def spectators(self, j: int, k: int, n: int) -> tuple[Pair, ...]:
        target = tuple(sorted((j, k)))
        if self.crosstalk_pairs is not None:
            for pair, spectators in self.crosstalk_pairs:
                if tuple(sorted(pair)) == target:
                    return spectators
            return ()
        return default_spectators(target[0], target[1], n)

    def to_dict(self) -> dict:
        data = asdict(self)
        if self.crosstalk_pairs is not None:
            data["crosstalk_pairs"] = [
                {"target": list(pair), "spectators": [list(s) for s in specs]}
                for pair, specs in self.crosstalk_pairs
            ]
        if math.isinf(self.T2):
            data["T2"] = "inf"
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "NoiseParams":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown noise fields: {sorted(unknown)}")
        kwargs = dict(data)
        if "T2" in kwargs:
            kwargs["T2"] = float(kwargs["T2"])
        pairs = kwargs.pop("crosstalk_pairs", None)
        if pairs is not None:
            kwargs["crosstalk_pairs"] = tuple(
                (tuple(entry["target"]), tuple(tuple(s) for s in entry["spectators"]))
                for entry in pairs
            )
        try:
            return cls(**kwargs)
        except TypeError as exc:
            raise ConfigError(f"invalid noise parameters: {exc}") from exc

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "NoiseParams":
        return cls.from_dict(json.loads(text))


def default_spectators(lo: int, hi: int, n: int) -> tuple[Pair, ...]:
    """Index-adjacent ions of an entangling pair, each coupled to its neighbour target."""
    if hi - lo == 1:
        pairs = []
        if lo - 1 >= 0:
            pairs.append((lo - 1, lo))
        if hi + 1 < n:
            pairs.append((hi, hi + 1))
        return tuple(pairs)
    if lo == 0 and hi == n - 1 and n > 3:
        return ((0, 1), (n - 2, n - 1))
    return ()


def two_qubit_infidelity(noise: NoiseParams) -> float:
    return noise.p2XX + 0.8 * noise.p2d


def single_qubit_infidelity(noise: NoiseParams) -> float:
    return 2.0 * noise.p1d / 3.0


@dataclass(frozen=True)
class TrajectoryRng:
    """Reproducible numpy streams keyed by (seed, experiment, setting, chunk...)."""

    seed: int
    stream: tuple[int, ...] = ()

    def child(self, *ids: int) -> "TrajectoryRng":
        return TrajectoryRng(self.seed, self.stream + tuple(int(i) for i in ids))

    def generator(self) -> np.random.Generator:
        seq = np.random.SeedSequence(entropy=self.seed, spawn_key=self.stream)
        return np.random.Generator(np.random.PCG64(seq))


@dataclass(frozen=True)
class _Location:
    layer: int
    kind: str  # "1q", "2d", "xx", "idle"
    qubits: tuple[int, ...]
    probability: float


def noise_locations(circuit: Circuit, noise: NoiseParams) -> list[_Location]:
    locations: list[_Location] = []
    for li, layer in enumerate(circuit.layers):
        busy: set[int] = set()
        for gate in layer:
            busy |= set(gate.targets)
            if gate.is_two_qubit:
                j, k = gate.targets
                locations.append(_Location(li, "2d", (j, k), noise.p2d))
                locations.append(_Location(li, "xx", (j, k), noise.p2XX))
                for pair in noise.spectators(j, k, circuit.n):
                    locations.append(_Location(li, "xx", tuple(pair), noise.pc))
            # RZ and Z-basis rotations are frame updates with no pulse: no E_1d
            elif not gate.is_virtual and not (gate.kind == "BASIS_ROT" and gate.basis == "Z"):
                locations.append(_Location(li, "1q", gate.targets, noise.p1d))
        p_idle = noise.p_idle(circuit.layer_time(li, noise.t1, noise.t2))
        for q in range(circuit.n):
            if q not in busy:
                locations.append(_Location(li, "idle", (q,), p_idle))
    return [loc for loc in locations if loc.probability > 0.0]


class TrajectorySimulator:
    """Samples noisy measurement outcomes for one circuit."""

    def __init__(self, circuit: Circuit, noise: NoiseParams):
        self.circuit = circuit
        self.noise = noise
        self.locations = noise_locations(circuit, noise)
        self._by_layer: dict[int, list[int]] = {}
        for i, loc in enumerate(self.locations):
            self._by_layer.setdefault(loc.layer, []).append(i)
        self._probs = np.array([loc.probability for loc in self.locations])
        self._ideal: Optional[np.ndarray] = None

    @property
    def ideal_probabilities(self) -> np.ndarray:
        if self._ideal is None:
            final = apply_circuit(StateVector.zero(self.circuit.n), self.circuit)
            probs = final.probabilities()
            self._ideal = probs / probs.sum()
        return self._ideal

    def final_states(self, shots: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
        """Draw error events; return (rows with events, their final amplitudes)."""
        n = self.circuit.n
        count = len(self.locations)
        hits = rng.random((shots, count)) < self._probs[None, :]
        picks = rng.integers(0, 15, size=(shots, count))
        rows = np.nonzero(hits.any(axis=1))[0]
        batch = np.zeros((rows.size, 1 << n), dtype=complex)
        batch[:, 0] = 1.0
        if rows.size == 0:
            return rows, batch
        sub_hits = hits[rows]
        sub_picks = picks[rows]
        for li, layer in enumerate(self.circuit.layers):
            for gate in layer:
                batch = apply_gate(batch, n, gate)
            for loc_index in self._by_layer.get(li, ()):
                batch = self._apply_location(batch, loc_index, sub_hits[:, loc_index], sub_picks[:, loc_index])
        return rows, batch

    def _apply_location(self, batch: np.ndarray, index: int, hit: np.ndarray, pick: np.ndarray) -> np.ndarray:
        if not hit.any():
            return batch
        loc = self.locations[index]
        n = self.circuit.n
        if loc.kind in ("1q", "idle"):
            q = loc.qubits[0]
            labels = np.full(hit.shape, "Z") if loc.kind == "idle" else np.array(list("XYZ"))[pick % 3]
            assignments = [(q, labels)]
        elif loc.kind == "xx":
            j, k = loc.qubits
            assignments = [(j, np.full(hit.shape, "X")), (k, np.full(hit.shape, "X"))]
        else:
            j, k = loc.qubits
            code = pick + 1  # 1..15, skipping II
            letters = np.array(list(PAULI_LABELS))
            assignments = [(j, letters[code // 4]), (k, letters[code % 4])]
        for q, labels in assignments:
            for label in "XYZ":
                rows = np.nonzero(hit & (labels == label))[0]
                if rows.size:
                    batch[rows] = apply_pauli_label(batch[rows], n, label, q)
        return batch

    def sample(self, shots: int, rng: np.random.Generator) -> np.ndarray:
        rows, batch = self.final_states(shots, rng)
        outcomes = np.empty(shots, dtype=np.int64)
        clean = np.ones(shots, dtype=bool)
        clean[rows] = False
        if clean.any():
            outcomes[clean] = sample_outcomes(self.ideal_probabilities, int(clean.sum()), rng)
        if rows.size:
            outcomes[rows] = sample_rows(np.abs(batch) ** 2, rng)
        return outcomes

    def averaged_probabilities(self, trajectories: int, rng: np.random.Generator) -> np.ndarray:
        """Trajectory-averaged outcome populations (exact per trajectory)."""
        rows, batch = self.final_states(trajectories, rng)
        clean = trajectories - rows.size
        total = clean * self.ideal_probabilities
        if rows.size:
            total = total + (np.abs(batch) ** 2).sum(axis=0)
        return total / trajectories


def noisy_shots(prep: Circuit, noise: NoiseParams, bases: str, shots: int, rng: TrajectoryRng) -> np.ndarray:
    """Noisy outcomes (bit j = y_j) for ``shots`` trajectories of prep + readout in ``bases``."""
    if shots < 1:
        raise ValueError(f"shot count must be positive, got {shots}")
    circuit = measurement_circuit(prep, bases, fuse=True)
    simulator = TrajectorySimulator(circuit, noise)
    chunks = []
    for c, start in enumerate(range(0, shots, SHOT_CHUNK)):
        size = min(SHOT_CHUNK, shots - start)
        chunks.append(simulator.sample(size, rng.child(c).generator()))
    return np.concatenate(chunks)


def noisy_shot(prep: Circuit, noise: NoiseParams, bases: str, rng: TrajectoryRng) -> int:
    return int(noisy_shots(prep, noise, bases, 1, rng)[0])


def parity_population_A(populations: np.ndarray, pair: Pair = (0, 1)) -> float:
    """Odd-parity population P(01) + P(10) of a qubit pair from full populations."""
    probs = np.asarray(populations, dtype=float)
    idx = np.arange(probs.size)
    j, k = pair
    odd = ((idx >> j) ^ (idx >> k)) & 1
    return float(probs[odd == 1].sum())


def rxx_parity_population(noise: NoiseParams, trajectories: int, rng: TrajectoryRng) -> float:
    """A for a single RXX(pi/4) on |00> under ``noise``."""
    circuit = Circuit.from_gates(2, [rxx(0, 1, math.pi / 4)])
    simulator = TrajectorySimulator(circuit, noise)
    total = np.zeros(4)
    for c, start in enumerate(range(0, trajectories, SHOT_CHUNK * 16)):
        size = min(SHOT_CHUNK * 16, trajectories - start)
        total += size * simulator.averaged_probabilities(size, rng.child(c).generator())
    return parity_population_A(total / trajectories)
