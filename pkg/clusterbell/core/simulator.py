"""Dense state-vector simulation.

Amplitude index bit j is qubit j. Kernels work on batches shaped
``(B, 2**n)`` so that one code path serves single states and trajectory
ensembles.
"""
from __future__ import annotations

import logging
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

from clusterbell.core import config
from clusterbell.core.circuit import Circuit, GateOp, measurement_circuit
from clusterbell.core.errors import DimensionError, NonHermitianError
from clusterbell.core.pauli import PauliOperator, SINGLE_QUBIT_MATRICES

logger = logging.getLogger(__name__)

Sampler = Callable[[str, int], np.ndarray]


@dataclass(frozen=True)
class StateVector:
    n: int
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amps.shape[0] != 1 << self.n:
            raise DimensionError(f"{amps.shape[0]} amplitudes for {self.n} qubits")
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1.0) > 1e-8:
            raise ValueError(f"state is not normalised (norm^2 = {norm:.12f})")
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def zero(cls, n: int) -> "StateVector":
        amps = np.zeros(1 << n, dtype=complex)
        amps[0] = 1.0
        return cls(n, amps)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def fidelity(self, other: "StateVector") -> float:
        if other.n != self.n:
            raise DimensionError(f"size mismatch: {self.n} vs {other.n}")
        return float(abs(np.vdot(self.amplitudes, other.amplitudes)) ** 2)


def _axis(n: int, q: int) -> int:
    # batch axis first, then qubits from most to least significant
    return 1 + (n - 1 - q)


def apply_1q(batch: np.ndarray, n: int, matrix: np.ndarray, q: int) -> np.ndarray:
    shaped = batch.reshape((batch.shape[0],) + (2,) * n)
    ax = _axis(n, q)
    out = np.tensordot(matrix, shaped, axes=([1], [ax]))
    out = np.moveaxis(out, 0, ax)
    return out.reshape(batch.shape[0], -1)


def apply_2q(batch: np.ndarray, n: int, matrix: np.ndarray, j: int, k: int) -> np.ndarray:
    """``matrix`` is indexed by 2*b_j + b_k."""
    shaped = batch.reshape((batch.shape[0],) + (2,) * n)
    axj, axk = _axis(n, j), _axis(n, k)
    out = np.tensordot(matrix.reshape(2, 2, 2, 2), shaped, axes=([2, 3], [axj, axk]))
    out = np.moveaxis(out, [0, 1], [axj, axk])
    return out.reshape(batch.shape[0], -1)


def apply_gate(batch: np.ndarray, n: int, gate: GateOp) -> np.ndarray:
    if gate.kind == "BASIS_ROT" and gate.basis == "Z":
        return batch
    if gate.is_two_qubit:
        return apply_2q(batch, n, gate.matrix(), *gate.targets)
    return apply_1q(batch, n, gate.matrix(), gate.targets[0])


def apply_pauli_label(batch: np.ndarray, n: int, label: str, q: int) -> np.ndarray:
    if label == "I":
        return batch
    return apply_1q(batch, n, SINGLE_QUBIT_MATRICES[label], q)


def apply_circuit(state: StateVector, circuit: Circuit) -> StateVector:
    if state.n != circuit.n:
        raise DimensionError(f"{circuit.n}-qubit circuit on a {state.n}-qubit state")
    batch = state.amplitudes.reshape(1, -1)
    for layer in circuit.layers:
        for gate in layer:
            batch = apply_gate(batch, state.n, gate)
    out = StateVector(state.n, batch[0])
    if abs(out.norm - 1.0) > config.NORM_TOLERANCE:
        raise ArithmeticError(f"norm drifted to {out.norm!r}")
    return out


def parities(outcomes: np.ndarray, mask: int, n: int) -> np.ndarray:
    """(-1)-exponent parity of ``outcomes & mask`` for an array of outcomes."""
    sel = np.asarray(outcomes, dtype=np.int64) & mask
    out = np.zeros(sel.shape, dtype=np.int64)
    for j in range(n):
        out ^= (sel >> j) & 1
    return out


def apply_pauli(state: StateVector, p: PauliOperator) -> np.ndarray:
    """Amplitudes of P|psi>."""
    n = state.n
    idx = np.arange(1 << n)
    coeff = 1j ** ((p.phase + (p.x & p.z).bit_count()) % 4)
    signs = 1 - 2 * parities(idx ^ p.x, p.z, n)
    return coeff * signs * state.amplitudes[idx ^ p.x]


def pauli_expectation(state: StateVector, p: PauliOperator) -> float:
    if p.n != state.n:
        raise DimensionError(f"{p.n}-qubit Pauli on a {state.n}-qubit state")
    if not p.is_hermitian():
        raise NonHermitianError(f"{p} is not Hermitian")
    value = np.vdot(state.amplitudes, apply_pauli(state, p))
    return float(value.real)


def rotate_to_basis(state: StateVector, bases: str) -> StateVector:
    circuit = measurement_circuit(Circuit(state.n), bases, fuse=False)
    return apply_circuit(state, circuit)


def outcome_probabilities(state: StateVector, bases: str) -> np.ndarray:
    probs = rotate_to_basis(state, bases).probabilities()
    return probs / probs.sum()


def sample_outcomes(probs: np.ndarray, shots: int, rng: np.random.Generator) -> np.ndarray:
    if shots < 1:
        raise ValueError(f"shot count must be positive, got {shots}")
    return rng.choice(probs.shape[0], size=shots, p=probs)


def measure_and_sample(state: StateVector, bases: str, shots: int, rng) -> np.ndarray:
    """Outcomes as ints with bit j = y_j; y_j = 0 is the +1 eigenvalue."""
    generator = rng.generator() if hasattr(rng, "generator") else rng
    return sample_outcomes(outcome_probabilities(state, bases), shots, generator)


def sample_rows(probs: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """One outcome per row of a (B, 2**n) probability matrix."""
    cum = np.cumsum(probs, axis=1)
    cum /= cum[:, -1:]
    u = rng.random(probs.shape[0])
    picks = (cum < u[:, None]).sum(axis=1)
    return np.minimum(picks, probs.shape[1] - 1)


class IdealSampler:
    """Samples a fixed state in any basis pattern, caching per pattern."""

    def __init__(self, state: StateVector, rng: np.random.Generator):
        self.state = state
        self.rng = rng
        self._cache: dict[str, np.ndarray] = {}

    def probabilities(self, bases: str) -> np.ndarray:
        if bases not in self._cache:
            self._cache[bases] = outcome_probabilities(self.state, bases)
        return self._cache[bases]

    def __call__(self, bases: str, shots: int) -> np.ndarray:
        return sample_outcomes(self.probabilities(bases), shots, self.rng)
