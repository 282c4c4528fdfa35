import math

import numpy as np
import pytest

from clusterbell.core.circuit import (
    Circuit,
    GateOp,
    cz,
    edge_layers,
    fuse_tails,
    measurement_circuit,
    merge_rotations,
    preparation_circuit,
    rxx,
    rxy,
    rz,
)
from clusterbell.core.errors import DimensionError
from clusterbell.core.pauli import CycleGraph, nontrivial_stabilizers
from clusterbell.core.simulator import StateVector, apply_circuit, pauli_expectation


def unitary(circuit: Circuit) -> np.ndarray:
    dim = 1 << circuit.n
    columns = []
    for k in range(dim):
        amps = np.zeros(dim, dtype=complex)
        amps[k] = 1.0
        columns.append(apply_circuit(StateVector(circuit.n, amps), circuit).amplitudes)
    return np.array(columns).T


def equal_up_to_phase(a: np.ndarray, b: np.ndarray) -> bool:
    k = np.argmax(np.abs(b))
    phase = a.flat[k] / b.flat[k]
    return abs(abs(phase) - 1) < 1e-9 and np.allclose(a, phase * b, atol=1e-9)


class TestGates:
    def test_cz_flips_11(self):
        state = StateVector(2, np.array([0, 0, 0, 1], dtype=complex))
        out = apply_circuit(state, Circuit.from_gates(2, [cz(0, 1)]))
        np.testing.assert_allclose(out.amplitudes, [0, 0, 0, -1])

    def test_rxx_angles_add(self):
        twice = Circuit.from_gates(2, [rxx(0, 1, math.pi / 4), rxx(0, 1, math.pi / 4)])
        once = Circuit.from_gates(2, [rxx(0, 1, math.pi / 2)])
        np.testing.assert_allclose(unitary(twice), unitary(once), atol=1e-12)

    def test_rz_is_virtual(self):
        assert rz(0, 1.0).is_virtual
        assert rz(0, 1.0).duration(10e-6, 350e-6) == 0.0
        assert rxy(0, 0.0, 1.0).duration(10e-6, 350e-6) == 10e-6

    def test_bad_gates(self):
        with pytest.raises(ValueError):
            GateOp("RXX", (1, 1), theta=0.1)
        with pytest.raises(ValueError):
            GateOp("BASIS_ROT", (0,), basis="W")
        with pytest.raises(ValueError):
            GateOp("RZ", (0,), theta=math.nan)

    def test_layer_conflict(self):
        with pytest.raises(ValueError):
            Circuit(2, ((rz(0, 1.0), rxx(0, 1, 0.3)),))
        with pytest.raises(DimensionError):
            Circuit(2, ((rz(3, 1.0),),))

    def test_json(self):
        circuit = preparation_circuit(CycleGraph(4))
        assert Circuit.from_json(4, circuit.to_json()) == circuit


class TestEdgeLayers:
    def test_even_cycle_two_layers(self):
        assert edge_layers(CycleGraph(6)) == [[(0, 1), (2, 3), (4, 5)], [(1, 2), (3, 4), (5, 0)]]

    def test_odd_cycle_three_layers(self):
        layers = edge_layers(CycleGraph(5))
        assert len(layers) == 3
        assert sorted(e for layer in layers for e in layer) == sorted(CycleGraph(5).edges())


class TestPreparation:
    @pytest.mark.parametrize("form", ["CZ", "RXX"])
    @pytest.mark.parametrize("n", [3, 4, 5, 6])
    def test_stabilizers_are_plus_one(self, n, form):
        state = apply_circuit(StateVector.zero(n), preparation_circuit(CycleGraph(n), form))
        for _, s in nontrivial_stabilizers(n):
            assert pauli_expectation(state, s) == pytest.approx(1.0, abs=1e-9)

    def test_forms_agree(self):
        graph = CycleGraph(6)
        a = apply_circuit(StateVector.zero(6), preparation_circuit(graph, "CZ"))
        b = apply_circuit(StateVector.zero(6), preparation_circuit(graph, "RXX"))
        assert a.fidelity(b) == pytest.approx(1.0, abs=1e-9)

    def test_rxx_form_gate_counts(self):
        circuit = preparation_circuit(CycleGraph(6), "RXX")
        assert circuit.count("RXX") == 6
        assert circuit.count("CZ") == 0

    def test_unknown_form(self):
        with pytest.raises(ValueError):
            preparation_circuit(CycleGraph(6), "MS")


class TestCompilation:
    def test_merge_cancels_inverse_pair(self):
        gates = [rxy(0, 0.3, 0.7), rxy(0, 0.3, -0.7)]
        assert merge_rotations(1, gates) == []

    def test_merge_keeps_unitary(self, rng):
        gates = []
        for _ in range(20):
            q = int(rng.integers(3))
            kind = rng.integers(3)
            if kind == 0:
                gates.append(rz(q, float(rng.normal())))
            elif kind == 1:
                gates.append(rxy(q, float(rng.choice([0.0, math.pi / 2, math.pi])), float(rng.normal())))
            else:
                gates.append(rxx(q, (q + 1) % 3, float(rng.normal())))
        before = unitary(Circuit.from_gates(3, gates))
        after = unitary(Circuit.from_gates(3, merge_rotations(3, gates)))
        assert equal_up_to_phase(after, before)

    @pytest.mark.parametrize("bases", ["XXXXXX", "YXYXYX", "ZZXZZX", "XYZXYZ"])
    def test_fusion_preserves_statistics(self, bases):
        prep = preparation_circuit(CycleGraph(6))
        fused = apply_circuit(StateVector.zero(6), measurement_circuit(prep, bases, fuse=True))
        plain = apply_circuit(StateVector.zero(6), measurement_circuit(prep, bases, fuse=False))
        np.testing.assert_allclose(fused.probabilities(), plain.probabilities(), atol=1e-9)

    def test_fused_tail_is_one_rotation_per_qubit(self):
        prep = preparation_circuit(CycleGraph(6))
        gates = measurement_circuit(prep, "XYZXYZ").gates()
        for q in range(6):
            mine = [g for g in gates if q in g.targets]
            last = max(i for i, g in enumerate(mine) if g.is_two_qubit)
            tail = mine[last + 1:]
            assert len(tail) <= 1
            assert all(g.kind == "RXY" for g in tail)

    def test_fuse_tails_drops_diagonal_tail(self):
        gates = [rxx(0, 1, math.pi / 4), rz(0, 0.4), rz(1, -1.2)]
        out = fuse_tails(2, gates)
        assert [g.kind for g in out] == ["RXX"]

    def test_basis_pattern_length(self):
        with pytest.raises(DimensionError):
            measurement_circuit(preparation_circuit(CycleGraph(6)), "XXX")
