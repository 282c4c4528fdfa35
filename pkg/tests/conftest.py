"""Shared fixtures."""
import numpy as np
import pytest

from clusterbell.core.circuit import preparation_circuit
from clusterbell.core.pauli import CycleGraph, StabilizerGroup, generators
from clusterbell.core.simulator import StateVector, apply_circuit


@pytest.fixture(scope="session")
def c6_group() -> StabilizerGroup:
    return generators(CycleGraph(6))


@pytest.fixture(scope="session")
def c6_state() -> StateVector:
    return apply_circuit(StateVector.zero(6), preparation_circuit(CycleGraph(6), "RXX"))


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)
