"""Bell-operator form of the game success probability.

Pr[win] = (1/|I|) sum_x (1/|P_x|) sum_{P in P_x} sgn(P) <P>, where P_x is the
group of constraint Paulis of input x (identity included).
"""
from __future__ import annotations

import logging
from collections.abc import Callable, Mapping
from fractions import Fraction
from typing import Union

from clusterbell.core.errors import CoverageError
from clusterbell.core.pauli import BinaryVector, PauliOperator, parity
from clusterbell.core.simulator import StateVector, pauli_expectation
from clusterbell.modes.games.referee import GameInstance, GameKind, ss_submeasurements

logger = logging.getLogger(__name__)

Number = Union[Fraction, float, int]
ExpectationFn = Callable[[PauliOperator, BinaryVector], Number]


def constraint_paulis(game: GameInstance, x: BinaryVector) -> list[tuple[PauliOperator, int]]:
    """(unsigned Pauli, sign) for every element of P_x, identity first."""
    identity = PauliOperator.identity(game.n)
    if game.kind is GameKind.SS:
        return [(s.pauli, s.sign) for s in ss_submeasurements(x)]
    stabilizer = game.stabilizer(x)
    if x.bits == 0:
        return [(identity, 1)]
    return [(identity, 1), (stabilizer.unsigned(), stabilizer.sign)]


def bell_success_probability(game: GameInstance, expectation_fn: ExpectationFn) -> Number:
    """Exact when ``expectation_fn`` returns Fractions or ints."""
    total: Number = Fraction(0)
    missing = []
    for x in game.inputs:
        terms = constraint_paulis(game, x)
        weight = Fraction(1, len(game.inputs) * len(terms))
        for pauli, sign in terms:
            try:
                value = expectation_fn(pauli, x)
            except KeyError:
                missing.append(str(pauli))
                continue
            total += weight * sign * value
    if missing:
        raise CoverageError(missing)
    return total


def bell_operator_terms(game: GameInstance) -> dict[str, Fraction]:
    """Coefficient of every unsigned Pauli string in the expansion."""
    terms: dict[str, Fraction] = {}
    for x in game.inputs:
        paulis = constraint_paulis(game, x)
        weight = Fraction(1, len(game.inputs) * len(paulis))
        for pauli, sign in paulis:
            key = pauli.letters()
            terms[key] = terms.get(key, Fraction(0)) + sign * weight
    return {k: v for k, v in terms.items() if v != 0}


def quantum_expectation(state: StateVector) -> ExpectationFn:
    cache: dict[PauliOperator, float] = {}

    def fn(pauli: PauliOperator, x: BinaryVector) -> float:
        if pauli not in cache:
            cache[pauli] = pauli_expectation(state, pauli)
        return cache[pauli]

    return fn


def deterministic_expectation(outputs: Mapping[BinaryVector, BinaryVector]) -> ExpectationFn:
    """<P> of a deterministic classical answer: (-1)^(parity of y on supp P)."""

    def fn(pauli: PauliOperator, x: BinaryVector) -> int:
        y = outputs[x]
        return 1 - 2 * parity(pauli.support_mask, y.bits)

    return fn


def table_expectation(values: Mapping[str, Number]) -> ExpectationFn:
    """Expectations keyed by unsigned Pauli letters, e.g. from a tomography report."""

    def fn(pauli: PauliOperator, x: BinaryVector) -> Number:
        if pauli.weight == 0:
            return 1
        return values[pauli.letters()]

    return fn
