from fractions import Fraction

import pytest

from clusterbell.core.errors import CoverageError
from clusterbell.core.pauli import BinaryVector
from clusterbell.modes.games import GameInstance, bell_operator_terms, bell_success_probability
from clusterbell.modes.games.bell import (
    constraint_paulis,
    deterministic_expectation,
    quantum_expectation,
    table_expectation,
)


class TestBellExpansion:
    def test_hlf8_coefficients(self):
        terms = bell_operator_terms(GameInstance.build("ss", "hlf8"))
        assert terms["IIIIII"] == Fraction(12, 32)
        assert terms["IXIXIX"] == Fraction(12, 32)
        assert terms["XIXIXI"] == Fraction(1, 32)
        assert terms["XXXXXX"] == Fraction(1, 32)
        negatives = sorted(v for v in terms.values() if v < 0)
        assert negatives == [Fraction(-1, 32)] * 6

    def test_perfect_correlations_give_one(self):
        game = GameInstance.build("ss", "hlf8")
        assert bell_success_probability(game, lambda pauli, x: 1 if pauli.weight == 0 else _sign(game, pauli, x)) == 1

    def test_identity_listed_first(self):
        game = GameInstance.build("cbf", "full")
        paulis = constraint_paulis(game, BinaryVector.from_string("111100"))
        assert paulis[0][0].weight == 0
        assert paulis[1][0].letters() == "YXXYZZ"


def _sign(game, pauli, x):
    for p, s in constraint_paulis(game, x):
        if p == pauli:
            return s
    raise KeyError(pauli)


class TestAgainstReferee:
    """Bell form equals direct enumeration for deterministic answers."""

    @pytest.mark.slow
    @pytest.mark.parametrize("kind,inputs,count", [("ss", "hlf8", 10_000), ("ss", "hlf5", 2000), ("cbf", "mermin55", 500)])
    def test_random_strategies(self, kind, inputs, count, rng):
        game = GameInstance.build(kind, inputs)
        for _ in range(count):
            outputs = {x: BinaryVector(6, int(rng.integers(64))) for x in game.inputs}
            direct = Fraction(sum(game.referee(x, outputs[x]) for x in game.inputs), len(game.inputs))
            assert bell_success_probability(game, deterministic_expectation(outputs)) == direct

    def test_quantum_state_wins(self, c6_state):
        for kind, inputs in (("cbf", "full"), ("ss", "hlf5")):
            game = GameInstance.build(kind, inputs)
            assert bell_success_probability(game, quantum_expectation(c6_state)) == pytest.approx(1.0)


class TestTableExpectation:
    def test_missing_entries(self):
        game = GameInstance.build("ss", "hlf5")
        with pytest.raises(CoverageError):
            bell_success_probability(game, table_expectation({}))

    def test_exact_fractions(self):
        game = GameInstance.build("ss", "hlf8")
        values = {p.letters(): Fraction(1, 2) for x in game.inputs for p, _ in constraint_paulis(game, x)}
        assert isinstance(bell_success_probability(game, table_expectation(values)), Fraction)
