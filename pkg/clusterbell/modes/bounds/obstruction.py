"""F2 parity obstruction for depth-D answers to the five-input SS game.

On the five inputs only three positions vary, so any depth-D output is a
polynomial over F2 in the free bits it can see. Each win constraint is then
linear in the polynomial coefficients. An inconsistent system means no
depth-D strategy wins all five inputs.
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from clusterbell.core import gf2
from clusterbell.core.errors import UnsupportedInputSetError
from clusterbell.core.pauli import CycleGraph
from clusterbell.modes.bounds.strategies import (
    AffineStrategyParams,
    GeometricCircuitStrategy,
    evaluate_strategy,
    strategy_from_params,
)
from clusterbell.modes.games.inputs import InputKind, build_input_set, hlf_positions
from clusterbell.modes.games.referee import GameInstance, GameKind

logger = logging.getLogger(__name__)


@dataclass
class ObstructionResult:
    n: int
    depth: int
    inconsistent: bool
    rank: int
    augmented_rank: int
    variables: int
    equations: int
    params: list[AffineStrategyParams] = field(default_factory=list)
    counterexample: Optional[GeometricCircuitStrategy] = None

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "depth": self.depth,
            "inconsistent": self.inconsistent,
            "rank": self.rank,
            "augmented_rank": self.augmented_rank,
            "variables": self.variables,
            "equations": self.equations,
            "counterexample": None if self.counterexample is None else self.counterexample.to_dict(),
        }


def _monomials(positions: tuple[int, ...]) -> list[tuple[int, ...]]:
    out: list[tuple[int, ...]] = []
    for size in range(len(positions) + 1):
        out.extend(itertools.combinations(positions, size))
    return out


def parity_obstruction_check(n: int, depth: int) -> ObstructionResult:
    if depth < 1 or depth % 2 == 0 or n != 6 * depth:
        raise UnsupportedInputSetError(f"need n = 6D with D odd, got n = {n}, D = {depth}")
    game = GameInstance(GameKind.SS, build_input_set(InputKind.HLFN5, n))
    graph = CycleGraph(n)
    free = hlf_positions(n)

    reads: list[tuple[int, ...]] = []
    variables: dict[tuple[int, tuple[int, ...]], int] = {}
    for j in range(n):
        seen = tuple(p for p in free if graph.distance(j, p) <= depth)
        reads.append(seen)
        for mono in _monomials(seen):
            variables[(j, mono)] = len(variables)

    rows, rhs = [], []
    for x in game.inputs:
        for mask, target in game.constraints(x):
            row = np.zeros(len(variables), dtype=np.uint8)
            for j in range(n):
                if not mask >> j & 1:
                    continue
                for mono in _monomials(reads[j]):
                    if all(x[p] for p in mono):
                        row[variables[(j, mono)]] ^= 1
            rows.append(row)
            rhs.append(target)

    solution = gf2.solve(np.array(rows), rhs)
    result = ObstructionResult(
        n, depth, not solution.consistent, solution.rank, solution.augmented_rank,
        len(variables), len(rows),
    )
    if solution.consistent:
        coeff = {key: int(solution.solution[index]) for key, index in variables.items()}
        params = []
        for j, seen in enumerate(reads):
            values = [coeff[(j, mono)] for mono in _monomials(seen)]
            values += [0] * (4 - len(values))
            params.append(AffineStrategyParams(j, seen, *values))
        result.params = params
        result.counterexample = strategy_from_params(n, depth, params)
        logger.warning("Parity system for n=%d, D=%d is consistent; win rate %s",
                       n, depth, evaluate_strategy(result.counterexample, game))
    else:
        logger.info("Parity system for n=%d, D=%d is inconsistent (rank %d < %d)",
                    n, depth, solution.rank, solution.augmented_rank)
    return result
