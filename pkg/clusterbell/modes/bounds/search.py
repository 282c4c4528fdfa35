"""Exhaustive classical bounds over deterministic strategies.

Each output only needs a truth table over the assignments of its varying
light-cone features that actually occur on inputs where the referee reads
that output; every other table entry is fixed to 0. The product of these
per-output candidate spaces is scored with numpy broadcasting, one axis per
output, so ``np.argmax`` returns the lexicographically first optimum.
"""
from __future__ import annotations

import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from clusterbell.core import config
from clusterbell.core.errors import SearchSpaceError
from clusterbell.core.pauli import CycleGraph
from clusterbell.modes.bounds.strategies import (
    GeometricCircuitStrategy,
    OutputRule,
    cbf_depth1_perfect_strategy,
    evaluate_strategy,
    feature_bits,
    feature_owner,
    features_per_party,
)
from clusterbell.modes.games.referee import GameInstance, GameKind

logger = logging.getLogger(__name__)

# cells of the broadcast score array evaluated at once
CHUNK_CELLS = 1 << 22


@dataclass
class BoundResult:
    game: str
    depth: int
    beta: Fraction
    wins: int
    inputs: int
    witness: GeometricCircuitStrategy
    search_size: int
    seconds: float = 0.0
    method: str = "exhaustive"

    def to_dict(self, timing: bool = True) -> dict:
        data = {
            "game": self.game,
            "depth": self.depth,
            "beta": {"num": self.beta.numerator, "den": self.beta.denominator},
            "wins": self.wins,
            "inputs": self.inputs,
            "method": self.method,
            "search_size": self.search_size,
            "witness": self.witness.to_dict(),
        }
        if timing:
            data["seconds"] = round(self.seconds, 6)
        return data


@dataclass
class _OutputSpace:
    features: tuple[int, ...]
    relevant: tuple[int, ...]
    values: np.ndarray  # (candidates, inputs) uint8

    @property
    def size(self) -> int:
        return self.values.shape[0]

    def rule(self, candidate: int) -> OutputRule:
        table = [0] * (1 << len(self.features))
        for r, key in enumerate(self.relevant):
            table[key] = (candidate >> r) & 1
        return OutputRule(self.features, tuple(table))


@dataclass
class SearchProblem:
    game: GameInstance
    depth: int
    spaces: list[_OutputSpace] = field(default_factory=list)
    constraints: list[list[tuple[int, int]]] = field(default_factory=list)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(s.size for s in self.spaces)

    @property
    def search_size(self) -> int:
        return math.prod(self.shape)

    @property
    def evaluations(self) -> int:
        return self.search_size * len(self.game.inputs)


def build_problem(game: GameInstance, depth: int) -> SearchProblem:
    n, kind = game.n, game.kind
    graph = CycleGraph(n)
    inputs = list(game.inputs)
    fbits = [feature_bits(kind, x) for x in inputs]
    constraints = [game.constraints(x) for x in inputs]
    read = [0] * len(inputs)
    for i, cons in enumerate(constraints):
        for mask, _ in cons:
            read[i] |= mask
    total_features = n * features_per_party(kind)
    spaces = []
    for j in range(n):
        cone = [f for f in range(total_features) if graph.distance(j, feature_owner(kind, f)) <= depth]
        varying = tuple(f for f in cone if len({(fb >> f) & 1 for fb in fbits}) > 1)
        keys = [sum(((fb >> f) & 1) << k for k, f in enumerate(varying)) for fb in fbits]
        relevant = tuple(sorted({key for i, key in enumerate(keys) if read[i] >> j & 1}))
        position = {key: r for r, key in enumerate(relevant)}
        candidates = np.arange(1 << len(relevant), dtype=np.int64)
        values = np.zeros((candidates.size, len(inputs)), dtype=np.uint8)
        for i, key in enumerate(keys):
            if read[i] >> j & 1:
                values[:, i] = (candidates >> position[key]) & 1
        spaces.append(_OutputSpace(varying, relevant, values))
    return SearchProblem(game, depth, spaces, constraints)


def _score_chunk(problem: SearchProblem, start: int, stop: int) -> tuple[int, tuple[int, ...]]:
    shape = (stop - start,) + problem.shape[1:]
    n = len(shape)
    counts = np.zeros(shape, dtype=np.int32)
    for i, cons in enumerate(problem.constraints):
        win: Optional[np.ndarray] = None
        for mask, target in cons:
            par: np.ndarray | int = 0
            for j in range(n):
                if not mask >> j & 1:
                    continue
                column = problem.spaces[j].values[:, i]
                if j == 0:
                    column = column[start:stop]
                view = [1] * n
                view[j] = column.size
                par = np.bitwise_xor(par, column.reshape(view))
            ok = np.asarray(par) == target
            win = ok if win is None else (win & ok)
        if win is None:
            counts += 1
        else:
            counts += np.broadcast_to(win, shape)
    flat = int(np.argmax(counts))
    index = np.unravel_index(flat, shape)
    best = int(counts[index])
    return best, (int(index[0]) + start,) + tuple(int(v) for v in index[1:])


def exhaustive_bound(
    game: GameInstance,
    depth: int,
    workers: int = 1,
    limit: int = config.SEARCH_EVALUATION_LIMIT,
) -> BoundResult:
    """Maximum win rate over every deterministic depth-``depth`` strategy."""
    started = time.perf_counter()
    problem = build_problem(game, depth)
    if problem.evaluations > limit:
        raise SearchSpaceError(problem.evaluations, limit)
    logger.info("Searching %s at depth %d: %s candidates (%d strategies)",
                game.label, depth, "x".join(map(str, problem.shape)), problem.search_size)
    rest = math.prod(problem.shape[1:])
    step = max(1, CHUNK_CELLS // max(1, rest))
    ranges = [(s, min(s + step, problem.shape[0])) for s in range(0, problem.shape[0], step)]
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        results = list(pool.map(lambda r: _score_chunk(problem, *r), ranges))
    best, index = results[0]
    for count, idx in results[1:]:
        if count > best:
            best, index = count, idx
    rules = tuple(space.rule(c) for space, c in zip(problem.spaces, index))
    witness = GeometricCircuitStrategy(game.kind, game.n, depth, rules)
    beta = Fraction(best, len(game.inputs))
    result = BoundResult(game.label, depth, beta, best, len(game.inputs), witness,
                         problem.search_size, time.perf_counter() - started)
    logger.info("%s depth-%d bound: %s", game.label, depth, beta)
    return result


def depth0_bound(game: GameInstance, workers: int = 1, limit: int = config.SEARCH_EVALUATION_LIMIT) -> BoundResult:
    return exhaustive_bound(game, 0, workers, limit)


def depth1_bound(game: GameInstance, workers: int = 1, limit: int = config.SEARCH_EVALUATION_LIMIT) -> BoundResult:
    if game.kind is GameKind.CBF:
        started = time.perf_counter()
        witness = cbf_depth1_perfect_strategy(game.n)
        beta = evaluate_strategy(witness, game)
        wins = int(beta * len(game.inputs))
        logger.info("%s depth-1 bound certified by the cubic-term strategy: %s", game.label, beta)
        return BoundResult(game.label, 1, beta, wins, len(game.inputs), witness, 1,
                           time.perf_counter() - started, method="witness")
    return exhaustive_bound(game, 1, workers, limit)
