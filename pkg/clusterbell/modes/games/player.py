"""Quantum strategy player: prepare the cycle state, measure, referee every shot."""
from __future__ import annotations

import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Iterator, Optional

import numpy as np
import pandas as pd

from clusterbell.core.circuit import preparation_circuit
from clusterbell.core.noise import READOUT_STREAM, SHOT_STREAM, NoiseParams, TrajectoryRng, noisy_shots
from clusterbell.core.pauli import BinaryVector, bitstring
from clusterbell.core.readout import ConfusionModel
from clusterbell.core.simulator import StateVector, apply_circuit, measure_and_sample, parities
from clusterbell.modes.games.referee import Constraint, GameInstance, GameKind

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RoundRecord:
    x: str
    y: str
    won: bool
    strategy: str
    seed: int
    stream: tuple[int, ...] = ()

    def to_json(self) -> str:
        data = asdict(self)
        data["stream"] = list(self.stream)
        return json.dumps(data, sort_keys=True)


@dataclass(frozen=True)
class InputRate:
    input: str
    rate: float
    stderr: float
    shots: int


@dataclass
class SuccessEstimate:
    """mean win rate over a uniform input distribution, with per-input rows."""

    p_hat: float
    stderr: float
    per_input: list[InputRate] = field(default_factory=list)
    corrected: bool = False

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([asdict(r) for r in self.per_input], columns=["input", "rate", "stderr", "shots"])

    def to_dict(self) -> dict:
        return {
            "p_hat": self.p_hat,
            "stderr": self.stderr,
            "corrected": self.corrected,
            "per_input": [asdict(r) for r in self.per_input],
        }


def win_values(constraints: list[Constraint], outcomes: np.ndarray, n: int,
               confusion: Optional[ConfusionModel] = None) -> np.ndarray:
    """Per-shot win indicator written as a character sum over the constraint group.

    The constraints of one input together with the identity form a group
    under XOR of masks, so the indicator equals the mean of the signed
    parities. With a confusion model each parity is replaced by its
    readout-corrected value, which keeps the estimate unbiased.
    """
    total = np.ones(outcomes.shape, dtype=float)
    for mask, target in constraints:
        if confusion is None:
            values = 1.0 - 2.0 * parities(outcomes, mask, n)
        else:
            values = confusion.parity_values(outcomes, mask)
        total += values if target == 0 else -values
    return total / (len(constraints) + 1)


def aggregate(rows: list[InputRate], corrected: bool = False) -> SuccessEstimate:
    p_hat = float(np.mean([r.rate for r in rows]))
    stderr = math.sqrt(sum(r.stderr ** 2 for r in rows)) / len(rows)
    return SuccessEstimate(p_hat, stderr, rows, corrected)


@dataclass
class PlayResult:
    game: GameInstance
    strategy: str
    seed: int
    outcomes: dict[str, np.ndarray]

    def wins(self, label: str) -> np.ndarray:
        x = BinaryVector.from_string(label)
        values = win_values(self.game.constraints(x), self.outcomes[label], self.game.n)
        return values > 0.5

    def estimate(self, confusion: Optional[ConfusionModel] = None) -> SuccessEstimate:
        """Raw win rates, or readout-corrected ones when ``confusion`` is given."""
        rows = []
        for label, outcomes in self.outcomes.items():
            x = BinaryVector.from_string(label)
            values = win_values(self.game.constraints(x), outcomes, self.game.n, confusion)
            if confusion is None:
                values = np.round(values)
            rows.append(InputRate(label, float(values.mean()), float(values.std() / math.sqrt(values.size)), int(values.size)))
        return aggregate(rows, corrected=confusion is not None)

    @property
    def losses(self) -> int:
        return int(sum((~self.wins(label)).sum() for label in self.outcomes))

    def rounds(self) -> Iterator[RoundRecord]:
        n = self.game.n
        for i, (label, outcomes) in enumerate(self.outcomes.items()):
            won = self.wins(label)
            for k, (y, w) in enumerate(zip(outcomes, won)):
                yield RoundRecord(label, bitstring(int(y), n), bool(w), self.strategy, self.seed, (SHOT_STREAM, i, k))


def _strategy_tag(game: GameInstance) -> str:
    return "quantum-cbf" if game.kind is GameKind.CBF else "quantum-ss"


def play_quantum(
    game: GameInstance,
    noise: Optional[NoiseParams],
    shots_per_input: int,
    rng: TrajectoryRng,
    form: str = "RXX",
    readout: Optional[ConfusionModel] = None,
    workers: int = 1,
) -> PlayResult:
    """Play every input ``shots_per_input`` times with the perfect quantum strategy."""
    if shots_per_input < 1:
        raise ValueError(f"shots per input must be positive, got {shots_per_input}")
    prep = preparation_circuit(game.graph, form)
    ideal = noise is None or noise.is_noiseless
    state = apply_circuit(StateVector.zero(game.n), prep) if ideal else None

    def run(index: int, x: BinaryVector) -> np.ndarray:
        bases = game.measurement_bases(x)
        stream = rng.child(SHOT_STREAM, index)
        if ideal:
            outcomes = measure_and_sample(state, bases, shots_per_input, stream)
        else:
            outcomes = noisy_shots(prep, noise, bases, shots_per_input, stream)
        if readout is not None:
            outcomes = readout.apply(outcomes, rng.child(READOUT_STREAM, index).generator())
        logger.debug("Played input %s in basis %s", x, bases)
        return outcomes

    inputs = list(game.inputs)
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        results = list(pool.map(run, range(len(inputs)), inputs))
    outcomes = {str(x): out for x, out in zip(inputs, results)}
    result = PlayResult(game, _strategy_tag(game), rng.seed, outcomes)
    logger.info("Played %s: %d inputs x %d shots", game.label, len(inputs), shots_per_input)
    return result


def cbf_success_from_fidelity(fidelity: float) -> float:
    return (fidelity + 1.0) / 2.0


def fidelity_from_cbf_success(success: float) -> float:
    return 2.0 * success - 1.0
