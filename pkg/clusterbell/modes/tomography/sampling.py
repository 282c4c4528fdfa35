"""Randomized direct fidelity estimation for stabilizer states."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from clusterbell.core.pauli import BinaryVector, cycle_stabilizer
from clusterbell.core.simulator import Sampler, parities

logger = logging.getLogger(__name__)


def sampling_budget(epsilon: float, delta: float) -> int:
    """ceil(8 ln(4/delta) / epsilon^2) shots."""
    if not 0 < epsilon <= 1:
        raise ValueError(f"epsilon must lie in (0, 1], got {epsilon}")
    if not 0 < delta < 1:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    # round first so exact integers are not pushed up by float noise
    return math.ceil(round(8 * math.log(4 / delta) / epsilon ** 2, 9))


@dataclass(frozen=True)
class RandomizedFidelity:
    fidelity: float
    stderr: float
    samples: int
    settings: int


def randomized_fidelity_estimate(n: int, sampler: Sampler, epsilon: float, delta: float,
                                 rng: np.random.Generator) -> RandomizedFidelity:
    """One uniformly random stabilizer per shot, measured once."""
    samples = sampling_budget(epsilon, delta)
    picks = rng.integers(0, 1 << n, size=samples)
    xs, counts = np.unique(picks, return_counts=True)
    values = []
    for bits, count in zip(xs, counts):
        count = int(count)
        if bits == 0:
            values.append(np.ones(count))
            continue
        s = cycle_stabilizer(n, BinaryVector(n, int(bits)))
        bases = "".join(ch if ch != "I" else "Z" for ch in s.letters())
        outcomes = sampler(bases, count)
        values.append(s.sign * (1.0 - 2.0 * parities(outcomes, s.support_mask, n)))
    v = np.concatenate(values)
    result = RandomizedFidelity(float(v.mean()), float(v.std() / math.sqrt(v.size)), samples, len(xs))
    logger.debug("Randomized fidelity %.4f from %d samples over %d settings", result.fidelity, samples, len(xs))
    return result
