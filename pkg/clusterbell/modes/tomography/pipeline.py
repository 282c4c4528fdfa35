"""Synthetic tomography runs: simulate every measurement setting, then estimate."""
from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from clusterbell.core.circuit import preparation_circuit
from clusterbell.core.noise import READOUT_STREAM, SHOT_STREAM, NoiseParams, TrajectoryRng, noisy_shots
from clusterbell.core.pauli import CycleGraph
from clusterbell.core.readout import ConfusionModel
from clusterbell.core.simulator import StateVector, apply_circuit, measure_and_sample
from clusterbell.modes.tomography.estimation import (
    EstimationReport,
    FidelityWitness,
    ShotDataset,
    estimate_expectations,
    fidelity_and_witness,
)
from clusterbell.modes.tomography.plan import MeasurementPlan, greedy_clique_cover
from clusterbell.modes.tomography.spam import spam_correct

logger = logging.getLogger(__name__)


def simulate_dataset(
    plan: MeasurementPlan,
    noise: Optional[NoiseParams],
    shots: int,
    rng: TrajectoryRng,
    form: str = "RXX",
    readout: Optional[ConfusionModel] = None,
    workers: int = 1,
) -> ShotDataset:
    """Shots for every clique of ``plan`` on the prepared cycle state."""
    prep = preparation_circuit(CycleGraph(plan.n), form)
    ideal = noise is None or noise.is_noiseless
    state = apply_circuit(StateVector.zero(plan.n), prep) if ideal else None

    def run(index: int) -> np.ndarray:
        basis = plan.cliques[index].basis
        stream = rng.child(SHOT_STREAM, index)
        if ideal:
            outcomes = measure_and_sample(state, basis, shots, stream)
        else:
            outcomes = noisy_shots(prep, noise, basis, shots, stream)
        if readout is not None:
            outcomes = readout.apply(outcomes, rng.child(READOUT_STREAM, index).generator())
        logger.debug("Setting %d (%s): %d shots", index, basis, shots)
        return outcomes

    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        outcomes = list(pool.map(run, range(len(plan.cliques))))
    return ShotDataset.from_outcomes(plan, outcomes)


@dataclass
class TomographyRun:
    plan: MeasurementPlan
    dataset: ShotDataset
    raw: EstimationReport
    raw_fidelity: FidelityWitness
    corrected: Optional[EstimationReport] = None
    corrected_fidelity: Optional[FidelityWitness] = None

    @property
    def best(self) -> EstimationReport:
        return self.corrected if self.corrected is not None else self.raw


def run_tomography(
    noise: Optional[NoiseParams],
    shots: int,
    rng: TrajectoryRng,
    plan: Optional[MeasurementPlan] = None,
    form: str = "RXX",
    readout: Optional[ConfusionModel] = None,
    workers: int = 1,
    n: int = 6,
) -> TomographyRun:
    """Simulate, estimate, and correct with the injected readout model when there is one."""
    plan = plan if plan is not None else greedy_clique_cover(n=n)
    dataset = simulate_dataset(plan, noise, shots, rng, form, readout, workers)
    raw = estimate_expectations(plan, dataset)
    run = TomographyRun(plan, dataset, raw, fidelity_and_witness(raw))
    if readout is not None:
        run.corrected = spam_correct(plan, dataset, readout)
        run.corrected_fidelity = fidelity_and_witness(run.corrected)
    return run
