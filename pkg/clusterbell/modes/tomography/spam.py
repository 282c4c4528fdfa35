"""Readout (SPAM) correction of tomography data."""
from __future__ import annotations

import logging

import numpy as np

from clusterbell.core.readout import ConfusionModel
from clusterbell.modes.tomography.estimation import EstimationReport, ShotDataset, estimate_expectations
from clusterbell.modes.tomography.plan import MeasurementPlan

logger = logging.getLogger(__name__)


def corrected_distributions(dataset: ShotDataset, confusion: ConfusionModel) -> list[np.ndarray]:
    """q = M^-1 p per clique; entries outside [0, 1] are kept."""
    out = []
    for tally in dataset.cliques:
        counts = np.zeros(1 << dataset.n)
        outcomes, weights = tally.arrays()
        counts[outcomes] = weights
        q = confusion.corrected_distribution(counts)
        if np.any(q < 0):
            logger.debug("Quasi-probabilities below zero in basis %s", tally.basis)
        out.append(q)
    return out


def spam_correct(plan: MeasurementPlan, dataset: ShotDataset, confusion: ConfusionModel) -> EstimationReport:
    """Estimates with every per-shot parity replaced by its M^-1 weighted value."""
    if confusion.n != plan.n:
        raise ValueError(f"confusion model for {confusion.n} qubits, plan has {plan.n}")
    return estimate_expectations(plan, dataset, confusion)
