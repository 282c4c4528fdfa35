"""Stabilizer tomography: measurement plans, estimators and readout correction."""
from .estimation import (
    EstimationReport,
    FidelityWitness,
    ShotDataset,
    covariances,
    estimate_expectations,
    fidelity_and_witness,
    format_uncertainty,
    load_reference_report,
)
from .pipeline import TomographyRun, run_tomography, simulate_dataset
from .plan import MeasurementPlan, greedy_clique_cover, reference_plan
from .sampling import randomized_fidelity_estimate, sampling_budget
from .spam import spam_correct

__all__ = [
    "EstimationReport",
    "FidelityWitness",
    "MeasurementPlan",
    "ShotDataset",
    "TomographyRun",
    "covariances",
    "estimate_expectations",
    "fidelity_and_witness",
    "format_uncertainty",
    "greedy_clique_cover",
    "load_reference_report",
    "randomized_fidelity_estimate",
    "reference_plan",
    "run_tomography",
    "sampling_budget",
    "simulate_dataset",
    "spam_correct",
]
