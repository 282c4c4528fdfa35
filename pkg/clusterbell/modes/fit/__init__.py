"""Noise-model fitting by grid search."""
from .grid_fit import FitGrid, FitPoint, FitResult, delta_fidelity, delta_stabilizers, grid_fit

__all__ = ["FitGrid", "FitPoint", "FitResult", "delta_fidelity", "delta_stabilizers", "grid_fit"]
