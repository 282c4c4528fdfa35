"""Classical bounds: exhaustive search, perfect strategies and the parity obstruction."""
from .obstruction import ObstructionResult, parity_obstruction_check
from .search import BoundResult, depth0_bound, depth1_bound, exhaustive_bound
from .strategies import (
    AffineStrategyParams,
    GeometricCircuitStrategy,
    LocalStrategy,
    OutputRule,
    cbf_depth1_perfect_strategy,
    evaluate_strategy,
    ss_depth_plus_one_perfect_strategy,
)

__all__ = [
    "AffineStrategyParams",
    "BoundResult",
    "GeometricCircuitStrategy",
    "LocalStrategy",
    "ObstructionResult",
    "OutputRule",
    "cbf_depth1_perfect_strategy",
    "depth0_bound",
    "depth1_bound",
    "evaluate_strategy",
    "exhaustive_bound",
    "parity_obstruction_check",
    "ss_depth_plus_one_perfect_strategy",
]
