"""Config values."""
import os
from pathlib import Path

PACKAGE_ROOT = Path(__file__).parent.parent
RESOURCES_DIR = PACKAGE_ROOT / "resources"
# 63 signed C6 stabilizers, 37 measurement groups, raw and SPAM-corrected values
STABILIZER_TABLE = RESOURCES_DIR / "c6_stabilizer_table.csv"

# Default graph
DEFAULT_QUBITS = 6

# Trapped-ion timing and noise defaults (seconds / probabilities)
DEFAULT_T2 = 0.2
SINGLE_QUBIT_GATE_TIME = 10e-6
TWO_QUBIT_GATE_TIME = 350e-6
CROSSTALK_RATE = 6e-4
# Omega_c / Omega_R measured at 3%; pc is its square to first order
CROSSTALK_RABI_RATIO = 0.03

# Best-fit device model (p1d, p2XX, p2d)
FITTED_P1D = 0.012
FITTED_P2XX = 0.035
FITTED_P2D = 0.035

# Shots
DEFAULT_SHOTS = 5000
FIT_MIN_SHOTS = 10_000

# Noise fit grid: (start, stop, pitch) per axis
FIT_GRID_P1D = (0.0, 0.03, 0.004)
FIT_GRID_P2XX = (0.0, 0.06, 0.005)
FIT_GRID_P2D = (0.0, 0.06, 0.005)
FIT_DELTA_F_TOLERANCE = 0.005

# Exhaustive search guard (strategy-input evaluations)
SEARCH_EVALUATION_LIMIT = 10**9

# Numerics
NORM_TOLERANCE = 1e-10
EQUIVALENCE_TOLERANCE = 1e-9
ANGLE_EPSILON = 1e-12

# Setting count of the stored C6 partition; a greedy cover that differs is only logged
REFERENCE_CLIQUE_COUNT = 37

# Workers
WORKERS_ENV_VAR = "CLUSTERBELL_WORKERS"


def default_workers() -> int:
    raw = os.environ.get(WORKERS_ENV_VAR, "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


# CLI exit codes
EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG_ERROR = 2
EXIT_COMPUTE_REFUSAL = 3
EXIT_IO_ERROR = 4
