"""Grid-search noise characterization against a reference stabilizer report.

Stage one keeps the grid points whose simulated fidelity matches the
reference (|dF| within tolerance); stage two picks the one with the smallest
mean absolute stabilizer difference dS.
"""
from __future__ import annotations

import itertools
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
import pandas as pd

from clusterbell.core import config
from clusterbell.core.errors import ConfigError, CoverageError
from clusterbell.core.noise import NoiseParams, TrajectoryRng
from clusterbell.modes.tomography.estimation import EstimationReport
from clusterbell.modes.tomography.pipeline import run_tomography
from clusterbell.modes.tomography.plan import MeasurementPlan, greedy_clique_cover

logger = logging.getLogger(__name__)


def axis(start: float, stop: float, pitch: float) -> tuple[float, ...]:
    """Inclusive grid axis rounded to 1e-6."""
    if pitch <= 0:
        raise ConfigError(f"grid pitch must be positive, got {pitch}")
    values = np.arange(start, stop + pitch / 2, pitch)
    return tuple(float(v) for v in np.round(values, 6))


@dataclass(frozen=True)
class FitGrid:
    p1d: tuple[float, ...]
    p2XX: tuple[float, ...]
    p2d: tuple[float, ...]
    shots: int = config.FIT_MIN_SHOTS
    base: NoiseParams = field(default_factory=NoiseParams.device)
    tolerance: float = config.FIT_DELTA_F_TOLERANCE

    def __post_init__(self) -> None:
        for name in ("p1d", "p2XX", "p2d"):
            values = tuple(float(v) for v in getattr(self, name))
            if not values:
                raise ConfigError(f"grid axis {name} is empty")
            if any(b <= a for a, b in zip(values, values[1:])):
                raise ConfigError(f"grid axis {name} must be strictly increasing")
            object.__setattr__(self, name, values)
        if self.shots < config.FIT_MIN_SHOTS:
            raise ConfigError(f"fit needs at least {config.FIT_MIN_SHOTS} shots per setting, got {self.shots}")

    @classmethod
    def default(cls, **overrides) -> "FitGrid":
        return cls(axis(*config.FIT_GRID_P1D), axis(*config.FIT_GRID_P2XX), axis(*config.FIT_GRID_P2D), **overrides)

    def points(self) -> list[tuple[float, float, float]]:
        return list(itertools.product(self.p1d, self.p2XX, self.p2d))

    def __len__(self) -> int:
        return len(self.p1d) * len(self.p2XX) * len(self.p2d)

    def to_dict(self) -> dict:
        return {
            "p1d": list(self.p1d),
            "p2XX": list(self.p2XX),
            "p2d": list(self.p2d),
            "shots": self.shots,
            "base": self.base.to_dict(),
            "tolerance": self.tolerance,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "FitGrid":
        base = NoiseParams.from_dict(data["base"]) if "base" in data else NoiseParams.device()
        return cls(
            tuple(data["p1d"]), tuple(data["p2XX"]), tuple(data["p2d"]),
            int(data.get("shots", config.FIT_MIN_SHOTS)), base,
            float(data.get("tolerance", config.FIT_DELTA_F_TOLERANCE)),
        )


def _paired(exp_report: EstimationReport, sim_report: EstimationReport) -> np.ndarray:
    exp_labels, sim_labels = set(exp_report.estimates), set(sim_report.estimates)
    if exp_labels != sim_labels:
        raise CoverageError(exp_labels ^ sim_labels)
    labels = sorted(exp_labels)
    return np.array([exp_report.value(k) - sim_report.value(k) for k in labels])


def delta_fidelity(exp_report: EstimationReport, sim_report: EstimationReport) -> float:
    """|sum_S (<S>_exp - <S>_sim)| / 2^n, identity contributing zero."""
    return float(abs(_paired(exp_report, sim_report).sum()) / (1 << exp_report.n))


def delta_stabilizers(exp_report: EstimationReport, sim_report: EstimationReport) -> float:
    """sum_S |<S>_exp - <S>_sim| / 2^n."""
    return float(np.abs(_paired(exp_report, sim_report)).sum() / (1 << exp_report.n))


@dataclass(frozen=True)
class FitPoint:
    p1d: float
    p2XX: float
    p2d: float
    delta_f: float
    delta_s: float
    fidelity: float

    @property
    def rates(self) -> tuple[float, float, float]:
        return (self.p1d, self.p2XX, self.p2d)


@dataclass
class FitResult:
    points: list[FitPoint]
    level_set: list[int]
    best: FitPoint
    used_fallback: bool = False
    tolerance: float = config.FIT_DELTA_F_TOLERANCE

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([asdict(p) for p in self.points],
                            columns=["p1d", "p2XX", "p2d", "delta_f", "delta_s", "fidelity"])

    def to_dict(self) -> dict:
        return {
            "best": asdict(self.best),
            "used_fallback": self.used_fallback,
            "tolerance": self.tolerance,
            "level_set": self.level_set,
            "points": [asdict(p) for p in self.points],
        }

    def write(self, path: Path | str) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True))

    @classmethod
    def from_dict(cls, data: dict) -> "FitResult":
        points = [FitPoint(**p) for p in data["points"]]
        return cls(points, list(data["level_set"]), FitPoint(**data["best"]),
                   bool(data["used_fallback"]), float(data["tolerance"]))


def select_best(points: Sequence[FitPoint], tolerance: float) -> tuple[list[int], FitPoint, bool]:
    level_set = [i for i, p in enumerate(points) if p.delta_f <= tolerance]
    if level_set:
        best = min((points[i] for i in level_set), key=lambda p: (p.delta_s, p.p1d, p.p2XX, p.p2d))
        return level_set, best, False
    best = min(points, key=lambda p: (p.delta_f, p.p1d, p.p2XX, p.p2d))
    logger.warning("No grid point within |dF| <= %g; falling back to the dF minimiser %s",
                   tolerance, best.rates)
    return level_set, best, True


def grid_fit(
    reference: EstimationReport,
    grid: FitGrid,
    seed: int,
    plan: Optional[MeasurementPlan] = None,
    form: str = "RXX",
    workers: int = 1,
) -> FitResult:
    """Simulate the full tomography at every grid point and pick the best match."""
    plan = plan if plan is not None else greedy_clique_cover(n=reference.n)
    root = TrajectoryRng(seed)
    grid_points = grid.points()

    def evaluate(index: int) -> FitPoint:
        p1d, p2XX, p2d = grid_points[index]
        noise = grid.base.with_rates(p1d, p2XX, p2d)
        run = run_tomography(noise, grid.shots, root.child(index), plan=plan, form=form, n=reference.n)
        point = FitPoint(p1d, p2XX, p2d, delta_fidelity(reference, run.raw),
                         delta_stabilizers(reference, run.raw), run.raw_fidelity.fidelity)
        logger.debug("Grid point %s: dF=%.4f dS=%.4f", point.rates, point.delta_f, point.delta_s)
        return point

    logger.info("Fitting over %d grid points with %d shots per setting", len(grid_points), grid.shots)
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        points = list(pool.map(evaluate, range(len(grid_points))))
    level_set, best, fallback = select_best(points, grid.tolerance)
    logger.info("Best fit p1d=%.4f p2XX=%.4f p2d=%.4f (dS=%.4f)", best.p1d, best.p2XX, best.p2d, best.delta_s)
    return FitResult(points, level_set, best, fallback, grid.tolerance)
