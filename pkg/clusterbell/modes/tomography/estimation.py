"""Stabilizer expectation estimators, covariances, fidelity and witness."""
from __future__ import annotations

import json
import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
import pandas as pd

from clusterbell.core import config
from clusterbell.core.errors import CliqueMismatchError, CoverageError, EmptyDatasetError
from clusterbell.core.pauli import BinaryVector, bitstring, render_pauli
from clusterbell.core.readout import ConfusionModel
from clusterbell.core.simulator import parities
from clusterbell.modes.tomography.plan import MeasurementPlan, load_stabilizer_table, reference_plan

logger = logging.getLogger(__name__)


@dataclass
class CliqueTally:
    basis: str
    tallies: dict[int, int] = field(default_factory=dict)

    @property
    def shots(self) -> int:
        return sum(self.tallies.values())

    def arrays(self) -> tuple[np.ndarray, np.ndarray]:
        keys = sorted(self.tallies)
        return np.array(keys, dtype=np.int64), np.array([self.tallies[k] for k in keys], dtype=float)

    def merge(self, other: "CliqueTally") -> "CliqueTally":
        if other.basis != self.basis:
            raise CliqueMismatchError(f"cannot merge basis {other.basis} into {self.basis}")
        merged = Counter(self.tallies)
        merged.update(other.tallies)
        return CliqueTally(self.basis, dict(merged))


@dataclass
class ShotDataset:
    n: int
    plan_hash: str
    cliques: list[CliqueTally]

    @classmethod
    def from_outcomes(cls, plan: MeasurementPlan, outcomes: Sequence[np.ndarray]) -> "ShotDataset":
        if len(outcomes) != len(plan.cliques):
            raise CliqueMismatchError(f"{len(outcomes)} outcome arrays for {len(plan.cliques)} cliques")
        cliques = []
        for clique, shots in zip(plan.cliques, outcomes):
            values, counts = np.unique(np.asarray(shots, dtype=np.int64), return_counts=True)
            cliques.append(CliqueTally(clique.basis, {int(v): int(c) for v, c in zip(values, counts)}))
        return cls(plan.n, plan.plan_hash(), cliques)

    def merge(self, other: "ShotDataset") -> "ShotDataset":
        if other.plan_hash != self.plan_hash or len(other.cliques) != len(self.cliques):
            raise CliqueMismatchError("datasets were taken with different plans")
        return ShotDataset(self.n, self.plan_hash, [a.merge(b) for a, b in zip(self.cliques, other.cliques)])

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "plan_hash": self.plan_hash,
            "cliques": [
                {"basis": c.basis, "tallies": {bitstring(k, self.n): v for k, v in sorted(c.tallies.items())}}
                for c in self.cliques
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ShotDataset":
        cliques = [
            CliqueTally(c["basis"], {BinaryVector.from_string(k).bits: int(v) for k, v in c["tallies"].items()})
            for c in data["cliques"]
        ]
        n = int(data.get("n", len(cliques[0].basis) if cliques else 0))
        return cls(n, data["plan_hash"], cliques)

    def write(self, path: Path | str) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True))

    @classmethod
    def read(cls, path: Path | str) -> "ShotDataset":
        return cls.from_dict(json.loads(Path(path).read_text()))


@dataclass(frozen=True)
class StabilizerEstimate:
    label: str
    stabilizer: str
    clique: int
    value: float
    stderr: float


@dataclass(frozen=True)
class CovarianceBlock:
    """Per-shot covariance of one clique's members; the estimator covariance is matrix / shots."""

    labels: tuple[str, ...]
    matrix: np.ndarray
    shots: int


@dataclass
class EstimationReport:
    n: int
    estimates: dict[str, StabilizerEstimate]
    blocks: dict[int, CovarianceBlock]
    corrected: bool = False
    flags: list[str] = field(default_factory=list)

    def value(self, label: str) -> float:
        return self.estimates[label].value

    def values(self) -> dict[str, float]:
        return {k: e.value for k, e in self.estimates.items()}

    def covariance(self, s: str, t: str) -> float:
        cs, ct = self.estimates[s].clique, self.estimates[t].clique
        if cs != ct:
            raise CliqueMismatchError(f"{s} (clique {cs}) and {t} (clique {ct}) were measured separately")
        block = self.blocks[cs]
        return float(block.matrix[block.labels.index(s), block.labels.index(t)])

    def to_frame(self) -> pd.DataFrame:
        rows = [
            {"input": e.label, "stabilizer": e.stabilizer, "value": e.value, "stderr": e.stderr, "clique": e.clique}
            for e in self.estimates.values()
        ]
        return pd.DataFrame(rows, columns=["input", "stabilizer", "value", "stderr", "clique"])


def _clique_values(members, outcomes: np.ndarray, n: int, confusion: Optional[ConfusionModel]) -> np.ndarray:
    """(members, outcomes) matrix of per-shot values v_S(b)."""
    rows = []
    for m in members:
        if confusion is None:
            signs = 1.0 - 2.0 * parities(outcomes, m.mask, n)
        else:
            signs = confusion.parity_values(outcomes, m.mask)
        rows.append(m.omega * signs)
    return np.array(rows)


def estimate_expectations(
    plan: MeasurementPlan,
    dataset: ShotDataset,
    confusion: Optional[ConfusionModel] = None,
) -> EstimationReport:
    """mu_S = mean of v_S, Sigma_ST = mean(v_S v_T) - mu_S mu_T, clique by clique."""
    if dataset.plan_hash != plan.plan_hash() or len(dataset.cliques) != len(plan.cliques):
        raise CliqueMismatchError("dataset does not match the measurement plan")
    estimates: dict[str, StabilizerEstimate] = {}
    blocks: dict[int, CovarianceBlock] = {}
    flags: list[str] = []
    for clique, tally in zip(plan.cliques, dataset.cliques):
        if tally.basis != clique.basis:
            raise CliqueMismatchError(f"clique {clique.index}: data basis {tally.basis}, plan basis {clique.basis}")
        shots = tally.shots
        if shots == 0:
            raise EmptyDatasetError(f"clique {clique.index} ({clique.basis}) has no shots")
        outcomes, weights = tally.arrays()
        v = _clique_values(clique.members, outcomes, plan.n, confusion)
        mu = v @ weights / shots
        sigma = (v * weights) @ v.T / shots - np.outer(mu, mu)
        sigma = (sigma + sigma.T) / 2
        blocks[clique.index] = CovarianceBlock(tuple(clique.labels()), sigma, shots)
        for k, member in enumerate(clique.members):
            stderr = math.sqrt(max(float(sigma[k, k]), 0.0) / shots)
            estimates[member.label] = StabilizerEstimate(
                member.label, render_pauli(member.pauli), clique.index, float(mu[k]), stderr
            )
            if abs(mu[k]) > 1.0:
                flags.append(member.label)
    if flags:
        logger.warning("%d stabilizer estimates exceed 1 in magnitude: %s", len(flags), ", ".join(flags))
    return EstimationReport(plan.n, estimates, blocks, confusion is not None, flags)


def covariances(plan: MeasurementPlan, dataset: ShotDataset,
                confusion: Optional[ConfusionModel] = None) -> dict[int, CovarianceBlock]:
    return estimate_expectations(plan, dataset, confusion).blocks


@dataclass(frozen=True)
class FidelityWitness:
    fidelity: float
    fidelity_stderr: float
    witness: float
    witness_stderr: float
    corrected: bool = False

    @property
    def entangled(self) -> bool:
        """Negative witness: genuine multipartite entanglement detected."""
        return self.witness < 0

    def to_dict(self) -> dict:
        return {
            "fidelity": self.fidelity,
            "fidelity_stderr": self.fidelity_stderr,
            "witness": self.witness,
            "witness_stderr": self.witness_stderr,
            "entangled": self.entangled,
            "corrected": self.corrected,
        }


def expected_labels(n: int) -> set[str]:
    return {bitstring(b, n) for b in range(1, 1 << n)}


def fidelity_and_witness(report: EstimationReport) -> FidelityWitness:
    """F = 2^-n (1 + sum_S mu_S) and W = 1/2 - F with block-propagated errors."""
    missing = expected_labels(report.n) - set(report.estimates)
    if missing:
        raise CoverageError(missing)
    h = 1.0 / (1 << report.n)
    fidelity = h * (1.0 + sum(e.value for e in report.estimates.values()))
    variance = sum(h * h * float(block.matrix.sum()) / block.shots for block in report.blocks.values())
    stderr = math.sqrt(max(variance, 0.0))
    result = FidelityWitness(fidelity, stderr, 0.5 - fidelity, stderr, report.corrected)
    logger.info("Fidelity %s, witness %s%s", format_uncertainty(fidelity, stderr),
                format_uncertainty(result.witness, stderr),
                " (entangled)" if result.entangled else "")
    return result


def format_uncertainty(value: float, err: float, decimals: int = 4) -> str:
    """Round to the first significant digit of the error: 0.6061 +- 0.0079 -> '0.606(8)'.

    A zero or non-finite error falls back to ``decimals`` places with no bracket.
    """
    if not math.isfinite(err) or err <= 0:
        return f"{value:.{decimals}f}"
    exponent = math.floor(math.log10(err))
    lead = round(err / 10 ** exponent)
    if lead == 10:
        exponent += 1
        lead = 1
    if exponent >= 0:
        return f"{value:.0f}({lead * 10 ** exponent})"
    return f"{value:.{-exponent}f}({lead})"


def report_from_table(frame: pd.DataFrame, column: str = "spam", shots: int = config.DEFAULT_SHOTS) -> EstimationReport:
    """Rebuild a report from a stabilizer table; only the diagonal covariances survive."""
    if column not in frame.columns or f"{column}_err" not in frame.columns:
        raise ValueError(f"table has no {column!r} / {column}_err columns")
    group_column = "clique" if "clique" in frame.columns else "group"
    labels = [str(v) for v in frame["input"]]
    if not labels:
        raise EmptyDatasetError("stabilizer table is empty")
    n = len(labels[0])
    estimates: dict[str, StabilizerEstimate] = {}
    members: dict[int, list[tuple[str, float]]] = {}
    for label, text, group, value, err in zip(labels, frame["stabilizer"], frame[group_column],
                                              frame[column], frame[f"{column}_err"]):
        estimates[label] = StabilizerEstimate(label, str(text), int(group), float(value), float(err))
        members.setdefault(int(group), []).append((label, float(err)))
    blocks = {
        group: CovarianceBlock(tuple(k for k, _ in rows), np.diag([e * e * shots for _, e in rows]), shots)
        for group, rows in members.items()
    }
    return EstimationReport(n, estimates, blocks, corrected=column == "spam")


def load_reference_report(column: str = "spam", path: Path | str = config.STABILIZER_TABLE) -> EstimationReport:
    """Published stabilizer values ('raw' or 'spam') as a report on the reference plan."""
    if column not in ("raw", "spam"):
        raise ValueError(f"column must be 'raw' or 'spam', got {column!r}")
    reference_plan(path)  # rejects rows whose sign disagrees with the cycle stabilizer
    return report_from_table(load_stabilizer_table(path), column)


def table_frame(raw: EstimationReport, corrected: Optional[EstimationReport] = None) -> pd.DataFrame:
    """Stabilizer table: input, stabilizer, raw value and error, corrected value and error."""
    frame = raw.to_frame().rename(columns={"value": "raw", "stderr": "raw_err"})
    if corrected is not None:
        spam = corrected.to_frame()[["input", "value", "stderr"]].rename(
            columns={"value": "spam", "stderr": "spam_err"}
        )
        frame = frame.merge(spam, on="input", how="left")
    columns = ["input", "stabilizer", "clique", "raw", "raw_err"]
    if corrected is not None:
        columns += ["spam", "spam_err"]
    return frame[columns]
