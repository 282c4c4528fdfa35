"""Readout confusion models: error injection and linear inversion."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import reduce
from typing import Optional, Sequence

import numpy as np

from clusterbell.core import config
from clusterbell.core.errors import DimensionError, SingularConfusionError

logger = logging.getLogger(__name__)


def _check_stochastic(m: np.ndarray, what: str) -> None:
    if np.any(m < -1e-12):
        raise ValueError(f"{what} has negative entries")
    if not np.allclose(m.sum(axis=0), 1.0, atol=1e-9):
        raise ValueError(f"{what} columns must sum to 1")


def _invert(m: np.ndarray, what: str) -> np.ndarray:
    try:
        inv = np.linalg.inv(m)
    except np.linalg.LinAlgError as exc:
        raise SingularConfusionError(f"{what} is singular") from exc
    if not np.allclose(inv @ m, np.eye(m.shape[0]), atol=config.EQUIVALENCE_TOLERANCE):
        raise SingularConfusionError(f"{what} is numerically singular")
    return inv


@dataclass(frozen=True)
class ConfusionModel:
    """M[observed, true], either as per-qubit 2x2 factors or one full matrix."""

    n: int
    factors: Optional[tuple[np.ndarray, ...]] = None
    full: Optional[np.ndarray] = None
    _inverse: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if (self.factors is None) == (self.full is None):
            raise ValueError("give exactly one of per-qubit factors or a full matrix")
        if self.factors is not None:
            if len(self.factors) != self.n:
                raise DimensionError(f"{len(self.factors)} factors for {self.n} qubits")
            mats = tuple(np.asarray(f, dtype=float) for f in self.factors)
            for q, m in enumerate(mats):
                if m.shape != (2, 2):
                    raise DimensionError(f"qubit {q} confusion matrix has shape {m.shape}")
                _check_stochastic(m, f"qubit {q} confusion matrix")
            object.__setattr__(self, "factors", mats)
            inverse = tuple(_invert(m, f"qubit {q} confusion matrix") for q, m in enumerate(mats))
        else:
            m = np.asarray(self.full, dtype=float)
            if m.shape != (1 << self.n, 1 << self.n):
                raise DimensionError(f"full confusion matrix has shape {m.shape}")
            _check_stochastic(m, "confusion matrix")
            object.__setattr__(self, "full", m)
            inverse = (_invert(m, "confusion matrix"),)
        object.__setattr__(self, "_inverse", inverse)

    @classmethod
    def identity(cls, n: int) -> "ConfusionModel":
        return cls(n, factors=tuple(np.eye(2) for _ in range(n)))

    @classmethod
    def from_flip_rates(cls, n: int, p01: float, p10: float) -> "ConfusionModel":
        """p01 = P(read 1 | 0), p10 = P(read 0 | 1), equal on every qubit."""
        m = np.array([[1 - p01, p10], [p01, 1 - p10]])
        return cls(n, factors=tuple(m.copy() for _ in range(n)))

    @classmethod
    def symmetric(cls, n: int, p: float) -> "ConfusionModel":
        return cls.from_flip_rates(n, p, p)

    @property
    def is_tensor(self) -> bool:
        return self.factors is not None

    def matrix(self) -> np.ndarray:
        if self.full is not None:
            return self.full
        return reduce(np.kron, reversed(self.factors))

    def inverse(self) -> np.ndarray:
        if self.full is not None:
            return self._inverse[0]
        return reduce(np.kron, reversed(self._inverse))

    def parity_values(self, outcomes: np.ndarray, mask: int) -> np.ndarray:
        """Per-outcome corrected value of (-1)^(f.z): sum_z Minv[z, u] (-1)^(f.z)."""
        outcomes = np.asarray(outcomes, dtype=np.int64)
        if self.factors is not None:
            values = np.ones(outcomes.shape, dtype=float)
            for q in range(self.n):
                if mask >> q & 1:
                    inv = self._inverse[q]
                    ratio = inv[0, :] - inv[1, :]
                    values *= ratio[(outcomes >> q) & 1]
            return values
        idx = np.arange(1 << self.n)
        signs = np.ones(idx.shape, dtype=float)
        for q in range(self.n):
            if mask >> q & 1:
                signs *= 1 - 2 * ((idx >> q) & 1)
        return (signs @ self._inverse[0])[outcomes]

    def corrected_distribution(self, counts: np.ndarray) -> np.ndarray:
        """q = M^-1 p for an outcome histogram; entries may be negative."""
        counts = np.asarray(counts, dtype=float)
        p = counts / counts.sum()
        if self.full is not None:
            return self._inverse[0] @ p
        tensor = p.reshape((2,) * self.n)
        for q in range(self.n):
            ax = self.n - 1 - q
            tensor = np.moveaxis(np.tensordot(self._inverse[q], tensor, axes=([1], [ax])), 0, ax)
        return tensor.reshape(-1)

    def apply(self, outcomes: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        """Inject readout error into ideal outcomes."""
        outcomes = np.asarray(outcomes, dtype=np.int64).copy()
        if self.factors is not None:
            for q, m in enumerate(self.factors):
                bit = (outcomes >> q) & 1
                flip_prob = np.where(bit == 0, m[1, 0], m[0, 1])
                flips = rng.random(outcomes.shape) < flip_prob
                outcomes ^= flips.astype(np.int64) << q
            return outcomes
        out = np.empty_like(outcomes)
        for u in np.unique(outcomes):
            where = np.nonzero(outcomes == u)[0]
            out[where] = rng.choice(1 << self.n, size=where.size, p=self.full[:, u])
        return out

    def to_dict(self) -> dict:
        if self.factors is not None:
            return {"n": self.n, "factors": [m.tolist() for m in self.factors]}
        return {"n": self.n, "full": self.full.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "ConfusionModel":
        if "factors" in data:
            return cls(int(data["n"]), factors=tuple(np.array(m) for m in data["factors"]))
        return cls(int(data["n"]), full=np.array(data["full"]))


def confusion_from_rates(n: int, rates: Optional[Sequence[float]]) -> Optional[ConfusionModel]:
    if not rates:
        return None
    p01, p10 = (rates[0], rates[0]) if len(rates) == 1 else (rates[0], rates[1])
    if p01 == 0 and p10 == 0:
        return None
    return ConfusionModel.from_flip_rates(n, p01, p10)
