"""Linear algebra over F2 on uint8 matrices."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np


def as_gf2(matrix) -> np.ndarray:
    arr = np.array(matrix, dtype=np.uint8) % 2
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    return arr


def row_echelon(matrix) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form and pivot columns."""
    a = as_gf2(matrix).copy()
    rows, cols = a.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        hits = np.nonzero(a[r:, c])[0]
        if hits.size == 0:
            continue
        piv = r + int(hits[0])
        if piv != r:
            a[[r, piv]] = a[[piv, r]]
        others = np.nonzero(a[:, c])[0]
        for rr in others:
            if rr != r:
                a[rr, :] ^= a[r, :]
        pivots.append(c)
        r += 1
    return a, pivots


def rank(matrix) -> int:
    a = as_gf2(matrix)
    if a.size == 0:
        return 0
    return len(row_echelon(a)[1])


def nullspace(matrix, num_vars: Optional[int] = None) -> np.ndarray:
    """Rows of the result span {v : A v = 0}."""
    a = as_gf2(matrix)
    if a.size == 0:
        size = num_vars if num_vars is not None else a.shape[1]
        return np.eye(size, dtype=np.uint8)
    reduced, pivots = row_echelon(a)
    cols = reduced.shape[1]
    free = [c for c in range(cols) if c not in pivots]
    basis = np.zeros((len(free), cols), dtype=np.uint8)
    for k, f in enumerate(free):
        basis[k, f] = 1
        for i, p in enumerate(pivots):
            basis[k, p] = reduced[i, f]
    return basis


@dataclass(frozen=True)
class LinearSolution:
    consistent: bool
    rank: int
    augmented_rank: int
    solution: Optional[np.ndarray] = None


def solve(matrix, rhs) -> LinearSolution:
    """Solve A v = b over F2, reporting both ranks."""
    a = as_gf2(matrix)
    b = np.array(rhs, dtype=np.uint8).reshape(-1, 1) % 2
    if a.shape[0] != b.shape[0]:
        raise ValueError(f"{a.shape[0]} equations but {b.shape[0]} right-hand sides")
    rank_a = rank(a)
    augmented = np.hstack([a, b])
    rank_ab = rank(augmented)
    if rank_ab > rank_a:
        return LinearSolution(False, rank_a, rank_ab)
    reduced, pivots = row_echelon(augmented)
    v = np.zeros(a.shape[1], dtype=np.uint8)
    for i, p in enumerate(pivots):
        v[p] = reduced[i, -1]
    return LinearSolution(True, rank_a, rank_ab, v)


def int_rows(rows: list[int], width: int) -> np.ndarray:
    """Bit-mask rows (bit j = column j) to a uint8 matrix."""
    out = np.zeros((len(rows), width), dtype=np.uint8)
    for i, r in enumerate(rows):
        for j in range(width):
            out[i, j] = (r >> j) & 1
    return out


def row_ints(matrix: np.ndarray) -> list[int]:
    return [sum(1 << int(j) for j in np.nonzero(row)[0]) for row in as_gf2(matrix)]
