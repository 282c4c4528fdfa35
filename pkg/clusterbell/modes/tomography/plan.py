"""Measurement plans: stabilizers grouped into qubit-wise commuting cliques."""
from __future__ import annotations

import hashlib
import logging
from collections.abc import Sequence
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import pandas as pd

from clusterbell.core import config
from clusterbell.core.pauli import (
    BinaryVector,
    PauliOperator,
    cycle_stabilizer,
    locally_commutes,
    nontrivial_stabilizers,
    parse_pauli,
    render_pauli,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class StabilizerEntry:
    """A signed stabilizer and its diagonal form U S U^dag = omega * prod_{j in f} Z_j."""

    label: str
    pauli: PauliOperator

    @property
    def omega(self) -> int:
        return self.pauli.sign

    @property
    def mask(self) -> int:
        return self.pauli.support_mask


@dataclass(frozen=True)
class Clique:
    index: int
    basis: str
    members: tuple[StabilizerEntry, ...]

    def labels(self) -> list[str]:
        return [m.label for m in self.members]


def _order_key(entry: StabilizerEntry) -> tuple[int, str]:
    return (-entry.pauli.weight, render_pauli(entry.pauli))


def basis_pattern(n: int, members: Sequence[StabilizerEntry]) -> str:
    """Common non-identity factor per qubit; Z where no member acts."""
    letters = ["Z"] * n
    for m in members:
        for j in m.pauli.support():
            letters[j] = m.pauli.label(j)
    return "".join(letters)


@dataclass(frozen=True)
class MeasurementPlan:
    n: int
    cliques: tuple[Clique, ...]

    def entries(self) -> list[tuple[int, StabilizerEntry]]:
        return [(c.index, m) for c in self.cliques for m in c.members]

    def labels(self) -> list[str]:
        return [m.label for _, m in self.entries()]

    def clique_of(self, label: str) -> int:
        for index, member in self.entries():
            if member.label == label:
                return index
        raise KeyError(label)

    def __len__(self) -> int:
        return len(self.cliques)

    def validate(self) -> None:
        seen: set[str] = set()
        for clique in self.cliques:
            for i, a in enumerate(clique.members):
                if a.label in seen:
                    raise ValueError(f"stabilizer {a.label} appears in more than one clique")
                seen.add(a.label)
                for j in a.pauli.support():
                    if a.pauli.label(j) != clique.basis[j]:
                        raise ValueError(f"basis {clique.basis} does not diagonalise {a.pauli}")
                for b in clique.members[i + 1:]:
                    if not locally_commutes(a.pauli, b.pauli):
                        raise ValueError(f"{a.pauli} and {b.pauli} do not commute qubit-wise")

    def plan_hash(self) -> str:
        text = "\n".join(
            f"{c.basis}:{m.label}:{render_pauli(m.pauli)}" for c in self.cliques for m in c.members
        )
        return hashlib.sha256(text.encode()).hexdigest()[:16]

    def to_frame(self) -> pd.DataFrame:
        rows = [
            {"group": c.index, "basis": c.basis, "input": m.label, "stabilizer": render_pauli(m.pauli)}
            for c in self.cliques
            for m in c.members
        ]
        return pd.DataFrame(rows, columns=["group", "basis", "input", "stabilizer"])


def _as_entries(stabilizers: Sequence) -> list[StabilizerEntry]:
    entries = []
    for item in stabilizers:
        if isinstance(item, StabilizerEntry):
            entries.append(item)
        elif isinstance(item, PauliOperator):
            entries.append(StabilizerEntry(render_pauli(item), item))
        else:
            label, pauli = item
            entries.append(StabilizerEntry(str(label), pauli))
    return entries


def greedy_clique_cover(stabilizers: Optional[Sequence] = None, n: int = config.DEFAULT_QUBITS) -> MeasurementPlan:
    """First-fit colouring of the qubit-wise anticommutation graph.

    Vertices are visited by descending weight, ties broken by the rendered
    Pauli string; each colour class becomes one measurement setting.
    """
    try:
        import networkx as nx
    except ImportError as exc:
        raise RuntimeError("Clique grouping requires networkx.") from exc

    if stabilizers is None:
        stabilizers = [(str(x), s) for x, s in nontrivial_stabilizers(n)]
    entries = _as_entries(stabilizers)
    if not entries:
        raise ValueError("no stabilizers to group")
    width = entries[0].pauli.n
    by_label = {e.label: e for e in entries}
    graph = nx.Graph()
    graph.add_nodes_from(by_label)
    for i, a in enumerate(entries):
        for b in entries[i + 1:]:
            if not locally_commutes(a.pauli, b.pauli):
                graph.add_edge(a.label, b.label)

    ordered = [e.label for e in sorted(entries, key=_order_key)]
    colours = nx.greedy_color(graph, strategy=lambda g, c: ordered)
    groups: dict[int, list[StabilizerEntry]] = {}
    for label in ordered:
        groups.setdefault(colours[label], []).append(by_label[label])
    cliques = tuple(
        Clique(index, basis_pattern(width, members), tuple(members))
        for index, members in sorted(groups.items())
    )
    plan = MeasurementPlan(width, cliques)
    plan.validate()
    logger.info("Greedy cover: %d stabilizers in %d settings", len(entries), len(plan))
    if width == config.DEFAULT_QUBITS and len(entries) == (1 << width) - 1 and len(plan) != config.REFERENCE_CLIQUE_COUNT:
        logger.warning("Greedy cover uses %d settings, reference partition uses %d",
                       len(plan), config.REFERENCE_CLIQUE_COUNT)
    return plan


def load_stabilizer_table(path: Path | str = config.STABILIZER_TABLE) -> pd.DataFrame:
    return pd.read_csv(path, dtype={"input": str, "stabilizer": str})


def reference_plan(path: Path | str = config.STABILIZER_TABLE) -> MeasurementPlan:
    """The 37-setting partition stored in the shipped C6 stabilizer table."""
    table = load_stabilizer_table(path)
    n = len(table["input"].iloc[0])
    cliques = []
    for index, (_, rows) in enumerate(table.groupby("group", sort=True)):
        members = []
        for label, text in zip(rows["input"], rows["stabilizer"]):
            pauli = parse_pauli(text)
            expected = cycle_stabilizer(n, BinaryVector.from_string(label))
            if pauli != expected:
                raise ValueError(f"fixture row {label}: {text} but the cycle stabilizer is {expected}")
            members.append(StabilizerEntry(label, pauli))
        cliques.append(Clique(index, basis_pattern(n, members), tuple(members)))
    plan = MeasurementPlan(n, tuple(cliques))
    plan.validate()
    return plan
