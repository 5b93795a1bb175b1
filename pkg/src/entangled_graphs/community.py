"""Functional-module detection: weighted Newman-Girvan modularity and Louvain.

Louvain here is the classic two-phase heuristic: seeded sweeps of greedy
single-node moves, then aggregation of modules into supernodes (self-loops
keep internal weight), repeated until a sweep makes no move. Determinism:
visit order comes from the seed, equal-gain moves pick the lowest module id.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyGraph
from .graphs import BrainGraph


@dataclass(frozen=True)
class ModulePartition:
    assignment: tuple[int, ...]
    k: int
    Q: float
    seed: int = 0
    q_history: tuple[float, ...] = field(default_factory=tuple)

    def __post_init__(self):
        ids = sorted(set(self.assignment))
        if ids != list(range(self.k)):
            raise ValueError("module ids must be dense 0..k-1")


def modularity(g: BrainGraph, assignment, resolution: float = 1.0) -> float:
    """Q = (1/2W) sum_ij [w_ij - r k_i k_j / 2W] delta(c_i, c_j)."""
    a = g.adjacency
    labels = np.asarray(assignment)
    if labels.shape != (g.n,):
        raise ValueError("assignment length must equal node count")
    w2 = float(a.sum())
    if w2 == 0:
        raise EmptyGraph("modularity needs at least one edge")
    degrees = a.sum(axis=1)
    q = 0.0
    for c in np.unique(labels):
        members = labels == c
        internal = float(a[np.ix_(members, members)].sum())
        total = float(degrees[members].sum())
        q += internal / w2 - resolution * (total / w2) ** 2
    return q


def _relabel_dense(labels: np.ndarray) -> np.ndarray:
    """Dense 0-based ids in order of first appearance."""
    mapping: dict[int, int] = {}
    out = np.empty(len(labels), dtype=int)
    for i, c in enumerate(labels):
        if c not in mapping:
            mapping[c] = len(mapping)
        out[i] = mapping[c]
    return out


def _local_moves(b: np.ndarray, rng: np.random.Generator,
                 resolution: float, min_gain: float) -> tuple[np.ndarray, bool]:
    """Greedy sweeps on a weighted graph with self-loops; returns (labels, moved)."""
    n = b.shape[0]
    w2 = float(b.sum())
    degrees = b.sum(axis=1)
    labels = np.arange(n)
    sigma_tot = degrees.copy()
    moved_any = False
    while True:
        moved = False
        for u in rng.permutation(n):
            c_old = labels[u]
            sigma_tot[c_old] -= degrees[u]
            # Weight from u into each candidate module, self-loop excluded.
            links: dict[int, float] = {c_old: 0.0}
            row = b[u]
            for v in np.nonzero(row)[0]:
                if v == u:
                    continue
                links[labels[v]] = links.get(labels[v], 0.0) + row[v]
            stay = links[c_old] - resolution * sigma_tot[c_old] * degrees[u] / w2
            best_c, best_gain = c_old, stay
            # Ascending id order plus strict improvement means equal-gain
            # candidates resolve to the lowest module id, and equal-gain
            # churn (which would never terminate) cannot happen.
            for c in sorted(links):
                if c == c_old:
                    continue
                gain = links[c] - resolution * sigma_tot[c] * degrees[u] / w2
                if gain > best_gain + min_gain:
                    best_c, best_gain = c, gain
            labels[u] = best_c
            sigma_tot[best_c] += degrees[u]
            if best_c != c_old:
                moved = moved_any = True
        if not moved:
            return labels, moved_any


def _aggregate(b: np.ndarray, labels: np.ndarray) -> np.ndarray:
    """Supernode adjacency; diagonal holds each module's internal weight."""
    k = labels.max() + 1
    onehot = np.zeros((len(labels), k))
    onehot[np.arange(len(labels)), labels] = 1.0
    return onehot.T @ b @ onehot


def louvain(g: BrainGraph, seed: int = 0, resolution: float = 1.0) -> ModulePartition:
    """Maximize modularity; Q over passes is recorded and never decreases."""
    if g.m == 0:
        raise EmptyGraph("louvain needs at least one edge")
    rng = np.random.Generator(np.random.PCG64(seed))
    # Gains below this threshold are treated as ties; keeps the per-pass Q
    # recomputation on the original graph exactly non-decreasing.
    min_gain = 1e-10 * float(g.adjacency.sum())

    b = g.adjacency.copy()
    assignment = np.arange(g.n)
    history: list[float] = []
    while True:
        labels, moved = _local_moves(b, rng, resolution, min_gain)
        if not moved and history:
            break
        labels = _relabel_dense(labels)
        assignment = labels[assignment]
        history.append(modularity(g, assignment, resolution))
        if not moved:
            break
        b = _aggregate(b, labels)
    assignment = _relabel_dense(assignment)
    k = int(assignment.max()) + 1
    return ModulePartition(assignment=tuple(int(c) for c in assignment), k=k,
                           Q=history[-1], seed=seed, q_history=tuple(history))


def partition_to_json(p: ModulePartition) -> dict:
    return {"assignment": list(p.assignment), "k": p.k, "Q": p.Q, "seed": p.seed}


def partition_from_json(obj: dict) -> ModulePartition:
    return ModulePartition(assignment=tuple(int(c) for c in obj["assignment"]),
                           k=int(obj["k"]), Q=float(obj["Q"]),
                           seed=int(obj.get("seed", 0)))


def save_partition(p: ModulePartition, path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(partition_to_json(p), f, sort_keys=True)


def load_partition(path) -> ModulePartition:
    with open(path, encoding="utf-8") as f:
        return partition_from_json(json.load(f))
