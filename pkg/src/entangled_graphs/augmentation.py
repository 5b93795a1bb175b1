"""Module-preserving edge dropping for contrastive view generation.

Edges inside a module are scored weight + max(weight); edges across modules
weight - max(weight). With positive weights every intra score strictly
exceeds every inter score, so low-score dropping removes cross-module edges
first and the module structure survives augmentation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .community import ModulePartition
from .graphs import BrainGraph


@dataclass(frozen=True)
class EdgeScore:
    edge: tuple[int, int]
    weight: float
    score: float
    intra: bool


@dataclass(frozen=True)
class LowestFirst:
    """Deterministically drop the lowest-scoring edges."""


@dataclass(frozen=True)
class WeightedRandom:
    """Sample drops without replacement, favoring low scores."""

    seed: int = 0


DropMode = LowestFirst | WeightedRandom


@dataclass(frozen=True)
class AugmentedPair:
    view1: BrainGraph
    view2: BrainGraph
    dropped1: tuple[tuple[int, int], ...]
    dropped2: tuple[tuple[int, int], ...]


def score_edges(g: BrainGraph, p: ModulePartition) -> list[EdgeScore]:
    """Score every edge of g against the module assignment."""
    if len(p.assignment) != g.n:
        raise ValueError("partition does not cover the graph")
    edges = g.edges()
    if not edges:
        return []
    w_max = max(w for _, _, w in edges)
    out = []
    for i, j, w in edges:
        intra = p.assignment[i] == p.assignment[j]
        score = w + w_max if intra else w - w_max
        out.append(EdgeScore(edge=(i, j), weight=w, score=score, intra=intra))
    return out


def _remove(g: BrainGraph, dropped: list[tuple[int, int]]) -> BrainGraph:
    a = g.adjacency.copy()
    for i, j in dropped:
        a[i, j] = a[j, i] = 0.0
    return BrainGraph(adjacency=a, features=g.features, metadata=dict(g.metadata))


def drop_edges(g: BrainGraph, p: ModulePartition, drop_fraction: float,
               mode: DropMode = LowestFirst()) -> tuple[BrainGraph, tuple[tuple[int, int], ...]]:
    """Remove floor(drop_fraction * m) edges; returns (view, dropped edges)."""
    if not 0 <= drop_fraction < 1:
        raise ValueError("drop_fraction must be in [0, 1)")
    scores = score_edges(g, p)
    count = math.floor(drop_fraction * len(scores))
    if count == 0:
        return _remove(g, []), ()
    if isinstance(mode, LowestFirst):
        order = sorted(scores, key=lambda s: (s.score, s.edge))
        dropped = [s.edge for s in order[:count]]
    else:
        rng = np.random.Generator(np.random.PCG64(mode.seed))
        raw = np.array([s.score for s in scores])
        eps = 1e-6 * max(s.weight for s in scores)
        weights = raw.max() - raw + eps
        idx = rng.choice(len(scores), size=count, replace=False,
                         p=weights / weights.sum())
        dropped = [scores[i].edge for i in sorted(idx)]
    return _remove(g, dropped), tuple(dropped)


def make_views(g: BrainGraph, p: ModulePartition, drop_fraction: float = 0.2,
               seed: int = 0) -> AugmentedPair:
    """Two independently sampled views from consecutive seeds."""
    view1, dropped1 = drop_edges(g, p, drop_fraction, WeightedRandom(seed))
    view2, dropped2 = drop_edges(g, p, drop_fraction, WeightedRandom(seed + 1))
    return AugmentedPair(view1=view1, view2=view2,
                         dropped1=dropped1, dropped2=dropped2)
