"""Synthetic two-class planted-module graph generator.

Each graph has k contiguous module blocks. Pairs inside a module get an edge
with the class's intra probability, pairs across modules with the inter
probability; weights are drawn uniformly from per-kind ranges. A class may
additionally plant hub nodes: every edge incident to a hub has its weight
drawn from the hub range, and the hub gains extra edges to non-neighbors with
the boost probability. Node features are the adjacency rows (connection
profiles), so d = n.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidConfig
from .graphs import BrainGraph


@dataclass(frozen=True)
class ClassSpec:
    """Edge statistics for one class of graphs."""

    intra_prob: float
    inter_prob: float
    intra_weight: tuple[float, float] = (1.0, 1.0)
    inter_weight: tuple[float, float] = (1.0, 1.0)
    hub_count: int = 0
    hub_boost: float = 0.0
    hub_weight: tuple[float, float] | None = None


@dataclass(frozen=True)
class SyntheticConfig:
    n: int
    k: int
    graphs_per_class: int
    class_specs: tuple[ClassSpec, ...]
    val_fraction: float = 0.1
    test_fraction: float = 0.1


@dataclass(frozen=True)
class LabeledDataset:
    """Graphs with class labels and disjoint train/val/test index lists."""

    graphs: list[BrainGraph]
    labels: list[int]
    train_idx: list[int]
    val_idx: list[int]
    test_idx: list[int]

    def __post_init__(self):
        all_idx = sorted(self.train_idx + self.val_idx + self.test_idx)
        if all_idx != list(range(len(self.graphs))):
            raise ValueError("splits must partition the dataset")
        if len(self.labels) != len(self.graphs):
            raise ValueError("one label per graph")


def module_labels(n: int, k: int) -> np.ndarray:
    """Contiguous block assignment; first n % k modules get the extra node."""
    sizes = [n // k + (1 if i < n % k else 0) for i in range(k)]
    return np.repeat(np.arange(k), sizes)


def _validate(config: SyntheticConfig) -> None:
    if config.n < 1 or config.k < 1 or config.k > config.n:
        raise InvalidConfig(f"need 1 <= k <= n, got n={config.n}, k={config.k}")
    if config.graphs_per_class < 3:
        raise InvalidConfig("need at least 3 graphs per class to split")
    if len(config.class_specs) < 2:
        raise InvalidConfig("need at least two classes")
    if not (0 < config.val_fraction < 1 and 0 < config.test_fraction < 1
            and config.val_fraction + config.test_fraction < 1):
        raise InvalidConfig("split fractions must be in (0, 1) and sum below 1")
    for ci, spec in enumerate(config.class_specs):
        for name, p in (("intra_prob", spec.intra_prob),
                        ("inter_prob", spec.inter_prob),
                        ("hub_boost", spec.hub_boost)):
            if not (0.0 <= p <= 1.0):
                raise InvalidConfig(f"class {ci}: {name}={p} outside [0, 1]")
        for name, rng in (("intra_weight", spec.intra_weight),
                          ("inter_weight", spec.inter_weight),
                          ("hub_weight", spec.hub_weight)):
            if rng is None:
                continue
            lo, hi = rng
            if not (0 <= lo <= hi):
                raise InvalidConfig(f"class {ci}: {name} range ({lo}, {hi}) invalid")
        if not (0 <= spec.hub_count <= config.n):
            raise InvalidConfig(f"class {ci}: hub_count={spec.hub_count} outside [0, n]")


def _sample_graph(spec: ClassSpec, n: int, modules: np.ndarray,
                  rng: np.random.Generator) -> tuple[np.ndarray, list[int]]:
    same = modules[:, None] == modules[None, :]
    prob = np.where(same, spec.intra_prob, spec.inter_prob)
    lo = np.where(same, spec.intra_weight[0], spec.inter_weight[0])
    hi = np.where(same, spec.intra_weight[1], spec.inter_weight[1])

    # Fixed draw order keeps output reproducible; only the upper triangle of
    # the presence/weight fields is used.
    present = rng.random((n, n)) < prob
    weight = lo + rng.random((n, n)) * (hi - lo)
    adjacency = np.triu(np.where(present, weight, 0.0), k=1)
    adjacency = adjacency + adjacency.T

    hubs: list[int] = []
    if spec.hub_count > 0:
        hubs = sorted(int(h) for h in rng.choice(n, size=spec.hub_count, replace=False))
        hub_lo, hub_hi = spec.hub_weight if spec.hub_weight is not None else spec.intra_weight
        extra = rng.random((spec.hub_count, n)) < spec.hub_boost
        hub_w = hub_lo + rng.random((spec.hub_count, n)) * (hub_hi - hub_lo)
        for r, h in enumerate(hubs):
            touched = extra[r] | (adjacency[h] > 0)
            touched[h] = False
            adjacency[h, touched] = hub_w[r, touched]
            adjacency[touched, h] = hub_w[r, touched]
    return adjacency, hubs


def generate_synthetic(config: SyntheticConfig, seed: int) -> LabeledDataset:
    """Deterministic dataset: same (config, seed) gives byte-identical graphs."""
    _validate(config)
    rng = np.random.Generator(np.random.PCG64(seed))
    modules = module_labels(config.n, config.k)

    graphs: list[BrainGraph] = []
    labels: list[int] = []
    for label, spec in enumerate(config.class_specs):
        for _ in range(config.graphs_per_class):
            adjacency, hubs = _sample_graph(spec, config.n, modules, rng)
            g = BrainGraph(
                adjacency=adjacency,
                features=adjacency.copy(),
                metadata={
                    "class": label,
                    "modules": [int(m) for m in modules],
                    "hubs": hubs,
                },
            )
            graphs.append(g)
            labels.append(label)

    # Stratified split with at least one val and one test graph per class so
    # held-out AUC is always defined.
    train_idx: list[int] = []
    val_idx: list[int] = []
    test_idx: list[int] = []
    per = config.graphs_per_class
    n_val = max(1, int(config.val_fraction * per))
    n_test = max(1, int(config.test_fraction * per))
    if n_val + n_test >= per:
        raise InvalidConfig("split fractions leave no training graphs")
    for label in range(len(config.class_specs)):
        idx = label * per + rng.permutation(per)
        val_idx.extend(int(i) for i in idx[:n_val])
        test_idx.extend(int(i) for i in idx[n_val:n_val + n_test])
        train_idx.extend(int(i) for i in idx[n_val + n_test:])

    return LabeledDataset(graphs=graphs, labels=labels,
                          train_idx=sorted(train_idx),
                          val_idx=sorted(val_idx),
                          test_idx=sorted(test_idx))
