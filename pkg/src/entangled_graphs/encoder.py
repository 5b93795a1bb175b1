"""Module-contrastive node representation extractor.

A small message-passing encoder maps each node's feature row through
mean-of-neighborhood aggregation into an embedding; InfoNCE training on two
edge-dropped views pulls same-module nodes together and pushes sampled
cross-module negatives apart. Output rows are L2-normalized, so dot products
are cosine similarities and every embedding lies on the unit sphere.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .augmentation import make_views
from .autodiff import Tensor
from .community import ModulePartition
from .errors import NoNegatives, ShapeMismatch
from .graphs import BrainGraph
from .optim import DecoupledAdam, OptimConfig


@dataclass
class EncoderParams:
    """Per-layer (weight, bias) pairs; weights are autodiff tensors."""

    layers: list[tuple[Tensor, Tensor]]
    seed: int = 0

    @property
    def depth(self) -> int:
        return len(self.layers)

    def tensors(self) -> list[Tensor]:
        return [t for pair in self.layers for t in pair]


@dataclass(frozen=True)
class ContrastiveConfig:
    temperature: float = 1.0
    negatives: int = 16
    epochs: int = 30
    learning_rate: float = 1e-2
    hidden_dim: int = 64
    depth: int = 1
    seed: int = 0

    def __post_init__(self):
        if not self.temperature > 0:
            raise ValueError("temperature must be positive")
        if self.negatives < 1:
            raise ValueError("need at least one negative sample")
        if self.depth < 1:
            raise ValueError("encoder depth must be >= 1")


def init_encoder(d_in: int, hidden_dim: int = 64, depth: int = 1,
                 seed: int = 0) -> EncoderParams:
    """Uniform +-sqrt(6/(fan_in+fan_out)) initialization, seeded."""
    rng = np.random.Generator(np.random.PCG64(seed))
    dims = [d_in] + [hidden_dim] * depth
    layers = []
    for a, b in zip(dims, dims[1:]):
        bound = np.sqrt(6.0 / (a + b))
        w = Tensor(rng.uniform(-bound, bound, size=(a, b)))
        bias = Tensor(np.zeros(b))
        layers.append((w, bias))
    return EncoderParams(layers=layers, seed=seed)


def _mean_aggregator(g: BrainGraph) -> np.ndarray:
    """Row-stochastic matrix averaging each node with its neighbors."""
    mask = (g.adjacency > 0).astype(float) + np.eye(g.n)
    return mask / mask.sum(axis=1, keepdims=True)


def encode_tensor(g: BrainGraph, params: EncoderParams) -> Tensor:
    """Differentiable forward pass; rows come out unit-norm."""
    if g.features.shape[1] != params.layers[0][0].shape[0]:
        raise ShapeMismatch(
            f"features have dim {g.features.shape[1]}, encoder expects "
            f"{params.layers[0][0].shape[0]}")
    agg = Tensor(_mean_aggregator(g))
    h = Tensor(g.features)
    last = len(params.layers) - 1
    for li, (w, b) in enumerate(params.layers):
        h = agg.matmul(h).matmul(w) + b
        if li != last:
            h = h.relu()
    return h.normalize_rows()


def encode(g: BrainGraph, params: EncoderParams) -> np.ndarray:
    return encode_tensor(g, params).data


def sample_negatives(assignment, negatives: int, seed: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Per anchor: negative node ids for each view, without replacement.

    The requested count is clamped to the number of out-of-module nodes.
    Raises NoNegatives when some module covers the whole graph.
    """
    labels = np.asarray(assignment)
    n = len(labels)
    rng = np.random.Generator(np.random.PCG64(seed))
    out = []
    for i in range(n):
        pool = np.nonzero(labels != labels[i])[0]
        if pool.size == 0:
            raise NoNegatives(f"module of node {i} spans the whole graph")
        count = min(negatives, pool.size)
        neg1 = rng.choice(pool, size=count, replace=False)
        neg2 = rng.choice(pool, size=count, replace=False)
        out.append((neg1, neg2))
    return out


def info_nce_loss(h1: Tensor | np.ndarray, h2: Tensor | np.ndarray,
                  p: ModulePartition, cfg: ContrastiveConfig, seed: int = 0,
                  negative_sets=None) -> Tensor:
    """Anchor-from-view-1 InfoNCE over module-defined positives.

    Positives of anchor i: same-module nodes in view 1 (self excluded) and in
    view 2 (self included); the numerator averages exp(cos/tau) over them.
    The denominator sums exp(cos/tau) over the sampled negatives of both
    views. Natural log throughout.
    """
    h1 = h1 if isinstance(h1, Tensor) else Tensor(h1)
    h2 = h2 if isinstance(h2, Tensor) else Tensor(h2)
    labels = np.asarray(p.assignment)
    n = len(labels)
    if h1.shape[0] != n or h2.shape[0] != n:
        raise ShapeMismatch("embeddings and partition disagree on node count")
    if negative_sets is None:
        negative_sets = sample_negatives(labels, cfg.negatives, seed)

    same = labels[:, None] == labels[None, :]
    pos1 = same & ~np.eye(n, dtype=bool)
    pos2 = same
    neg1 = np.zeros((n, n))
    neg2 = np.zeros((n, n))
    for i, (a, b) in enumerate(negative_sets):
        neg1[i, a] = 1.0
        neg2[i, b] = 1.0
    counts = pos1.sum(axis=1) + pos2.sum(axis=1)

    inv_tau = 1.0 / cfg.temperature
    e11 = (h1.matmul(h1.T) * inv_tau).exp()
    e12 = (h1.matmul(h2.T) * inv_tau).exp()
    numerator = (e11 * Tensor(pos1.astype(float)) + e12 * Tensor(pos2.astype(float))).sum(axis=1) \
        * Tensor(1.0 / counts)
    denominator = (e11 * Tensor(neg1) + e12 * Tensor(neg2)).sum(axis=1)
    return -(numerator.log() - denominator.log()).mean()


def train_extractor(graphs: list[BrainGraph], partitions: list[ModulePartition],
                    drop_fraction: float, cfg: ContrastiveConfig) -> EncoderParams:
    """InfoNCE descent over fresh augmented view pairs each epoch."""
    if len(graphs) != len(partitions):
        raise ValueError("one partition per graph")
    params = init_encoder(graphs[0].features.shape[1], cfg.hidden_dim,
                          cfg.depth, cfg.seed)
    opt = DecoupledAdam(params.tensors(),
                        OptimConfig(learning_rate=cfg.learning_rate,
                                    weight_decay=0.0, warmup_steps=0))
    for epoch in range(cfg.epochs):
        for gi, (g, part) in enumerate(zip(graphs, partitions)):
            # Fixed arithmetic seed schedule: reproducible and collision-free
            # across (epoch, graph) at any dataset size we run.
            view_seed = cfg.seed + 100_003 * epoch + 2 * gi
            pair = make_views(g, part, drop_fraction, seed=view_seed)
            h1 = encode_tensor(pair.view1, params)
            h2 = encode_tensor(pair.view2, params)
            loss = info_nce_loss(h1, h2, part, cfg, seed=view_seed + 1)
            opt.zero_grad()
            loss.backward()
            opt.step()
    return params


def encoder_to_json(params: EncoderParams) -> dict:
    return {
        "seed": params.seed,
        "layers": [{"weight": w.data.tolist(), "bias": b.data.tolist()}
                   for w, b in params.layers],
    }


def encoder_from_json(obj: dict) -> EncoderParams:
    layers = [(Tensor(layer["weight"]), Tensor(layer["bias"]))
              for layer in obj["layers"]]
    return EncoderParams(layers=layers, seed=int(obj.get("seed", 0)))


def save_encoder(params: EncoderParams, path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(encoder_to_json(params), f)


def load_encoder(path) -> EncoderParams:
    with open(path, encoding="utf-8") as f:
        return encoder_from_json(json.load(f))
