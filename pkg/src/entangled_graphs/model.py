"""Importance-aware graph transformer classifier.

The model stacks attention layers in which the attention weights are computed
from frozen module-contrastive node representations (a kernel smoother over
that embedding space) while the residual stream carries the projected node
features. Layer 1 additionally adds a learnable bucket embedding selected by
each node's entanglement rank. Readout is the node mean, followed by a linear
classifier and softmax.

Two ablations mirror the reference experiments: ``ablate_ne`` skips the
bucket embedding, ``ablate_fm`` computes plain self-attention on the layer
input instead of the contrastive representations.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass

import numpy as np

from .autodiff import Tensor, concat_cols
from .errors import InvalidConfig, ShapeMismatch
from .optim import DecoupledAdam, OptimConfig


@dataclass(frozen=True)
class ModelConfig:
    feature_dim: int
    extractor_dim: int
    hidden_dim: int = 32
    attention_dim: int = 32
    heads: int = 4
    layers: int = 2
    ffn_dim: int = 64
    num_classes: int = 2
    bucket_count: int = 8
    dropout: float = 0.1
    readout: str = "mean"
    learning_rate: float = 3e-4
    weight_decay: float = 1e-4
    warmup_steps: int = 10
    batch_size: int = 128
    epochs: int = 50
    ablate_ne: bool = False
    ablate_fm: bool = False
    seed: int = 0

    def __post_init__(self):
        if self.hidden_dim != self.attention_dim:
            # The residual sum x + attention output forces the two widths
            # to agree.
            raise InvalidConfig("hidden_dim and attention_dim must match")
        if self.attention_dim % self.heads != 0:
            raise InvalidConfig("heads must divide attention_dim")
        if self.layers < 1:
            raise InvalidConfig("need at least one layer")
        if self.readout != "mean":
            raise InvalidConfig("only mean readout is supported")
        if not 0 <= self.dropout < 1:
            raise InvalidConfig("dropout must be in [0, 1)")


@dataclass
class ImportanceEmbeddingTable:
    vectors: Tensor  # bucket_count x hidden_dim

    @property
    def bucket_count(self) -> int:
        return self.vectors.shape[0]


@dataclass
class AttentionLayerParams:
    w_q: Tensor
    w_k: Tensor
    value_map: Tensor
    w_1: Tensor
    w_2: Tensor
    head_count: int


@dataclass
class ModelParams:
    config: ModelConfig
    input_proj: Tensor
    table: ImportanceEmbeddingTable
    layers: list[AttentionLayerParams]
    classifier: Tensor

    def tensors(self) -> list[Tensor]:
        out = [self.input_proj, self.table.vectors]
        for layer in self.layers:
            out.extend([layer.w_q, layer.w_k, layer.value_map, layer.w_1, layer.w_2])
        out.append(self.classifier)
        return out


def init_model(config: ModelConfig) -> ModelParams:
    rng = np.random.Generator(np.random.PCG64(config.seed))

    def glorot(a, b):
        bound = math.sqrt(6.0 / (a + b))
        return Tensor(rng.uniform(-bound, bound, size=(a, b)))

    d = config.hidden_dim
    attn_in = d if config.ablate_fm else config.extractor_dim
    # value map starts at zero so each attention branch begins as the identity
    # residual and only grows as the data demands it
    layers = [AttentionLayerParams(w_q=glorot(attn_in, config.attention_dim),
                                   w_k=glorot(attn_in, config.attention_dim),
                                   value_map=Tensor(np.zeros((attn_in, config.attention_dim))),
                                   w_1=glorot(d, config.ffn_dim),
                                   w_2=glorot(config.ffn_dim, d),
                                   head_count=config.heads)
              for _ in range(config.layers)]
    return ModelParams(config=config,
                       input_proj=glorot(config.feature_dim, d),
                       table=ImportanceEmbeddingTable(vectors=Tensor(np.zeros((config.bucket_count, d)))),
                       layers=layers,
                       classifier=glorot(d, config.num_classes))


def bucket_ids(ne: np.ndarray, bucket_count: int) -> np.ndarray:
    """floor(B * rank / n) with competition ranks, clamped to B-1.

    rank(i) counts nodes with strictly smaller NE, so tied values share a
    bucket and an all-tied vector lands entirely in bucket 0.
    """
    ne = np.asarray(ne, dtype=float)
    n = len(ne)
    order = np.sort(ne)
    ranks = np.searchsorted(order, ne, side="left")
    return np.minimum(bucket_count * ranks // n, bucket_count - 1).astype(int)


def importance_encode(x: Tensor | np.ndarray, ne: np.ndarray,
                      table: ImportanceEmbeddingTable) -> Tensor:
    """Add each node's bucket embedding to its feature row."""
    x = x if isinstance(x, Tensor) else Tensor(x)
    if len(np.asarray(ne)) != x.shape[0]:
        raise ShapeMismatch("one NE value per node is required")
    if table.vectors.shape[1] != x.shape[1]:
        raise ShapeMismatch("table width does not match feature width")
    buckets = bucket_ids(ne, table.bucket_count)
    return x + table.vectors.take_rows(buckets)


def fm_attention(h: Tensor | np.ndarray, params: AttentionLayerParams,
                 heads: int | None = None) -> Tensor:
    """Softmax kernel smoother over rows of h, per head, heads concatenated.

    Head logits are scaled by sqrt of the per-head width; softmax subtracts
    the row max before exponentiation, which changes nothing mathematically
    and prevents overflow.
    """
    h = h if isinstance(h, Tensor) else Tensor(h)
    heads = params.head_count if heads is None else heads
    d_k = params.w_q.shape[1]
    if d_k % heads != 0:
        raise ShapeMismatch("heads must divide the attention width")
    d_head = d_k // heads
    scale = 1.0 / math.sqrt(d_head)
    outputs = []
    for start in range(0, d_k, d_head):
        q = h.matmul(params.w_q.slice_cols(start, start + d_head))
        k = h.matmul(params.w_k.slice_cols(start, start + d_head))
        v = h.matmul(params.value_map.slice_cols(start, start + d_head))
        weights = (q.matmul(k.T) * scale).softmax_rows()
        outputs.append(weights.matmul(v))
    return outputs[0] if len(outputs) == 1 else concat_cols(outputs)


def attention_weight_matrix(h: np.ndarray, params: AttentionLayerParams) -> np.ndarray:
    """Head-averaged n x n attention weights, for inspection/export."""
    d_k = params.w_q.shape[1]
    d_head = d_k // params.head_count
    scale = 1.0 / math.sqrt(d_head)
    acc = np.zeros((h.shape[0], h.shape[0]))
    for start in range(0, d_k, d_head):
        q = h @ params.w_q.data[:, start:start + d_head]
        k = h @ params.w_k.data[:, start:start + d_head]
        logits = q @ k.T * scale
        logits -= logits.max(axis=1, keepdims=True)
        e = np.exp(logits)
        acc += e / e.sum(axis=1, keepdims=True)
    return acc / params.head_count


def _dropout(t: Tensor, rate: float, rng: np.random.Generator | None) -> Tensor:
    if rng is None or rate == 0.0:
        return t
    keep = 1.0 - rate
    mask = (rng.random(t.shape) < keep) / keep
    return t * Tensor(mask)


def model_forward(features: np.ndarray, ne: np.ndarray, h: np.ndarray,
                  params: ModelParams,
                  dropout_rng: np.random.Generator | None = None) -> Tensor:
    """Node representations after all layers; pass an rng only when training."""
    cfg = params.config
    x = Tensor(features).matmul(params.input_proj)
    h_t = None if cfg.ablate_fm else Tensor(np.asarray(h))
    for li, layer in enumerate(params.layers):
        if li == 0 and not cfg.ablate_ne:
            x = importance_encode(x, ne, params.table)
        attn = fm_attention(x if cfg.ablate_fm else h_t, layer)
        attn = _dropout(attn, cfg.dropout, dropout_rng)
        mixed = x + attn
        out = mixed.matmul(layer.w_1).relu().matmul(layer.w_2)
        x = _dropout(out, cfg.dropout, dropout_rng)
    return x


def classify(features: np.ndarray, ne: np.ndarray, h: np.ndarray,
             params: ModelParams,
             dropout_rng: np.random.Generator | None = None) -> Tensor:
    """Class probabilities (1 x num_classes tensor)."""
    reps = model_forward(features, ne, h, params, dropout_rng)
    n = reps.shape[0]
    readout = Tensor(np.full((1, n), 1.0 / n)).matmul(reps)
    return readout.matmul(params.classifier).softmax_rows()


def graph_log_loss(features: np.ndarray, ne: np.ndarray, h: np.ndarray,
                   label: int, params: ModelParams,
                   dropout_rng: np.random.Generator | None = None) -> Tensor:
    """Cross-entropy of one graph against its class label."""
    reps = model_forward(features, ne, h, params, dropout_rng)
    n = reps.shape[0]
    readout = Tensor(np.full((1, n), 1.0 / n)).matmul(reps)
    logits = readout.matmul(params.classifier)
    onehot = np.zeros((1, params.config.num_classes))
    onehot[0, label] = -1.0
    return (logits.log_softmax_rows() * Tensor(onehot)).sum()


@dataclass(frozen=True)
class LipschitzReport:
    measured_max: float
    bound: float
    pairs_used: int
    pairs_skipped: int


def lipschitz_check(h: np.ndarray, params: AttentionLayerParams,
                    n_pairs: int = 1000, seed: int = 0) -> LipschitzReport:
    """Empirical output/input distance ratio vs the analytic constant.

    Bound: sqrt(n/d_K) * C * C_psi * ||W_Q||_inf * ||W_K||_inf, with C the
    operator norm of the value map, C_psi the largest row norm of h, and
    ||.||_inf the induced infinity norm (max absolute row sum).
    """
    h = np.asarray(h, dtype=float)
    n, d_k = h.shape[0], params.w_q.shape[1]
    out = fm_attention(Tensor(h), params).data
    rng = np.random.Generator(np.random.PCG64(seed))
    measured = 0.0
    used = skipped = 0
    for _ in range(n_pairs):
        a, b = rng.integers(0, n, size=2)
        denom = np.linalg.norm(h[a] - h[b])
        if denom < 1e-12:
            skipped += 1
            continue
        used += 1
        ratio = np.linalg.norm(out[a] - out[b]) / denom
        measured = max(measured, ratio)
    c_val = np.linalg.norm(params.value_map.data, 2)
    c_psi = float(np.linalg.norm(h, axis=1).max())
    inf_q = float(np.abs(params.w_q.data).sum(axis=1).max())
    inf_k = float(np.abs(params.w_k.data).sum(axis=1).max())
    bound = math.sqrt(n / d_k) * c_val * c_psi * inf_q * inf_k
    return LipschitzReport(measured_max=measured, bound=bound,
                           pairs_used=used, pairs_skipped=skipped)


@dataclass(frozen=True)
class GraphBundle:
    """Everything the classifier needs for one graph, precomputed."""

    features: np.ndarray
    ne: np.ndarray
    h: np.ndarray
    label: int


def _snapshot(params: ModelParams) -> list[np.ndarray]:
    return [t.data.copy() for t in params.tensors()]


def _restore(params: ModelParams, snap: list[np.ndarray]) -> None:
    for t, data in zip(params.tensors(), snap):
        t.data = data.copy()


def accuracy(params: ModelParams, bundles: list[GraphBundle], idx) -> float:
    correct = 0
    for i in idx:
        b = bundles[i]
        probs = classify(b.features, b.ne, b.h, params).data[0]
        correct += int(np.argmax(probs) == b.label)
    return correct / len(idx) if len(idx) else 0.0


def train_classifier(bundles: list[GraphBundle], train_idx, val_idx,
                     config: ModelConfig) -> tuple[ModelParams, list[dict]]:
    """Minibatch descent on cross-entropy; returns the best-on-validation
    parameters and a per-epoch history."""
    params = init_model(config)
    opt = DecoupledAdam(params.tensors(),
                        OptimConfig(learning_rate=config.learning_rate,
                                    weight_decay=config.weight_decay,
                                    warmup_steps=config.warmup_steps))
    rng = np.random.Generator(np.random.PCG64(config.seed))
    best_snap = _snapshot(params)
    best_val = -1.0
    best_val_loss = math.inf
    history: list[dict] = []
    train_idx = list(train_idx)
    for epoch in range(config.epochs):
        order = rng.permutation(len(train_idx))
        epoch_loss = 0.0
        for start in range(0, len(order), config.batch_size):
            batch = [train_idx[o] for o in order[start:start + config.batch_size]]
            opt.zero_grad()
            losses = []
            for i in batch:
                b = bundles[i]
                losses.append(graph_log_loss(b.features, b.ne, b.h, b.label,
                                             params, dropout_rng=rng))
            total = losses[0]
            for extra in losses[1:]:
                total = total + extra
            total = total * (1.0 / len(batch))
            total.backward()
            opt.step()
            epoch_loss += float(total.data) * len(batch)
        val_acc = accuracy(params, bundles, val_idx)
        val_loss = sum(float(graph_log_loss(bundles[i].features, bundles[i].ne,
                                            bundles[i].h, bundles[i].label,
                                            params).data)
                       for i in val_idx) / max(1, len(val_idx))
        history.append({"epoch": epoch,
                        "train_loss": epoch_loss / max(1, len(train_idx)),
                        "val_acc": val_acc,
                        "val_loss": val_loss})
        # accuracy decides; equal accuracy falls back to the better-calibrated
        # (lower validation loss) checkpoint
        if val_acc > best_val or (val_acc == best_val and val_loss < best_val_loss):
            best_val = val_acc
            best_val_loss = val_loss
            best_snap = _snapshot(params)
    _restore(params, best_snap)
    return params, history


def model_to_json(params: ModelParams) -> dict:
    cfg = params.config
    return {
        "config": {f: getattr(cfg, f) for f in cfg.__dataclass_fields__},
        "input_proj": params.input_proj.data.tolist(),
        "table": params.table.vectors.data.tolist(),
        "layers": [{
            "w_q": l.w_q.data.tolist(), "w_k": l.w_k.data.tolist(),
            "value_map": l.value_map.data.tolist(),
            "w_1": l.w_1.data.tolist(), "w_2": l.w_2.data.tolist(),
            "head_count": l.head_count,
        } for l in params.layers],
        "classifier": params.classifier.data.tolist(),
        "bucket_rule": "floor(bucket_count * competition_rank / n)",
    }


def model_from_json(obj: dict) -> ModelParams:
    config = ModelConfig(**obj["config"])
    layers = [AttentionLayerParams(w_q=Tensor(l["w_q"]), w_k=Tensor(l["w_k"]),
                                   value_map=Tensor(l["value_map"]),
                                   w_1=Tensor(l["w_1"]), w_2=Tensor(l["w_2"]),
                                   head_count=int(l["head_count"]))
              for l in obj["layers"]]
    return ModelParams(config=config,
                       input_proj=Tensor(obj["input_proj"]),
                       table=ImportanceEmbeddingTable(vectors=Tensor(obj["table"])),
                       layers=layers,
                       classifier=Tensor(obj["classifier"]))


def save_model(params: ModelParams, path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(model_to_json(params), f)


def load_model(path) -> ModelParams:
    with open(path, encoding="utf-8") as f:
        return model_from_json(json.load(f))


def heatmap_csv(h: np.ndarray, params: ModelParams, path) -> None:
    """Layer- and head-averaged attention weights as an n x n CSV."""
    mats = [attention_weight_matrix(np.asarray(h), layer) for layer in params.layers]
    avg = np.mean(mats, axis=0)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        for row in avg:
            writer.writerow([repr(float(v)) for v in row])
