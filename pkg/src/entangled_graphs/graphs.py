"""Weighted graph core: correlation ingestion, Laplacians, and JSON/CSV interfaces.

A graph is built either from an ROI time-series matrix (edges are Pearson
correlations at or above a threshold) or synthetically. Node features default
to the node's full unthresholded correlation row, so the feature dimension
equals the node count.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import ZeroVarianceColumn


@dataclass(frozen=True)
class TimeSeriesMatrix:
    """T x n signal matrix: T time points for n ROIs."""

    values: np.ndarray
    roi_names: list[str] | None = None

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 2 or v.shape[0] < 2:
            raise ValueError("time series must be a T x n matrix with T >= 2")
        if not np.all(np.isfinite(v)):
            raise ValueError("time series contains non-finite values")
        if self.roi_names is not None and len(self.roi_names) != v.shape[1]:
            raise ValueError("roi_names length does not match column count")
        object.__setattr__(self, "values", v)

    @property
    def n_rois(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class BrainGraph:
    """Weighted undirected graph with node features.

    ``adjacency`` is symmetric with zero diagonal and non-negative finite
    weights; ``features`` is n x d. Arrays are frozen after construction.
    ``metadata`` may carry generator ground truth (module labels, hubs, class).
    """

    adjacency: np.ndarray
    features: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        a = np.asarray(self.adjacency, dtype=float)
        x = np.asarray(self.features, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("adjacency must be square")
        if x.ndim != 2 or x.shape[0] != a.shape[0]:
            raise ValueError("features must have one row per node")
        if not np.all(np.isfinite(a)):
            raise ValueError("adjacency contains non-finite values")
        if not np.all(np.isfinite(x)):
            raise ValueError("features contain non-finite values")
        if np.any(a < 0):
            raise ValueError("negative edge weights are not supported")
        if np.any(np.diag(a) != 0):
            raise ValueError("adjacency diagonal must be zero")
        if not np.array_equal(a, a.T):
            raise ValueError("adjacency must be symmetric")
        a = a.copy()
        x = x.copy()
        a.setflags(write=False)
        x.setflags(write=False)
        object.__setattr__(self, "adjacency", a)
        object.__setattr__(self, "features", x)

    @property
    def n(self) -> int:
        return self.adjacency.shape[0]

    @property
    def m(self) -> int:
        """Number of unordered node pairs with positive weight."""
        return int(np.count_nonzero(np.triu(self.adjacency, k=1) > 0))

    def edges(self) -> list[tuple[int, int, float]]:
        """Edge list as (i, j, weight) with i < j, sorted lexicographically."""
        ii, jj = np.nonzero(np.triu(self.adjacency, k=1) > 0)
        return [(int(i), int(j), float(self.adjacency[i, j])) for i, j in zip(ii, jj)]

    def neighbors(self, i: int) -> np.ndarray:
        return np.nonzero(self.adjacency[i] > 0)[0]


def pearson_matrix(ts: TimeSeriesMatrix) -> np.ndarray:
    """Full Pearson correlation matrix of the ROI columns, clipped to [-1, 1]."""
    v = ts.values
    std = v.std(axis=0)
    for idx in np.nonzero(std == 0)[0]:
        raise ZeroVarianceColumn(int(idx))
    corr = np.corrcoef(v, rowvar=False)
    # BLAS matmul output is not bit-symmetric; downstream code asserts
    # exact symmetry of adjacency matrices
    corr = (corr + corr.T) / 2.0
    return np.clip(corr, -1.0, 1.0)


def pearson_graph(ts: TimeSeriesMatrix, threshold: float, identity_features: bool = False) -> BrainGraph:
    """Correlation graph: edges keep pairwise PCC values at or above ``threshold``.

    Features are the full unthresholded correlation rows (connection
    profiles), or the identity matrix when ``identity_features`` is set.
    Thresholds below zero would admit negative edge weights and are rejected.
    """
    if threshold < 0:
        raise ValueError("threshold must be >= 0; negative weights are not supported")
    corr = pearson_matrix(ts)
    adjacency = np.where(corr >= threshold, corr, 0.0)
    np.fill_diagonal(adjacency, 0.0)
    n = adjacency.shape[0]
    features = np.eye(n) if identity_features else corr.copy()
    return BrainGraph(adjacency=adjacency, features=features)


def laplacian(g: BrainGraph) -> np.ndarray:
    """Combinatorial Laplacian L = D - A with D the weighted degree matrix."""
    a = g.adjacency
    return np.diag(a.sum(axis=1)) - a


def load_timeseries_csv(path) -> TimeSeriesMatrix:
    """Read a time-series CSV: header of ROI names, one row per time point."""
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.reader(f)
        rows = list(reader)
    if len(rows) < 3:
        raise ValueError("need a header row and at least two time points")
    header = [c.strip() for c in rows[0]]
    data = []
    for r, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise ValueError(f"row {r} has {len(row)} cells, expected {len(header)}")
        try:
            data.append([float(c) for c in row])
        except ValueError as exc:
            raise ValueError(f"row {r} contains a non-numeric cell") from exc
    return TimeSeriesMatrix(values=np.asarray(data), roi_names=header)


def graph_to_json(g: BrainGraph) -> dict:
    """Graph wire format: {"n": ..., "edges": [[i, j, w], ...], "features": [...]}."""
    return {
        "n": g.n,
        "edges": [[i, j, w] for i, j, w in g.edges()],
        "features": g.features.tolist(),
    }


def graph_from_json(obj: dict) -> BrainGraph:
    n = int(obj["n"])
    adjacency = np.zeros((n, n))
    for i, j, w in obj["edges"]:
        if not (0 <= i < j < n):
            raise ValueError(f"bad edge indices ({i}, {j})")
        adjacency[i, j] = adjacency[j, i] = float(w)
    features = np.asarray(obj["features"], dtype=float)
    metadata = dict(obj.get("metadata", {}))
    return BrainGraph(adjacency=adjacency, features=features, metadata=metadata)


def save_graph(g: BrainGraph, path) -> None:
    obj = graph_to_json(g)
    if g.metadata:
        obj["metadata"] = g.metadata
    with open(path, "w", encoding="utf-8") as f:
        json.dump(obj, f)


def load_graph(path) -> BrainGraph:
    with open(path, encoding="utf-8") as f:
        return graph_from_json(json.load(f))
