"""Classical node-importance baselines and node efficiency.

Degree, betweenness, and closeness are computed on the unweighted topology
(an edge exists where weight > 0); eigenvector centrality uses the weighted
adjacency; node efficiency uses weighted shortest paths with edge length 1/w.
"""

from __future__ import annotations

import csv
import heapq
from dataclasses import dataclass

import numpy as np

from .errors import ECNoConvergence, EmptyGraph
from .graphs import BrainGraph


@dataclass(frozen=True)
class CentralityVector:
    kind: str
    values: np.ndarray
    normalized: bool = False

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        v.setflags(write=False)
        object.__setattr__(self, "values", v)


def degree_centrality(g: BrainGraph) -> CentralityVector:
    """Neighbor count per node, ignoring weights."""
    values = (g.adjacency > 0).sum(axis=1).astype(float)
    return CentralityVector(kind="DC", values=values)


def _hop_distances(adj_mask: np.ndarray, source: int) -> np.ndarray:
    """BFS hop counts from source; unreachable nodes get inf."""
    n = adj_mask.shape[0]
    dist = np.full(n, np.inf)
    dist[source] = 0
    frontier = [source]
    d = 0
    while frontier:
        d += 1
        nxt = []
        for u in frontier:
            for v in np.nonzero(adj_mask[u])[0]:
                if dist[v] == np.inf:
                    dist[v] = d
                    nxt.append(int(v))
        frontier = nxt
    return dist


def betweenness_centrality(g: BrainGraph) -> CentralityVector:
    """Unweighted shortest-path betweenness (Brandes accumulation)."""
    n = g.n
    mask = g.adjacency > 0
    neighbors = [np.nonzero(mask[u])[0] for u in range(n)]
    bc = np.zeros(n)
    for s in range(n):
        stack: list[int] = []
        preds: list[list[int]] = [[] for _ in range(n)]
        sigma = np.zeros(n)
        sigma[s] = 1.0
        dist = np.full(n, -1)
        dist[s] = 0
        queue = [s]
        head = 0
        while head < len(queue):
            u = queue[head]
            head += 1
            stack.append(u)
            for v in neighbors[u]:
                if dist[v] < 0:
                    dist[v] = dist[u] + 1
                    queue.append(int(v))
                if dist[v] == dist[u] + 1:
                    sigma[v] += sigma[u]
                    preds[v].append(u)
        delta = np.zeros(n)
        for u in reversed(stack):
            for p in preds[u]:
                delta[p] += sigma[p] / sigma[u] * (1.0 + delta[u])
            if u != s:
                bc[u] += delta[u]
    # Each unordered pair was counted from both endpoints.
    return CentralityVector(kind="BC", values=bc / 2.0)


def closeness_centrality(g: BrainGraph) -> CentralityVector:
    """(n-1) / sum of hop distances; 0 when any node is unreachable."""
    n = g.n
    mask = g.adjacency > 0
    values = np.zeros(n)
    if n > 1:
        for i in range(n):
            dist = _hop_distances(mask, i)
            total = dist.sum() - dist[i]
            if np.isfinite(total) and total > 0:
                values[i] = (n - 1) / total
    return CentralityVector(kind="CC", values=values)


def eigenvector_centrality(g: BrainGraph, tol: float = 1e-10,
                           max_iter: int = 100_000) -> CentralityVector:
    """Principal eigenvector of the weighted adjacency, unit norm.

    Power iteration runs on A + ‖A‖_inf·I, which shares A's eigenvectors but
    cannot oscillate on bipartite graphs.
    """
    n = g.n
    if n == 0:
        raise EmptyGraph("eigenvector centrality needs at least one node")
    a = g.adjacency
    shift = float(np.abs(a).sum(axis=1).max())
    m = a + shift * np.eye(n)
    v = np.ones(n) / np.sqrt(n)
    for it in range(1, max_iter + 1):
        w = m @ v
        norm = np.linalg.norm(w)
        if norm == 0:
            break
        w /= norm
        if np.linalg.norm(w - v) < tol:
            v = w
            break
        v = w
    else:
        raise ECNoConvergence(max_iter)
    v = np.abs(v)
    nv = np.linalg.norm(v)
    if nv > 0:
        v = v / nv
    return CentralityVector(kind="EC", values=v, normalized=True)


def weighted_distances(g: BrainGraph, source: int) -> np.ndarray:
    """Dijkstra with edge length 1/weight; unreachable nodes get inf."""
    n = g.n
    dist = np.full(n, np.inf)
    dist[source] = 0.0
    heap = [(0.0, source)]
    done = np.zeros(n, dtype=bool)
    while heap:
        d, u = heapq.heappop(heap)
        if done[u]:
            continue
        done[u] = True
        row = g.adjacency[u]
        for v in np.nonzero(row > 0)[0]:
            nd = d + 1.0 / row[v]
            if nd < dist[v]:
                dist[v] = nd
                heapq.heappush(heap, (nd, int(v)))
    return dist


def node_efficiency(g: BrainGraph) -> CentralityVector:
    """Mean inverse weighted distance to every other node (0 if unreachable)."""
    n = g.n
    values = np.zeros(n)
    if n > 1:
        for i in range(n):
            dist = weighted_distances(g, i)
            inv = np.zeros(n)
            reachable = np.isfinite(dist) & (dist > 0)
            inv[reachable] = 1.0 / dist[reachable]
            values[i] = inv.sum() / (n - 1)
    return CentralityVector(kind="NEff", values=values)


def fc_strength(correlation: np.ndarray) -> CentralityVector:
    """Mean absolute off-diagonal correlation per row (pre-threshold matrix)."""
    c = np.abs(np.asarray(correlation, dtype=float))
    n = c.shape[0]
    if n < 2:
        return CentralityVector(kind="FCStrength", values=np.zeros(n))
    values = (c.sum(axis=1) - np.diag(c)) / (n - 1)
    return CentralityVector(kind="FCStrength", values=values)


def centrality_csv(g: BrainGraph, path, ne_exact=None, ne_approx=None,
                   correlation=None) -> None:
    """Write the per-node comparison table used by the importance-curve plots."""
    n = g.n
    cols = {
        "DC": degree_centrality(g).values,
        "BC": betweenness_centrality(g).values,
        "CC": closeness_centrality(g).values,
        "EC": eigenvector_centrality(g).values,
        "NEff": node_efficiency(g).values,
    }
    if correlation is None:
        correlation = g.features if g.features.shape == (n, n) else np.zeros((n, n))
    cols["FCStrength"] = fc_strength(correlation).values
    cols["NE_exact"] = np.zeros(n) if ne_exact is None else np.asarray(ne_exact)
    cols["NE_approx"] = np.zeros(n) if ne_approx is None else np.asarray(ne_approx)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(["node", "DC", "BC", "CC", "EC", "NEff", "FCStrength",
                         "NE_exact", "NE_approx"])
        for i in range(n):
            writer.writerow([i] + [repr(float(cols[k][i])) for k in
                                   ("DC", "BC", "CC", "EC", "NEff",
                                    "FCStrength", "NE_exact", "NE_approx")])
