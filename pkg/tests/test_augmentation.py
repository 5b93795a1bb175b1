import numpy as np
import pytest

from entangled_graphs.augmentation import (LowestFirst, WeightedRandom,
                                           drop_edges, make_views, score_edges)
from entangled_graphs.community import ModulePartition, modularity

from conftest import graph_from_adjacency, random_graph


def partition_for(g, labels):
    seen: dict[int, int] = {}
    dense = [seen.setdefault(c, len(seen)) for c in labels]
    return ModulePartition(assignment=tuple(dense), k=len(seen),
                           Q=modularity(g, dense))


def bridged_cliques(intra_w=1.0, bridge_w=0.9):
    # two 4-cliques joined by two cross edges
    a = np.zeros((8, 8))
    for block in (range(4), range(4, 8)):
        for i in block:
            for j in block:
                if i != j:
                    a[i, j] = intra_w
    a[0, 4] = a[4, 0] = bridge_w
    a[3, 7] = a[7, 3] = bridge_w
    return graph_from_adjacency(a)


def test_score_order_law():
    # every intra score strictly above every inter score, whatever the weights
    rng = np.random.default_rng(0)
    for seed in range(20):
        g = random_graph(10, seed=seed)
        labels = rng.integers(0, 3, size=10)
        scores = score_edges(g, partition_for(g, labels))
        intra = [s.score for s in scores if s.intra]
        inter = [s.score for s in scores if not s.intra]
        if intra and inter:
            assert min(intra) > max(inter)


def test_score_values():
    g = bridged_cliques(intra_w=2.0, bridge_w=0.5)
    scores = score_edges(g, partition_for(g, [0] * 4 + [1] * 4))
    by_edge = {s.edge: s for s in scores}
    assert by_edge[(0, 1)].score == pytest.approx(2.0 + 2.0)
    assert by_edge[(0, 4)].score == pytest.approx(0.5 - 2.0)
    assert by_edge[(0, 1)].intra and not by_edge[(0, 4)].intra


def test_lowest_first_takes_bridges_first():
    g = bridged_cliques()
    p = partition_for(g, [0] * 4 + [1] * 4)
    view, dropped = drop_edges(g, p, drop_fraction=0.15, mode=LowestFirst())
    # m = 14, floor(0.15 * 14) = 2: exactly the two bridges
    assert set(dropped) == {(0, 4), (3, 7)}
    assert view.adjacency[0, 4] == 0.0 and view.adjacency[3, 7] == 0.0
    assert view.adjacency[0, 1] == 1.0


def test_drop_count_is_floored():
    g = random_graph(12, seed=3)
    p = partition_for(g, [i % 2 for i in range(12)])
    for frac in (0.0, 0.1, 0.25, 0.5, 0.99):
        _, dropped = drop_edges(g, p, frac, LowestFirst())
        assert len(dropped) == int(np.floor(frac * g.m))


def test_zero_drop_returns_identical_view():
    g = random_graph(9, seed=1)
    p = partition_for(g, [0] * 9)
    view, dropped = drop_edges(g, p, 0.0, WeightedRandom(7))
    assert dropped == ()
    assert np.array_equal(view.adjacency, g.adjacency)
    assert np.array_equal(view.features, g.features)


def test_fraction_bounds():
    g = random_graph(6, seed=0)
    p = partition_for(g, [0] * 6)
    for bad in (-0.1, 1.0, 1.5):
        with pytest.raises(ValueError):
            drop_edges(g, p, bad)


def test_weighted_random_is_deterministic_per_seed():
    g = random_graph(15, seed=8, p=0.5)
    p = partition_for(g, [i % 3 for i in range(15)])
    _, d1 = drop_edges(g, p, 0.3, WeightedRandom(5))
    _, d2 = drop_edges(g, p, 0.3, WeightedRandom(5))
    _, d3 = drop_edges(g, p, 0.3, WeightedRandom(6))
    assert d1 == d2
    assert d1 != d3


def test_intra_edges_mostly_survive_sampling():
    # over many seeds the sampler must prefer cross-module edges
    g = bridged_cliques()
    p = partition_for(g, [0] * 4 + [1] * 4)
    intra_total = 12 * 100
    intra_dropped = 0
    for seed in range(100):
        _, dropped = drop_edges(g, p, 0.2, WeightedRandom(seed))
        intra_dropped += sum(1 for (i, j) in dropped
                             if (i < 4) == (j < 4))
    assert intra_dropped / intra_total < 0.05


def test_views_differ_and_preserve_shape():
    g = random_graph(14, seed=2, p=0.5)
    p = partition_for(g, [i % 2 for i in range(14)])
    pair = make_views(g, p, drop_fraction=0.3, seed=0)
    assert pair.view1.n == pair.view2.n == g.n
    assert len(pair.dropped1) == len(pair.dropped2) == int(np.floor(0.3 * g.m))
    assert pair.dropped1 != pair.dropped2
    # original graph untouched
    for i, j in pair.dropped1:
        assert g.adjacency[i, j] > 0
    again = make_views(g, p, drop_fraction=0.3, seed=0)
    assert again.dropped1 == pair.dropped1 and again.dropped2 == pair.dropped2


def test_partition_must_cover_graph():
    g = random_graph(5, seed=0)
    short = ModulePartition(assignment=(0, 0, 1), k=2, Q=0.0)
    with pytest.raises(ValueError):
        score_edges(g, short)
