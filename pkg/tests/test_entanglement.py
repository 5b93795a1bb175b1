import math

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from entangled_graphs.entanglement import (AttachControl, Ground, Isolate,
                                           entanglement_report,
                                           mode_from_name, mode_name,
                                           node_entanglement_approx,
                                           node_entanglement_exact, perturb,
                                           report_to_json, spectral_summary,
                                           summary_from_eigenvalues)
from entangled_graphs.errors import DegenerateDenominator, EmptyGraph
from entangled_graphs.graphs import laplacian

from conftest import (complete_graph, graph_from_adjacency, path_graph,
                      random_graph, star_graph)

# Hand-computed two-node fixture: L eigenvalues are {0, 2w}. With w = 1 and
# gamma = 0.5, Z = 1 + e^-1 and the two-point density has these frozen values.
K2_Z = 1.3678794411714423
K2_ENTROPY = 0.8399415379831693


def edgeless(n):
    return graph_from_adjacency(np.zeros((n, n)))


def test_two_node_closed_form():
    summary = spectral_summary(laplacian(complete_graph(2)), gamma=0.5)
    assert summary.partition_function == pytest.approx(K2_Z, abs=1e-14)
    assert summary.entropy == pytest.approx(K2_ENTROPY, abs=1e-14)
    assert summary.component_count == 1
    assert np.allclose(np.sort(summary.eigenvalues), [0.0, 2.0], atol=1e-12)


def test_edgeless_summary():
    summary = spectral_summary(laplacian(edgeless(4)), gamma=1.0)
    assert summary.partition_function == pytest.approx(4.0, abs=1e-14)
    assert summary.entropy == pytest.approx(2.0, abs=1e-14)
    assert summary.component_count == 4
    assert np.allclose(summary.density_spectrum, 0.25)


def test_summary_rejects_bad_inputs():
    with pytest.raises(ValueError):
        spectral_summary(np.zeros((2, 2)), gamma=0.0)
    with pytest.raises(EmptyGraph):
        summary_from_eigenvalues(np.array([]), gamma=1.0)


def test_entropy_matches_matrix_exponential_oracle():
    # independent route: form rho = expm(-gamma L)/Z explicitly and take the
    # von Neumann entropy from its eigenvalues
    for seed in range(10):
        rng = np.random.default_rng(seed)
        g = random_graph(int(rng.integers(3, 21)), seed=seed)
        gamma = float(rng.uniform(0.05, 4.0))
        expL = scipy.linalg.expm(-gamma * laplacian(g))
        rho = expL / np.trace(expL)
        lam = np.linalg.eigvalsh(rho)
        lam = lam[lam > 1e-15]
        want = float(-(lam * np.log2(lam)).sum())
        got = spectral_summary(laplacian(g), gamma)
        assert got.entropy == pytest.approx(want, abs=1e-8)
        assert got.partition_function == pytest.approx(np.trace(expL), rel=1e-10)


def test_exact_entanglement_definition():
    g = star_graph(5)
    gamma = 0.7
    base = spectral_summary(laplacian(g), gamma).entropy
    ne = node_entanglement_exact(g, gamma, Ground(1.0))
    for i in range(g.n):
        s_i = spectral_summary(perturb(g, i, Ground(1.0)), gamma).entropy
        assert ne[i] == pytest.approx(abs(s_i - base), abs=1e-12)


def test_approx_matches_reference_transcription():
    # fresh transcription of the surrogate, evaluated next to the library
    for seed in range(8):
        g = random_graph(9, seed=seed)
        gamma = 0.5
        base = spectral_summary(laplacian(g), gamma)
        n, m, alpha, z = g.n, g.m, base.component_count, base.partition_function
        got = node_entanglement_approx(g, gamma, Ground(1.0))
        for i in range(n):
            eigs = np.linalg.eigvalsh(perturb(g, i, Ground(1.0)))
            z_i = float(np.exp(-gamma * eigs).sum())
            lead = 2.0 * m * gamma * n * n / (math.log(2.0) * (n - alpha) ** 2)
            want = abs(lead * (z_i - z) / (z * z_i) + math.log2(z_i / z))
            assert got[i] == pytest.approx(want, abs=1e-9)


def test_perturbation_laplacians():
    g = path_graph(4)
    L = laplacian(g)
    grounded = perturb(g, 2, Ground(0.25))
    assert grounded[2, 2] == pytest.approx(L[2, 2] + 0.25)
    grounded[2, 2] = L[2, 2]
    assert np.array_equal(grounded, L)

    isolated = perturb(g, 1, Isolate())
    assert np.all(isolated[1, :] == 0) and np.all(isolated[:, 1] == 0)
    assert isolated[0, 0] == 0.0  # node 0 lost its only neighbour

    attached = perturb(g, 0, AttachControl(2.0))
    assert attached.shape == (5, 5)
    assert attached[0, 4] == -2.0 and attached[4, 4] == 2.0
    assert np.allclose(attached.sum(axis=1), 0.0)


def test_mode_validation_and_names():
    with pytest.raises(ValueError):
        Ground(0.0)
    with pytest.raises(ValueError):
        AttachControl(-1.0)
    with pytest.raises(ValueError):
        mode_from_name("melt")
    assert mode_name(mode_from_name("ground", delta=0.5)) == "ground"
    assert mode_name(mode_from_name("isolate")) == "isolate"
    assert mode_from_name("attach", weight=3.0).weight == 3.0


def test_edgeless_isolate_is_all_zero_with_ties():
    report = entanglement_report(edgeless(5), gamma=1.0, mode=Isolate())
    assert np.all(report.exact == 0.0)
    assert np.all(report.approximate == 0.0)
    assert np.all(report.delta_z == 0.0)
    assert report.ties is True


def test_edgeless_ground_degenerates():
    with pytest.raises(DegenerateDenominator):
        node_entanglement_approx(edgeless(4), gamma=1.0, mode=Ground(1.0))
    # the exact route has no denominator and stays defined
    exact = node_entanglement_exact(edgeless(4), gamma=1.0, mode=Ground(1.0))
    assert np.all(np.isfinite(exact)) and np.all(exact > 0)


def test_report_consistency_and_json():
    g = star_graph(6)
    report = entanglement_report(g, gamma=0.5, mode=Ground(1.0))
    assert np.allclose(report.exact, node_entanglement_exact(g, 0.5, Ground(1.0)))
    assert np.allclose(report.approximate,
                       node_entanglement_approx(g, 0.5, Ground(1.0)))
    payload = report_to_json(report)
    assert set(payload) == {"gamma", "mode", "exact", "approx", "spearman", "ties"}
    assert payload["mode"] == "ground"
    assert len(payload["exact"]) == g.n
    assert payload["ties"] is False
    assert -1.0 <= payload["spearman"] <= 1.0


def test_attach_mode_runs_on_larger_spectrum():
    g = complete_graph(4)
    report = entanglement_report(g, gamma=1.0, mode=AttachControl(1.0))
    assert report.mode == "attach"
    assert np.all(report.exact >= 0)
    # complete graph is vertex transitive so all nodes must agree
    assert np.ptp(report.exact) < 1e-10
    assert np.ptp(report.approximate) < 1e-10


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=2, max_value=12), st.integers(min_value=0, max_value=10**6),
       st.floats(min_value=0.01, max_value=8.0))
def test_entropy_and_density_bounds(n, seed, gamma):
    g = random_graph(n, seed=seed)
    summary = spectral_summary(laplacian(g), gamma)
    assert -1e-12 <= summary.entropy <= math.log2(n) + 1e-12
    assert summary.partition_function > 0
    assert np.all(summary.density_spectrum >= 0)
    assert float(summary.density_spectrum.sum()) == pytest.approx(1.0, abs=1e-12)
    assert 1 <= summary.component_count <= n


def test_small_gamma_limit_is_uniform():
    g = random_graph(10, seed=3)
    summary = spectral_summary(laplacian(g), gamma=1e-9)
    assert summary.entropy == pytest.approx(math.log2(10), abs=1e-6)


def test_entropy_monotone_in_gamma():
    for seed in range(5):
        g = random_graph(8, seed=seed)
        entropies = [spectral_summary(laplacian(g), float(gamma)).entropy
                     for gamma in (1, 2, 4, 8, 16, 32, 64)]
        assert all(a >= b - 1e-12 for a, b in zip(entropies, entropies[1:]))


def test_node_index_bounds():
    with pytest.raises(IndexError):
        perturb(path_graph(3), 3, Ground(1.0))
    with pytest.raises(IndexError):
        perturb(path_graph(3), -1, Isolate())
