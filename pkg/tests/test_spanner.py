import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fastckr.graph import WeightedGraph
from fastckr.spanner import baswana_sen
from conftest import random_connected, scipy_metric


def complete(n, rng=None):
    rng = np.random.default_rng(rng)
    iu, ju = np.triu_indices(n, 1)
    w = np.ones(len(iu)) if rng is None else rng.uniform(1, 10, len(iu))
    return WeightedGraph.from_arrays(n, iu, ju, w)


def edge_stretch(g, sp):
    d = scipy_metric(sp.graph)
    return (d[g.u, g.v] / g.w).max() if g.m else 1.0


def test_k1_keeps_everything():
    g = random_connected(1, 50, lo=1, hi=5)
    sp = baswana_sen(g, 1, 0)
    assert sp.graph.edges() == g.edges()


@pytest.mark.parametrize("k", [1, 2, 3, 5])
def test_tree_keeps_all_edges(k):
    g = random_connected(k, 80, extra=0, lo=1, hi=5)
    for seed in range(5):
        assert baswana_sen(g, k, seed).graph.m == g.m


def test_k64_unit():
    g = complete(64)
    sizes = []
    for seed in range(20):
        sp = baswana_sen(g, 3, seed)
        assert edge_stretch(g, sp) <= 5
        sizes.append(sp.graph.m)
    assert np.mean(sizes) <= 3 * 64 ** (4 / 3)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 200), st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_random_stretch(n, k, seed):
    g = random_connected(seed, n, lo=0.1, hi=10)
    sp = baswana_sen(g, k, seed)
    assert sp.stretch == 2 * k - 1
    assert edge_stretch(g, sp) <= 2 * k - 1 + 1e-12
    assert np.all(np.isin(sp.kept, np.arange(g.m)))


def test_weighted_complete_stretch():
    g = complete(80, 3)
    for k in (2, 3):
        sp = baswana_sen(g, k, k)
        assert edge_stretch(g, sp) <= 2 * k - 1
        assert sp.graph.m < g.m


def test_preserves_components():
    g = WeightedGraph.from_edges(6, [(0, 1, 1), (1, 2, 2), (0, 2, 1), (3, 4, 1), (4, 5, 1), (3, 5, 3)])
    sp = baswana_sen(g, 2, 0)
    d = scipy_metric(sp.graph)
    assert np.isfinite(d[0, 2]) and np.isfinite(d[3, 5]) and np.isinf(d[0, 3])


def test_deterministic():
    g = random_connected(4, 100, lo=1, hi=2)
    assert baswana_sen(g, 3, 8).kept.tolist() == baswana_sen(g, 3, 8).kept.tolist()


def test_bad_k():
    with pytest.raises(ValueError):
        baswana_sen(complete(3), 0)
