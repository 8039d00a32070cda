"""Shared fixtures: random graph generators and an independent distance oracle."""
import numpy as np
import pytest
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import shortest_path

from fastckr.graph import WeightedGraph


def random_connected(rng, n, extra=None, lo=1.0, hi=1.0, log_weights=False):
    """Random spanning tree plus ``extra`` random edges.

    Weights are uniform in [lo, hi], or log-uniform when ``log_weights``.
    """
    rng = np.random.default_rng(rng)

    def weight():
        if log_weights:
            return float(10 ** rng.uniform(np.log10(lo), np.log10(hi)))
        return float(rng.uniform(lo, hi)) if hi > lo else float(lo)

    edges = [(i, int(rng.integers(0, i)), weight()) for i in range(1, n)]
    extra = int(rng.integers(0, 2 * n + 1)) if extra is None else extra
    for _ in range(extra):
        a, b = rng.integers(0, n, 2)
        edges.append((int(a), int(b), weight()))
    return WeightedGraph.from_edges(n, edges)


def cycle(n, w=1.0):
    return WeightedGraph.from_edges(n, [(i, (i + 1) % n, w) for i in range(n)])


def path(n, w=1.0):
    return WeightedGraph.from_edges(n, [(i, i + 1, w) for i in range(n - 1)])


def scipy_metric(g):
    """All-pairs distances computed by scipy, independent of the package."""
    if g.m == 0:
        d = np.full((g.n, g.n), np.inf)
        np.fill_diagonal(d, 0.0)
        return d
    a = coo_matrix((g.w, (g.u, g.v)), shape=(g.n, g.n)).tocsr()
    return shortest_path(a, method="D", directed=False)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
