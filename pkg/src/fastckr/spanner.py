"""Randomized (2k-1)-spanners by cluster sampling (Baswana and Sen)."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import WeightedGraph


@dataclass(frozen=True, eq=False)
class Spanner:
    """Kept edges of the input graph.  ``kept`` indexes the input edge arrays."""

    graph: WeightedGraph
    kept: np.ndarray
    k: int

    @property
    def stretch(self) -> int:
        return 2 * self.k - 1


def baswana_sen(g: WeightedGraph, k: int, rng=None) -> Spanner:
    """Sample a (2k-1)-spanner with O(k n^{1+1/k}) edges in expectation.

    Runs ``k-1`` clustering rounds.  In each round every cluster survives
    with probability ``n^{-1/k}``; a vertex of a dropped cluster joins the
    nearest surviving neighbor cluster (keeping that edge and one lightest
    edge to every strictly closer cluster) or, if it sees none, keeps one
    lightest edge to each neighboring cluster and leaves the clustering.
    A final pass keeps one lightest edge from every vertex to every
    neighboring cluster.  Ties between equal weights go to the lower
    vertex id.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    rng = np.random.default_rng(rng)
    n = g.n
    index = {(a, b): e for e, (a, b) in enumerate(zip(g.u.tolist(), g.v.tolist()))}
    adj: list[dict[int, float]] = [dict() for _ in range(n)]
    for a, b, wt in g.edges():
        adj[a][b] = wt
        adj[b][a] = wt
    cluster = list(range(n))
    keep: set[int] = set()

    def take(a, b):
        keep.add(index[(a, b) if a < b else (b, a)])

    def lightest(v):
        """Per neighboring cluster, the lightest edge from v as (w, u)."""
        best: dict[int, tuple[float, int]] = {}
        for u, wt in adj[v].items():
            c = cluster[u]
            cand = (wt, u)
            if c not in best or cand < best[c]:
                best[c] = cand
        return best

    prob = n ** (-1.0 / k) if n else 0.0
    for _ in range(k - 1):
        centers = sorted({c for c in cluster if c >= 0})
        draws = rng.random(len(centers))
        sampled = {c for c, r in zip(centers, draws) if r < prob}
        new_cluster = [c if c in sampled else -1 for c in cluster]
        drop: list[tuple[int, int]] = []
        for v in range(n):
            c_v = cluster[v]
            if c_v < 0 or c_v in sampled:
                continue
            best = lightest(v)
            near = [(best[c], c) for c in best if c in sampled]
            if not near:
                for c, (wt, u) in best.items():
                    take(v, u)
                    drop.extend((v, x) for x in adj[v] if cluster[x] == c)
                continue
            (w_star, u_star), c_star = min(near)
            take(v, u_star)
            new_cluster[v] = c_star
            for c, (wt, u) in best.items():
                if c == c_star:
                    drop.extend((v, x) for x in adj[v] if cluster[x] == c)
                elif (wt, u) < (w_star, u_star):
                    take(v, u)
                    drop.extend((v, x) for x in adj[v] if cluster[x] == c)
        for a, b in drop:
            adj[a].pop(b, None)
            adj[b].pop(a, None)
        cluster = new_cluster
        for v in range(n):
            if cluster[v] < 0:
                for x in list(adj[v]):
                    adj[x].pop(v, None)
                adj[v].clear()
                continue
            same = [x for x in adj[v] if cluster[x] == cluster[v]]
            for x in same:
                adj[v].pop(x)
                adj[x].pop(v)

    for v in range(n):
        for c, (wt, u) in lightest(v).items():
            take(v, u)

    kept = np.array(sorted(keep), dtype=np.int64)
    sub = np.zeros(g.m, dtype=bool)
    sub[kept] = True
    return Spanner(g.subgraph(sub), kept, k)
