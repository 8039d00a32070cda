"""
Sparse spanners of a dense metric
=================================

Sparsify a complete Euclidean graph and check the stretch of every edge.
"""
import numpy as np
from scipy.spatial.distance import cdist

from fastckr import WeightedGraph, baswana_sen, exact_metric, oracle_from_matrix, query_many

rng = np.random.default_rng(4)
pts = rng.random((150, 2))
dist = cdist(pts, pts)
iu = np.triu_indices(150, 1)
g = WeightedGraph.from_arrays(150, iu[0], iu[1], dist[iu])

for k in (1, 2, 3, 4):
    sp = baswana_sen(g, k, rng=k)
    ds = exact_metric(sp.graph)
    worst = (ds[iu] / dist[iu]).max()
    print(f"k={k}: kept {sp.graph.m:5d} of {g.m} edges, worst stretch {worst:.3f} (bound {2 * k - 1})")

# the dense-input oracle goes through a 5-spanner first
o = oracle_from_matrix(dist, 2, rng=0)
r = query_many(o, *iu) / dist[iu]
print(f"oracle from matrix: stretch in [{r.min():.2f}, {r.max():.1f}], bound {o.stretch_bound:g}")
