"""
Hierarchical partitions without the spread
==========================================

Weights here span nine orders of magnitude.  Only the scales where some
edge weight lives are processed, so the work does not depend on the spread.
"""
import numpy as np

from fastckr import WeightedGraph, build_scale_family, sample_hierarchy

rng = np.random.default_rng(0)
n = 200
edges = [(i, int(rng.integers(0, i)), float(10 ** rng.uniform(-3, 6))) for i in range(1, n)]
edges += [(int(a), int(b), float(10 ** rng.uniform(-3, 6))) for a, b in rng.integers(0, n, (300, 2))]
g = WeightedGraph.from_edges(n, edges)

family = build_scale_family(g)
print(f"{len(family.levels)} processed scales, from 8^{family.levels[-1].j} to 8^{family.top}")
print(f"total size of all G_j: {family.total_size} (m log2 n = {g.m * np.log2(n):.0f})")
print("  j  |V_j| |E_j|")
for lv in family.levels[:8]:
    print(f"{lv.j:4d} {lv.graph.n:5d} {lv.graph.m:5d}")

h, parts = sample_hierarchy(g, rng=1, family=family)
h.check()
print(f"tree with {h.size} nodes over {n} leaves")

# coarser scales have fewer blocks, and every block refines its parent
for j in range(family.top, family.top - 12, -3):
    print(f"scale 8^{j}: {len(h.blocks(j))} blocks")
