"""
Tree embeddings of a cycle
==========================

Every sampled ultrametric dominates the cycle metric, and on average the
stretch of each pair grows like log n.
"""
import math

import numpy as np

from fastckr import empirical_distortion, sample_frt
from fastckr.cli import cycle_graph

g = cycle_graph(32)
t = sample_frt(g, rng=5)
print(f"one tree: {t.size} nodes, d(0,1) = {t.distance(0, 1):g}, d(0,16) = {t.distance(0, 16):g}")

for n in (8, 16, 32, 64):
    rep = empirical_distortion(cycle_graph(n), samples=300, rng=n)
    print(f"C_{n:<3d} mean-stretch max {rep.distortion:6.2f}   "
          f"/log2 n = {rep.distortion / math.log2(n):.2f}   min ratio {rep.min_stretch:.2f}")
