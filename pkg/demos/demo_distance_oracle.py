"""
Approximate distance oracle
===========================

Build an oracle for a sparse road-like graph, save it, load it back and
compare its answers with exact distances.
"""
import os
import tempfile

import numpy as np

from fastckr import DistanceOracle, build_oracle, exact_metric, query_many
from fastckr.cli import geometric_graph

g = geometric_graph(400, 2)
d = exact_metric(g)
iu = np.triu_indices(g.n, 1)

for k in (1, 2, 3):
    o = build_oracle(g, k, rng=k)
    ratio = query_many(o, *iu) / d[iu]
    print(f"k={k}: {len(o.levels)} levels, {o.storage} tree nodes, "
          f"stretch in [{ratio.min():.2f}, {ratio.max():.1f}], median {np.median(ratio):.1f}, "
          f"guarantee {o.stretch_bound:g}")

path = os.path.join(tempfile.mkdtemp(), "oracle.bin")
o.save(path)
back = DistanceOracle.load(path)
print(f"snapshot {os.path.getsize(path)} bytes, answers identical:",
      np.array_equal(query_many(back, *iu), query_many(o, *iu)))
