"""FRT probabilistic embeddings into ultrametrics."""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .graph import WeightedGraph, exact_metric, is_connected
from .hierarchy import hierarchy_to_ultrametric, sample_hierarchy
from .scales import ScaleFamily, build_scale_family
from .ultrametric import UltrametricTree


def sample_frt(g: WeightedGraph, rng=None, family: Optional[ScaleFamily] = None) -> UltrametricTree:
    """One ultrametric from the FRT distribution of the graph metric.

    Every sample dominates the graph metric.  Pass ``family`` to skip
    rebuilding the scale family when drawing many samples.
    """
    if g.n == 0:
        raise ValueError("empty graph")
    if g.n == 1:
        return UltrametricTree(np.array([-1]), np.array([0.0]), np.array([0]))
    if family is None:
        if not is_connected(g):
            raise ValueError("FRT embedding needs a connected graph")
        family = build_scale_family(g)
    h, _ = sample_hierarchy(g, None, rng, family=family)
    return hierarchy_to_ultrametric(h)


def ultra_distance(t: UltrametricTree, x: int, y: int) -> float:
    return t.distance(x, y)


@dataclass
class DistortionReport:
    """Mean stretch ``E[ν(x,y)] / ρ(x,y)`` of every pair over the samples."""

    n: int
    samples: int
    mean_stretch: np.ndarray
    min_stretch: float

    @property
    def distortion(self) -> float:
        """Largest mean stretch over pairs (the empirical ``D``)."""
        iu = np.triu_indices(self.n, 1)
        return float(self.mean_stretch[iu].max()) if len(iu[0]) else 1.0

    def to_jsonl(self) -> str:
        rows = []
        for x, y in zip(*np.triu_indices(self.n, 1)):
            rows.append(json.dumps({"x": int(x), "y": int(y), "mean_stretch": float(self.mean_stretch[x, y])}))
        rows.append(json.dumps({
            "n": self.n, "samples": self.samples,
            "distortion": self.distortion, "min_stretch": self.min_stretch,
        }))
        return "\n".join(rows) + "\n"


def empirical_distortion(g: WeightedGraph, samples: int, rng=None) -> DistortionReport:
    """Average stretch of ``samples`` independent FRT trees, pair by pair."""
    rng = np.random.default_rng(rng)
    dist = exact_metric(g)
    if not np.all(np.isfinite(dist)):
        raise ValueError("FRT embedding needs a connected graph")
    n = g.n
    total = np.zeros((n, n))
    lowest = np.inf
    off = ~np.eye(n, dtype=bool)
    family = build_scale_family(g) if g.m else None
    for _ in range(samples):
        t = sample_frt(g, rng, family)
        nu = t.matrix(np.arange(n))
        if n > 1:
            ratio = nu[off] / dist[off]
            lowest = min(lowest, float(ratio.min()))
        total += nu
    mean = np.ones((n, n))
    mean[off] = total[off] / samples / dist[off]
    return DistortionReport(n, samples, mean, lowest if n > 1 else 1.0)
