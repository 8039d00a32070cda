"""Sampling Δ-bounded CKR partitions.

Two samplers produce the same partition for a fixed permutation of centers
and radius: :func:`ckr_partition_metric` scans a full distance matrix in
O(n²), while :func:`ckr_partition_graph_with` runs one truncated Dijkstra per
center and never resets the tentative distances between centers, so a vertex
is only touched again when a later center is strictly closer to it.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass
from math import inf
from typing import Optional, Sequence

import numpy as np

from .graph import WeightedGraph


@dataclass(frozen=True, eq=False)
class Partition:
    """Block rank of every vertex.

    ``block[v]`` is the 1-based rank (in ``centers``) of the first center
    within ``radius`` of ``v``.  A rank of 0 only occurs when the centers
    are a strict subset of the vertices and nobody captured ``v``.
    """

    block: np.ndarray
    centers: np.ndarray
    radius: float
    scale: float
    seed: Optional[int] = None

    @property
    def n(self) -> int:
        return len(self.block)

    def blocks(self) -> list[list[int]]:
        """Vertex lists of the nonempty blocks, ordered by rank."""
        out: dict[int, list[int]] = {}
        for v, b in enumerate(self.block.tolist()):
            if b:
                out.setdefault(b, []).append(v)
        return [out[b] for b in sorted(out)]

    def same_block(self, x: int, y: int) -> bool:
        bx, by = self.block[x], self.block[y]
        return bool(bx != 0 and bx == by)

    def dumps(self) -> str:
        seed = "-" if self.seed is None else str(self.seed)
        lines = [f"{self.scale!r} {self.radius!r} {seed}"]
        lines += [f"{v} {b}" for v, b in enumerate(self.block.tolist())]
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> "Partition":
        rows = [ln.split() for ln in text.splitlines() if ln.strip()]
        scale, radius, seed = rows[0]
        block = np.zeros(len(rows) - 1, dtype=np.int64)
        for v, b in rows[1:]:
            block[int(v)] = int(b)
        return cls(
            block=block,
            centers=np.empty(0, dtype=np.int64),
            radius=float(radius),
            scale=float(scale),
            seed=None if seed == "-" else int(seed),
        )


@dataclass
class SamplerTrace:
    """Work counters and the residual tentative distances of one run."""

    relaxations: int
    queue_inserts: int
    final_delta: np.ndarray


def _check_radius(delta: float, radius: float) -> None:
    if not delta > 0:
        raise ValueError(f"scale must be positive, got {delta}")
    if not (delta / 4 <= radius <= delta / 2):
        raise ValueError(f"radius {radius} outside [{delta / 4}, {delta / 2}]")


def _as_centers(perm: Sequence[int], n: int) -> np.ndarray:
    centers = np.asarray(perm, dtype=np.int64).reshape(-1)
    if centers.size and (centers.min() < 0 or centers.max() >= n):
        raise ValueError("center id out of range")
    if len(np.unique(centers)) != len(centers):
        raise ValueError("centers must be distinct")
    return centers


def ckr_partition_metric(dist: np.ndarray, delta: float, perm: Sequence[int], radius: float) -> Partition:
    """Reference sampler over a full distance matrix (O(n²))."""
    dist = np.asarray(dist, dtype=np.float64)
    n = dist.shape[0]
    _check_radius(delta, radius)
    centers = _as_centers(perm, n)
    block = np.zeros(n, dtype=np.int64)
    if n and centers.size:
        within = dist[centers] <= radius
        hit = within.any(axis=0)
        block[hit] = within.argmax(axis=0)[hit] + 1
    if len(centers) == n:
        assert np.all(block > 0), "a vertex escaped every ball, yet it is its own center"
    return Partition(block, centers, float(radius), float(delta))


def _graph_ckr(adj, n: int, centers: list[int], radius: float):
    delta = [inf] * n
    block = [0] * n
    in_queue = [False] * n
    relaxations = 0
    inserts = 0
    push, pop = heapq.heappush, heapq.heappop
    for rank, c in enumerate(centers, start=1):
        delta[c] = 0.0
        w, dw = c, 0.0
        heap: list = []
        while True:
            if not block[w]:
                block[w] = rank
            nbrs = adj[w]
            relaxations += len(nbrs)
            for u, wt in nbrs:
                nd = dw + wt
                # Tentative values above the radius can never be visited, so
                # they are not recorded; this keeps δ exactly "min distance
                # to an earlier center, or ∞" after every center.
                if nd < delta[u] and nd <= radius:
                    delta[u] = nd
                    if not in_queue[u]:
                        in_queue[u] = True
                        inserts += 1
                    push(heap, (nd, u))
            while heap:
                dw, w = pop(heap)
                if in_queue[w] and dw == delta[w]:
                    break
            else:
                break
            in_queue[w] = False
    return block, delta, relaxations, inserts


def ckr_partition_graph_with(
    g: WeightedGraph, delta: float, perm: Sequence[int], radius: float
) -> tuple[Partition, SamplerTrace]:
    """Fast sampler with a caller-supplied center order and radius.

    ``perm`` may list only a subset of the vertices; the partition is then
    the CKR partition of that subset under the graph metric, and vertices
    outside every ball get rank 0.
    """
    _check_radius(delta, radius)
    centers = _as_centers(perm, g.n)
    block, dvals, relax, inserts = _graph_ckr(g.adjacency, g.n, centers.tolist(), float(radius))
    part = Partition(np.array(block, dtype=np.int64), centers, float(radius), float(delta))
    trace = SamplerTrace(relax, inserts, np.array(dvals, dtype=np.float64))
    return part, trace


def draw_parameters(n_or_centers, delta: float, rng) -> tuple[np.ndarray, float]:
    """Uniform random center order and radius uniform in [Δ/4, Δ/2]."""
    rng = np.random.default_rng(rng)
    perm = rng.permutation(n_or_centers)
    radius = float(rng.uniform(delta / 4, delta / 2))
    return np.asarray(perm, dtype=np.int64), radius


def ckr_partition_graph(
    g: WeightedGraph, delta: float, rng=None, centers: Optional[Sequence[int]] = None
) -> tuple[Partition, SamplerTrace]:
    """Sample a Δ-bounded CKR partition of the shortest-path metric of ``g``.

    ``rng`` is a seed or a :class:`numpy.random.Generator`.  If ``centers``
    is given, only those vertices are shuffled and used as centers.
    """
    if not delta > 0:
        raise ValueError(f"scale must be positive, got {delta}")
    seed = rng if isinstance(rng, (int, np.integer)) else None
    pool = g.n if centers is None else np.asarray(centers, dtype=np.int64)
    perm, radius = draw_parameters(pool, delta, rng)
    part, trace = ckr_partition_graph_with(g, delta, perm, radius)
    if seed is not None:
        part = Partition(part.block, part.centers, part.radius, part.scale, int(seed))
    return part, trace
