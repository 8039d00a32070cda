"""Weighted undirected graphs, edge-list parsing and Dijkstra."""
from __future__ import annotations

import heapq
from dataclasses import dataclass
from functools import cached_property
from math import inf
from typing import Iterable, Optional, Sequence

import numpy as np

# Distance sentinel for vertices that were never reached.
UNREACHED = inf


class GraphFormatError(ValueError):
    """Raised when an edge-list document cannot be parsed."""

    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


@dataclass(frozen=True, eq=False)
class WeightedGraph:
    """Undirected graph with strictly positive edge weights.

    Edges are stored once each as parallel arrays ``(u, v, w)`` with
    ``u < v``; self-loops are dropped and parallel edges keep the minimum
    weight.  Use :meth:`from_edges` rather than the raw constructor.
    """

    n: int
    u: np.ndarray
    v: np.ndarray
    w: np.ndarray

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[float]]) -> "WeightedGraph":
        best: dict[tuple[int, int], float] = {}
        for a, b, wt in edges:
            a, b, wt = int(a), int(b), float(wt)
            if not (0 <= a < n and 0 <= b < n):
                raise ValueError(f"vertex id out of range in edge ({a}, {b})")
            if not wt > 0:
                raise ValueError(f"non-positive weight {wt} on edge ({a}, {b})")
            if a == b:
                continue
            key = (a, b) if a < b else (b, a)
            old = best.get(key)
            if old is None or wt < old:
                best[key] = wt
        return cls._from_dict(n, best)

    @classmethod
    def from_arrays(cls, n: int, u, v, w) -> "WeightedGraph":
        u = np.asarray(u, dtype=np.int64)
        v = np.asarray(v, dtype=np.int64)
        w = np.asarray(w, dtype=np.float64)
        return cls.from_edges(n, zip(u.tolist(), v.tolist(), w.tolist()))

    @classmethod
    def _from_dict(cls, n: int, best: dict) -> "WeightedGraph":
        keys = sorted(best)
        u = np.fromiter((k[0] for k in keys), dtype=np.int64, count=len(keys))
        v = np.fromiter((k[1] for k in keys), dtype=np.int64, count=len(keys))
        w = np.fromiter((best[k] for k in keys), dtype=np.float64, count=len(keys))
        for arr in (u, v, w):
            arr.setflags(write=False)
        return cls(int(n), u, v, w)

    @property
    def m(self) -> int:
        return len(self.w)

    def edges(self) -> list[tuple[int, int, float]]:
        return list(zip(self.u.tolist(), self.v.tolist(), self.w.tolist()))

    @cached_property
    def adjacency(self) -> list[list[tuple[int, float]]]:
        """Per-vertex ``(neighbor, weight)`` lists, neighbors in id order."""
        adj: list[list[tuple[int, float]]] = [[] for _ in range(self.n)]
        for a, b, wt in self.edges():
            adj[a].append((b, wt))
            adj[b].append((a, wt))
        for row in adj:
            row.sort()
        return adj

    def degree(self) -> np.ndarray:
        return np.bincount(np.concatenate([self.u, self.v]), minlength=self.n)

    def subgraph(self, keep: np.ndarray) -> "WeightedGraph":
        """Graph on the same vertex ids keeping only edges where ``keep`` is true."""
        keep = np.asarray(keep, dtype=bool)
        u, v, w = self.u[keep], self.v[keep], self.w[keep]
        for arr in (u, v, w):
            arr.setflags(write=False)
        return WeightedGraph(self.n, u, v, w)

    def __repr__(self) -> str:
        return f"WeightedGraph(n={self.n}, m={self.m})"


def load_graph(text: str) -> WeightedGraph:
    """Parse the edge-list format: comment lines start with ``#``, the first
    other line holds ``n``, and each following line is ``u v w``."""
    n: Optional[int] = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if n is None:
            if len(parts) != 1:
                raise GraphFormatError(lineno, f"expected vertex count, got {line!r}")
            try:
                n = int(parts[0])
            except ValueError:
                raise GraphFormatError(lineno, f"bad vertex count {parts[0]!r}") from None
            if n < 0:
                raise GraphFormatError(lineno, "negative vertex count")
            continue
        if len(parts) != 3:
            raise GraphFormatError(lineno, f"expected 'u v w', got {line!r}")
        try:
            a, b = int(parts[0]), int(parts[1])
            wt = float(parts[2])
        except ValueError:
            raise GraphFormatError(lineno, f"malformed edge {line!r}") from None
        if not (0 <= a < n and 0 <= b < n):
            raise GraphFormatError(lineno, f"vertex id out of range in {line!r} (n={n})")
        if not wt > 0 or wt == inf:
            raise GraphFormatError(lineno, f"weight must be positive and finite, got {parts[2]}")
        edges.append((a, b, wt))
    if n is None:
        raise GraphFormatError(0, "missing vertex count")
    return WeightedGraph.from_edges(n, edges)


def read_graph(path) -> WeightedGraph:
    with open(path) as fh:
        return load_graph(fh.read())


def format_graph(g: WeightedGraph) -> str:
    lines = [str(g.n)]
    lines += [f"{a} {b} {wt!r}" for a, b, wt in g.edges()]
    return "\n".join(lines) + "\n"


def dijkstra(g: WeightedGraph, source: int, radius: Optional[float] = None) -> np.ndarray:
    """Shortest-path distances from ``source``.

    With ``radius`` given, only vertices at distance ``<= radius`` are
    guaranteed to carry their true distance; the rest may be ``UNREACHED``.
    Ties in the queue are broken by vertex id.
    """
    if not 0 <= source < g.n:
        raise IndexError(f"source {source} out of range for n={g.n}")
    if radius is not None and radius < 0:
        raise ValueError("radius must be non-negative")
    limit = inf if radius is None else radius
    adj = g.adjacency
    dist = [inf] * g.n
    dist[source] = 0.0
    done = [False] * g.n
    heap = [(0.0, source)]
    while heap:
        d, x = heapq.heappop(heap)
        if done[x] or d > dist[x]:
            continue
        if d > limit:
            break
        done[x] = True
        for y, wt in adj[x]:
            nd = d + wt
            if nd < dist[y] and nd <= limit:
                dist[y] = nd
                heapq.heappush(heap, (nd, y))
    return np.array(dist, dtype=np.float64)


def exact_metric(g: WeightedGraph) -> np.ndarray:
    """All-pairs distance matrix; unreachable pairs hold ``inf``."""
    return np.vstack([dijkstra(g, s) for s in range(g.n)]) if g.n else np.zeros((0, 0))


def connected_components(g: WeightedGraph) -> np.ndarray:
    """Component label per vertex (labels are the smallest vertex id)."""
    parent = list(range(g.n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in zip(g.u.tolist(), g.v.tolist()):
        ra, rb = find(a), find(b)
        if ra != rb:
            if ra < rb:
                parent[rb] = ra
            else:
                parent[ra] = rb
    return np.array([find(x) for x in range(g.n)], dtype=np.int64)


def is_connected(g: WeightedGraph) -> bool:
    if g.n <= 1:
        return True
    return bool(np.all(connected_components(g) == 0))
