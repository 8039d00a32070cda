"""Spread-independent scale machinery.

A Kruskal merge tree over the MST gives a bottleneck ultrametric ``ν_B``
with ``ν_B <= ρ <= n ν_B``.  Cutting it at height ``Δ/2n`` groups vertices
into clusters that absorb every ``Δ/2n``-ball, and contracting those
clusters yields the quotient graph used at scale ``Δ``.  Only scales
``8^j`` whose window ``[8^j/2n, 8^j]`` holds some edge weight carry any
information, which is what :func:`build_scale_family` enumerates.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Optional

import numpy as np

from .graph import WeightedGraph

BASE = 8


def scale_floor(n: int, j: int) -> float:
    """Lower end ``8^j / 2n`` of the weight window of scale ``j``."""
    return BASE ** float(j) / (2 * n)


def scale_ceiling(n: int, j: int) -> float:
    """Upper end of the weight window of scale ``j``.

    For ``n >= 4`` this is ``8^j``.  Smaller graphs get ``8^j * 4/n`` so that
    every merge height falls in some window.
    """
    return BASE ** float(j) * max(1.0, 4.0 / n)


def _top_scale_for(n: int, w: float) -> int:
    """Largest ``j`` with ``scale_floor(n, j) <= w``."""
    j = math.floor(math.log(2 * n * w, BASE))
    while scale_floor(n, j + 1) <= w:
        j += 1
    while scale_floor(n, j) > w:
        j -= 1
    return j


def ceil_log8(x: float) -> int:
    """Smallest ``j`` with ``8^j >= x``."""
    j = math.ceil(math.log(x, BASE))
    while BASE ** float(j - 1) >= x:
        j -= 1
    while BASE ** float(j) < x:
        j += 1
    return j


class BottleneckTree:
    """Single-linkage merge tree of a weighted graph.

    Leaves ``0..n-1`` are the vertices.  Each internal node records the MST
    edge weight ``gamma`` at which its two children merged; labels never
    decrease toward the root.  Components of a disconnected graph hang
    under a virtual root with ``gamma = inf``.
    """

    def __init__(self, n: int, parent: np.ndarray, gamma: np.ndarray):
        self.n = n
        self.parent = parent
        self.gamma = gamma
        self.size = len(parent)
        self.root = self.size - 1
        levels = max(1, int(self.size).bit_length())
        up = np.empty((levels, self.size), dtype=np.int64)
        up[0] = np.where(parent < 0, np.arange(self.size), parent)
        for k in range(1, levels):
            up[k] = up[k - 1][up[k - 1]]
        self._up = up
        order = np.argsort(up[0], kind="stable")
        self._child_ptr = np.searchsorted(up[0][order], np.arange(self.size + 1))
        self._child_idx = order

    def children(self, node: int) -> np.ndarray:
        kids = self._child_idx[self._child_ptr[node]:self._child_ptr[node + 1]]
        return kids[kids != node]

    @property
    def mst_weight(self) -> float:
        finite = self.gamma[self.n:]
        return float(finite[np.isfinite(finite)].sum())

    def sigma(self, v: int, delta: float) -> int:
        return int(self.sigma_many(np.array([v]), delta)[0])

    def sigma_many(self, vs: np.ndarray, delta: float) -> np.ndarray:
        """Highest ancestor with ``gamma <= delta / 2n`` for every vertex in ``vs``."""
        return self.cut(vs, delta / (2 * self.n))

    def cut(self, vs: np.ndarray, threshold: float) -> np.ndarray:
        cur = np.array(vs, dtype=np.int64, copy=True)
        gamma = self.gamma
        for k in range(self._up.shape[0] - 1, -1, -1):
            cand = self._up[k][cur]
            ok = gamma[cand] <= threshold
            cur[ok] = cand[ok]
        return cur

    def descend(self, node: int, threshold: float, keep: Optional[np.ndarray] = None) -> list[int]:
        """Maximal descendants of ``node`` with ``gamma <= threshold``.

        With ``keep`` (a per-node boolean mask) subtrees where it is false
        are skipped.
        """
        out = []
        stack = [node]
        gamma = self.gamma
        while stack:
            x = stack.pop()
            if keep is not None and not keep[x]:
                continue
            if gamma[x] <= threshold:
                out.append(x)
            else:
                stack.extend(self.children(x).tolist())
        out.sort()
        return out

    def count_leaves(self, mask: np.ndarray) -> np.ndarray:
        """Number of marked leaves below every node."""
        cnt = np.zeros(self.size, dtype=np.int64)
        cnt[: self.n] = np.asarray(mask, dtype=bool)
        parent = self.parent.tolist()
        acc = cnt.tolist()
        for x in range(self.size - 1):
            p = parent[x]
            if p >= 0:
                acc[p] += acc[x]
        return np.array(acc, dtype=np.int64)

    def lca(self, a: int, b: int) -> int:
        depth = self._depths
        while depth[a] > depth[b]:
            a = self.parent[a]
        while depth[b] > depth[a]:
            b = self.parent[b]
        while a != b:
            a, b = self.parent[a], self.parent[b]
        return int(a)

    @cached_property
    def _depths(self) -> np.ndarray:
        depth = np.zeros(self.size, dtype=np.int64)
        for x in range(self.size - 2, -1, -1):
            depth[x] = depth[self.parent[x]] + 1
        return depth

    def nu(self, a: int, b: int) -> float:
        """Bottleneck ultrametric: label of the lowest common ancestor."""
        if a == b:
            return 0.0
        return float(self.gamma[self.lca(a, b)])


def build_bottleneck_tree(g: WeightedGraph) -> BottleneckTree:
    """Kruskal merge tree; equal weights are merged in edge-index order."""
    n = g.n
    order = np.lexsort((np.arange(g.m), g.w))
    uf = list(range(n))
    top = list(range(n))
    parent = [-1] * n
    gamma = [0.0] * n

    def find(x):
        while uf[x] != x:
            uf[x] = uf[uf[x]]
            x = uf[x]
        return x

    us, vs, ws = g.u.tolist(), g.v.tolist(), g.w.tolist()
    for e in order.tolist():
        ra, rb = find(us[e]), find(vs[e])
        if ra == rb:
            continue
        node = len(parent)
        parent.append(-1)
        gamma.append(ws[e])
        parent[top[ra]] = node
        parent[top[rb]] = node
        uf[rb] = ra
        top[ra] = node
    roots = sorted({top[find(x)] for x in range(n)})
    if len(roots) > 1:
        node = len(parent)
        parent.append(-1)
        gamma.append(math.inf)
        for r in roots:
            parent[r] = node
    return BottleneckTree(n, np.array(parent, dtype=np.int64), np.array(gamma, dtype=np.float64))


def restrict(g: WeightedGraph, delta: float) -> tuple[WeightedGraph, np.ndarray]:
    """Edges of weight ``<= delta`` and their non-isolated endpoints.

    Returns the subgraph relabelled to ``0..k-1`` and the original id of each
    surviving vertex.
    """
    if not delta > 0:
        raise ValueError("delta must be positive")
    keep = g.w <= delta
    u, v, w = g.u[keep], g.v[keep], g.w[keep]
    verts = np.unique(np.concatenate([u, v]))
    return (
        WeightedGraph.from_arrays(len(verts), np.searchsorted(verts, u), np.searchsorted(verts, v), w),
        verts,
    )


@dataclass(frozen=True, eq=False)
class QuotientGraph:
    """Contraction of a graph along the merge-tree cut at ``delta / 2n``.

    ``nodes[q]`` is the merge-tree node of quotient vertex ``q`` and
    ``projection[x]`` the quotient vertex of base vertex ``x``.
    """

    qgraph: WeightedGraph
    nodes: np.ndarray
    projection: np.ndarray
    delta: float

    def pullback(self, qblock: np.ndarray) -> np.ndarray:
        return np.asarray(qblock)[self.projection]


def _contract(tree, endpoints_u, endpoints_v, weights, delta):
    sig_u = tree.sigma_many(endpoints_u, delta)
    sig_v = tree.sigma_many(endpoints_v, delta)
    cross = sig_u != sig_v
    return sig_u[cross], sig_v[cross], weights[cross]


def quotient(g: WeightedGraph, tree: BottleneckTree, delta: float) -> QuotientGraph:
    """The graph ``G_(Δ)``: one vertex per cluster, min crossing weight per pair."""
    if not delta > 0:
        raise ValueError("delta must be positive")
    sig = tree.sigma_many(np.arange(g.n), delta)
    nodes, proj = np.unique(sig, return_inverse=True)
    su, sv, sw = _contract(tree, g.u, g.v, g.w, delta)
    qg = WeightedGraph.from_arrays(len(nodes), np.searchsorted(nodes, su), np.searchsorted(nodes, sv), sw)
    return QuotientGraph(qg, nodes, proj.astype(np.int64), float(delta))


@dataclass(frozen=True, eq=False)
class ScaleLevel:
    """The graph ``G_j`` of one processed scale ``j``.

    ``graph`` is relabelled to ``0..|V_j|-1``; ``nodes`` maps each of its
    vertices to the merge-tree cluster it stands for.  ``window`` holds the
    0-based inclusive range of the weight-sorted edge list that was scanned.
    """

    j: int
    graph: WeightedGraph
    nodes: np.ndarray
    window: tuple[int, int]

    @property
    def scale(self) -> float:
        return BASE ** float(self.j)

    @property
    def size(self) -> int:
        return self.graph.n + self.graph.m


@dataclass(frozen=True, eq=False)
class ScaleFamily:
    tree: BottleneckTree
    levels: list[ScaleLevel]
    n: int
    m: int

    @property
    def total_size(self) -> int:
        return sum(lv.size for lv in self.levels)

    @property
    def top(self) -> int:
        return self.levels[0].j

    def dump(self) -> str:
        rows = [f"{lv.j} {lv.graph.n} {lv.graph.m} {lv.window[0]} {lv.window[1]}" for lv in self.levels]
        return "\n".join(rows) + "\n"


def scale_windows(weights_desc: np.ndarray, n: int, top: int) -> list[tuple[int, int, int]]:
    """Processed scales ``j_1 > j_2 > ...`` with their edge windows.

    ``weights_desc`` must be sorted non-increasingly.  Scale ``j_1 = top`` is
    always kept; every later scale is the largest ``j`` below its
    predecessor whose window holds at least one weight.
    """
    neg = -np.asarray(weights_desc, dtype=np.float64)
    m = len(neg)
    out = []
    j = top
    i_left = 0
    while True:
        i_right = int(np.searchsorted(neg, -scale_floor(n, j), side="right")) - 1
        out.append((j, i_left, i_right))
        i_next = int(np.searchsorted(neg, -scale_ceiling(n, j - 1), side="left"))
        if i_next >= m:
            break
        j = min(j - 1, _top_scale_for(n, -neg[i_next]))
        i_left = int(np.searchsorted(neg, -scale_ceiling(n, j), side="left"))
    return out


def build_scale_family(g: WeightedGraph, tree: Optional[BottleneckTree] = None) -> ScaleFamily:
    """Build ``G_j = (G_(8^j))|_{8^j/2}`` for every processed scale.

    The top scale is the smallest ``j`` with ``8^j`` at least the MST weight,
    an upper bound on the diameter of every component.
    """
    if g.m == 0:
        raise ValueError("graph has no edges, so it has no scales")
    tree = tree or build_bottleneck_tree(g)
    n = g.n
    order = np.lexsort((np.arange(g.m), -g.w))
    ws = g.w[order]
    top = ceil_log8(tree.mst_weight)
    levels = []
    for j, i_left, i_right in scale_windows(ws, n, top):
        idx = order[i_left:i_right + 1]
        su, sv, sw = _contract(tree, g.u[idx], g.v[idx], g.w[idx], BASE ** float(j))
        keep = sw <= BASE ** float(j) / 2
        su, sv, sw = su[keep], sv[keep], sw[keep]
        nodes = np.unique(np.concatenate([su, sv]))
        qg = WeightedGraph.from_arrays(len(nodes), np.searchsorted(nodes, su), np.searchsorted(nodes, sv), sw)
        levels.append(ScaleLevel(j, qg, nodes, (i_left, i_right)))
    return ScaleFamily(tree, levels, n, g.m)
