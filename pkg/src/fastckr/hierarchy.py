"""Hierarchical CKR partitions over all processed scales, and padded points.

A sample draws one independent ``8^j/2``-bounded CKR partition of every
quotient graph ``G_j`` and stitches their pullbacks into a single tree,
top-down, whose internal nodes carry scale exponents.  The block of ``x``
at scale ``j`` is the highest ancestor of ``x`` whose exponent is ``<= j``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Sequence

import numpy as np

from .ckr import Partition, ckr_partition_graph_with
from .graph import WeightedGraph, dijkstra, is_connected
from .scales import BASE, ScaleFamily, build_scale_family, scale_floor
from .ultrametric import UltrametricTree

# Exponent placeholder for leaves, which sit below every scale.
LEAF = np.iinfo(np.int64).min


@dataclass(frozen=True, eq=False)
class HierarchyTree:
    """Compressed hierarchical partition.

    ``parent[root] == -1``.  ``label[u]`` is the scale exponent of internal
    node ``u`` (``LEAF`` for leaves) and ``point[u]`` the point id of leaf
    ``u`` (``-1`` for internal nodes).  Nodes are numbered in depth-first
    preorder from the root.
    """

    parent: np.ndarray
    label: np.ndarray
    point: np.ndarray

    @property
    def size(self) -> int:
        return len(self.parent)

    @property
    def root(self) -> int:
        return 0

    @property
    def points(self) -> np.ndarray:
        return np.sort(self.point[self.point >= 0])

    def leaf(self, x: int) -> int:
        hits = np.flatnonzero(self.point == x)
        if not len(hits):
            raise KeyError(f"point {x} is not in the hierarchy")
        return int(hits[0])

    def leaves_under(self, node: int) -> list[int]:
        out, stack = [], [node]
        kids = self._children
        while stack:
            x = stack.pop()
            if self.point[x] >= 0:
                out.append(int(self.point[x]))
            stack.extend(kids[x])
        return sorted(out)

    @cached_property
    def _children(self) -> list[list[int]]:
        kids: list[list[int]] = [[] for _ in range(self.size)]
        for x, p in enumerate(self.parent.tolist()):
            if p >= 0:
                kids[p].append(x)
        return kids

    def blocks(self, j: int) -> list[list[int]]:
        """The partition at scale ``8^j`` as sorted point lists."""
        seen: dict[int, list[int]] = {}
        for x in self.points.tolist():
            seen.setdefault(block_at(self, x, j), []).append(x)
        return sorted(seen.values())

    def check(self) -> None:
        kids = self._children
        internal = self.point < 0
        for u in np.flatnonzero(internal).tolist():
            assert len(kids[u]) >= 2 or u == self.root, f"internal node {u} has one child"
            p = self.parent[u]
            assert p < 0 or self.label[u] < self.label[p], f"label does not increase at {u}"
        assert self.size <= max(1, 2 * int((~internal).sum())), "tree larger than twice the leaf count"

    def dumps(self) -> str:
        lines = [f"hierarchy {self.size}"]
        for u in range(self.size):
            lab = "-" if self.point[u] >= 0 else str(int(self.label[u]))
            pt = str(int(self.point[u])) if self.point[u] >= 0 else "-"
            lines.append(f"{u} {int(self.parent[u])} {lab} {pt}")
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> "HierarchyTree":
        rows = [ln.split() for ln in text.splitlines() if ln.strip()]
        size = int(rows[0][1])
        parent = np.empty(size, dtype=np.int64)
        label = np.full(size, LEAF, dtype=np.int64)
        point = np.full(size, -1, dtype=np.int64)
        for u, p, lab, pt in rows[1:]:
            u = int(u)
            parent[u] = int(p)
            if lab != "-":
                label[u] = int(lab)
            if pt != "-":
                point[u] = int(pt)
        return cls(parent, label, point)


@dataclass(frozen=True, eq=False)
class PaddedSet:
    points: np.ndarray
    beta: float

    def __contains__(self, x) -> bool:
        return bool(np.any(self.points == x))

    def __len__(self) -> int:
        return len(self.points)


def block_at(h: HierarchyTree, x: int, j: int) -> int:
    """Highest ancestor of leaf ``x`` whose exponent is ``<= j``."""
    u = h.leaf(x)
    parent, label = h.parent, h.label
    while parent[u] >= 0 and label[parent[u]] <= j:
        u = int(parent[u])
    return u


def _active_mask(n: int, active) -> np.ndarray:
    if active is None:
        return np.ones(n, dtype=bool)
    mask = np.zeros(n, dtype=bool)
    idx = np.asarray(active, dtype=np.int64)
    if idx.size and (idx.min() < 0 or idx.max() >= n):
        raise ValueError("active vertex out of range")
    mask[idx] = True
    return mask


def sample_level_partitions(family: ScaleFamily, counts: np.ndarray, rng) -> list[Partition]:
    """One CKR partition per processed scale, centers restricted to clusters
    that contain an active point.  Uses ``rng`` sequentially, top scale first."""
    out = []
    for lv in family.levels:
        delta = lv.scale / 2
        if lv.graph.n == 0:
            out.append(Partition(np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64), delta / 4, delta))
            continue
        centers = np.flatnonzero(counts[lv.nodes] > 0)
        perm = rng.permutation(centers)
        radius = float(rng.uniform(delta / 4, delta / 2))
        part, _ = ckr_partition_graph_with(lv.graph, delta, perm, radius)
        out.append(part)
    return out


def assemble_hierarchy(family: ScaleFamily, partitions: Sequence[Partition], counts: np.ndarray) -> HierarchyTree:
    """Common refinement of the pulled-back level partitions as a tree.

    Every frontier leaf is a merge-tree cluster.  At each scale ``j`` a leaf
    whose parent is coarser than ``j+1`` is wrapped in a node labelled
    ``j+1`` (its block at that scale), replaced by its sub-clusters at the
    new cut height, and siblings sharing a block of the level partition are
    gathered under a node labelled ``j``.  Single-child nodes are removed
    at the end.
    """
    tree = family.tree
    n = family.n
    keep = counts > 0
    gamma = tree.gamma
    parent = [-1]
    label: list[float] = [np.inf]
    mnode = [tree.root]
    alive = [True]
    frontier = [0]
    block_of = np.zeros(tree.size, dtype=np.int64)

    def new_node(p, lab, mn):
        parent.append(p)
        label.append(lab)
        mnode.append(mn)
        alive.append(True)
        return len(parent) - 1

    for lv, part in zip(family.levels, partitions):
        j = lv.j
        theta = scale_floor(n, j)
        nxt = []
        for leaf in frontier:
            a = mnode[leaf]
            p = parent[leaf]
            imgs = [a] if gamma[a] <= theta else tree.descend(a, theta, keep)
            if p >= 0 and label[p] == j + 1:
                if imgs == [a]:
                    nxt.append(leaf)
                    continue
                alive[leaf] = False
                host = p
            else:
                label[leaf] = j + 1
                mnode[leaf] = -1
                host = leaf
            for img in imgs:
                nxt.append(new_node(host, None, img))
        frontier = nxt

        block_of[lv.nodes] = part.block
        groups: dict[tuple[int, int], list[int]] = {}
        for leaf in frontier:
            b = int(block_of[mnode[leaf]])
            if b > 0:
                groups.setdefault((parent[leaf], b), []).append(leaf)
        block_of[lv.nodes] = 0
        for (p, _), members in groups.items():
            if len(members) >= 2:
                gnode = new_node(p, j, -1)
                for leaf in members:
                    parent[leaf] = gnode

    for leaf in frontier:
        assert mnode[leaf] < n, "frontier cluster was never split into points"
    return _compress(parent, label, mnode, alive, n)


def _compress(parent, label, mnode, alive, n) -> HierarchyTree:
    size = len(parent)
    kids: list[list[int]] = [[] for _ in range(size)]
    for x in range(size):
        if alive[x] and parent[x] >= 0:
            kids[parent[x]].append(x)

    def is_leaf(x):
        return label[x] is None

    def skip(x):
        # Follow single-child chains down to the node that carries the block.
        while not is_leaf(x) and len(kids[x]) == 1:
            x = kids[x][0]
        return x

    out_parent, out_label, out_point = [], [], []
    stack = [(skip(0), -1)]
    while stack:
        x, p = stack.pop()
        me = len(out_parent)
        out_parent.append(p)
        if is_leaf(x):
            out_label.append(LEAF)
            out_point.append(mnode[x])
            continue
        out_label.append(int(label[x]))
        out_point.append(-1)
        for c in reversed(kids[x]):
            stack.append((skip(c), me))
    return HierarchyTree(
        np.array(out_parent, dtype=np.int64),
        np.array(out_label, dtype=np.int64),
        np.array(out_point, dtype=np.int64),
    )


def sample_hierarchy(
    g: WeightedGraph,
    active=None,
    rng=None,
    family: Optional[ScaleFamily] = None,
) -> tuple[HierarchyTree, list[Partition]]:
    """Sample a hierarchical CKR partition of ``active`` (default: all vertices).

    Distances are those of the whole graph; only active vertices act as
    centers or appear as leaves.  ``family`` may be passed to reuse a scale
    family built once for ``g``.
    """
    rng = np.random.default_rng(rng)
    mask = _active_mask(g.n, active)
    if not mask.any():
        raise ValueError("active set is empty")
    if int(mask.sum()) == 1:
        x = int(np.flatnonzero(mask)[0])
        return HierarchyTree(np.array([-1]), np.array([LEAF]), np.array([x])), []
    if family is None:
        if not is_connected(g):
            raise ValueError("graph is disconnected")
        family = build_scale_family(g)
    elif not np.isfinite(family.tree.gamma[family.tree.root]):
        raise ValueError("graph is disconnected")
    counts = family.tree.count_leaves(mask)
    parts = sample_level_partitions(family, counts, rng)
    return assemble_hierarchy(family, parts, counts), parts


def unpadded_clusters(graph: WeightedGraph, block: np.ndarray, radius: float) -> np.ndarray:
    """Vertices of ``graph`` within ``radius`` of a vertex in another block.

    A virtual source is joined to the near endpoint of every cut edge with
    that edge's weight; the answer is everything Dijkstra reaches from it
    within ``radius``.  Rank 0 (uncaptured) counts as its own block.
    """
    if graph.m == 0:
        return np.zeros(0, dtype=np.int64)
    bu, bv = block[graph.u], block[graph.v]
    cut = (bu != bv) | (bu == 0)
    if not cut.any():
        return np.zeros(0, dtype=np.int64)
    s0 = graph.n
    cu, cv, cw = graph.u[cut], graph.v[cut], graph.w[cut]
    aug = WeightedGraph.from_arrays(
        graph.n + 1,
        np.concatenate([graph.u, np.full(len(cu), s0), np.full(len(cv), s0)]),
        np.concatenate([graph.v, cu, cv]),
        np.concatenate([graph.w, cw, cw]),
    )
    dist = dijkstra(aug, s0, radius)[:s0]
    return np.flatnonzero(dist <= radius)


def padded_points(
    family: ScaleFamily, partitions: Sequence[Partition], beta: float, active=None
) -> PaddedSet:
    """Points that are ``beta``-padded at every processed scale.

    At scale ``j`` a cluster is crossed out when its quotient distance to
    another block of the level partition is at most ``2β · 8^j/2``.  Points
    whose cluster is absent from ``G_j`` are padded there automatically.
    """
    if not 0 < beta < 1 / 8:
        raise ValueError("beta must lie in (0, 1/8)")
    tree = family.tree
    flagged = np.zeros(tree.size, dtype=bool)
    for lv, part in zip(family.levels, partitions):
        radius = 2 * beta * (BASE ** float(lv.j) / 2)
        bad = unpadded_clusters(lv.graph, part.block, radius)
        flagged[lv.nodes[bad]] = True
    # Top-down: a point is crossed out if any ancestor cluster is.
    hit = flagged.tolist()
    par = tree.parent.tolist()
    for x in range(tree.size - 2, -1, -1):
        if par[x] >= 0 and hit[par[x]]:
            hit[x] = True
    mask = _active_mask(family.n, active)
    ok = mask & ~np.array(hit[: family.n], dtype=bool)
    return PaddedSet(np.flatnonzero(ok), float(beta))


def hierarchy_to_ultrametric(h: HierarchyTree) -> UltrametricTree:
    """Relabel internal nodes with ``8^s`` and leaves with 0."""
    internal = h.point < 0
    gamma = np.zeros(h.size)
    gamma[internal] = BASE ** h.label[internal].astype(np.float64)
    return UltrametricTree(h.parent, gamma, h.point)
