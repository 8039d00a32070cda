"""Labelled rooted trees representing ultrametrics, with O(1) LCA."""
from __future__ import annotations

import numpy as np


class UltrametricTree:
    """Rooted tree whose leaves are points and whose nodes carry labels.

    The distance between two points is the label of their lowest common
    ancestor.  ``parent[root] == -1``; ``point[u]`` is the point id of leaf
    ``u`` and ``-1`` for internal nodes.  Lowest common ancestors come from
    an Euler tour plus a sparse table of depth minima.
    """

    def __init__(self, parent, gamma, point):
        self.parent = np.asarray(parent, dtype=np.int64)
        self.gamma = np.asarray(gamma, dtype=np.float64)
        self.point = np.asarray(point, dtype=np.int64)
        size = len(self.parent)
        roots = np.flatnonzero(self.parent < 0)
        if len(roots) != 1:
            raise ValueError(f"expected one root, found {len(roots)}")
        self.root = int(roots[0])
        leaves = np.flatnonzero(self.point >= 0)
        self.points = self.point[leaves]
        self._leaf_of = dict(zip(self.points.tolist(), leaves.tolist()))
        self._leaf_arr = np.full(int(self.points.max()) + 1 if len(leaves) else 0, -1, dtype=np.int64)
        self._leaf_arr[self.points] = leaves
        self._build_lca(size)

    def _build_lca(self, size: int) -> None:
        kids: list[list[int]] = [[] for _ in range(size)]
        for x, p in enumerate(self.parent.tolist()):
            if p >= 0:
                kids[p].append(x)
        self.children = kids
        depth = [0] * size
        first = [0] * size
        euler: list[int] = []
        stack = [(self.root, 0)]
        while stack:
            x, i = stack.pop()
            if i == 0:
                first[x] = len(euler)
                if x != self.root:
                    depth[x] = depth[self.parent[x]] + 1
            euler.append(x)
            if i < len(kids[x]):
                stack.append((x, i + 1))
                stack.append((kids[x][i], 0))
        self.depth = np.array(depth, dtype=np.int64)
        self.first = np.array(first, dtype=np.int64)
        self.euler = np.array(euler, dtype=np.int64)
        m = len(euler)
        levels = max(1, m.bit_length())
        table = np.empty((levels, m), dtype=np.int64)
        table[0] = self.euler
        for k in range(1, levels):
            half = 1 << (k - 1)
            a = table[k - 1][: m - half]
            b = table[k - 1][half:]
            row = table[k - 1].copy()
            row[: m - half] = np.where(self.depth[a] <= self.depth[b], a, b)
            table[k] = row
        self._table = table
        self._log = np.zeros(m + 1, dtype=np.int64)
        if m > 1:
            self._log[2:] = np.floor(np.log2(np.arange(2, m + 1))).astype(np.int64)
        # Plain-list copies for fast scalar queries.
        self._first_l = self.first.tolist()
        self._log_l = self._log.tolist()
        self._table_l = table.tolist()
        self._depth_l = depth
        self._gamma_l = self.gamma.tolist()

    @property
    def size(self) -> int:
        return len(self.parent)

    def leaf(self, x: int) -> int:
        try:
            return self._leaf_of[x]
        except KeyError:
            raise KeyError(f"point {x} is not a leaf of this tree") from None

    def has_point(self, x: int) -> bool:
        return x in self._leaf_of

    def lca(self, a: int, b: int) -> int:
        l, r = self._first_l[a], self._first_l[b]
        if l > r:
            l, r = r, l
        k = self._log_l[r - l + 1]
        row = self._table_l[k]
        i, j = row[l], row[r - (1 << k) + 1]
        return i if self._depth_l[i] <= self._depth_l[j] else j

    def distance(self, x: int, y: int) -> float:
        """Label of ``lca(x, y)``; zero when ``x == y``."""
        a, b = self.leaf(x), self.leaf(y)
        if a == b:
            return 0.0
        return self._gamma_l[self.lca(a, b)]

    def distances(self, xs, ys) -> np.ndarray:
        """Vectorised :meth:`distance` over paired point arrays."""
        xs = np.asarray(xs, dtype=np.int64)
        ys = np.asarray(ys, dtype=np.int64)
        bound = len(self._leaf_arr)
        if np.any((xs < 0) | (xs >= bound)) or np.any((ys < 0) | (ys >= bound)):
            raise KeyError("unknown point in query")
        a = self._leaf_arr[xs]
        b = self._leaf_arr[ys]
        if np.any(a < 0) or np.any(b < 0):
            raise KeyError("unknown point in query")
        l = np.minimum(self.first[a], self.first[b])
        r = np.maximum(self.first[a], self.first[b])
        k = self._log[r - l + 1]
        i = self._table[k, l]
        j = self._table[k, r - (1 << k) + 1]
        node = np.where(self.depth[i] <= self.depth[j], i, j)
        out = self.gamma[node].copy()
        out[a == b] = 0.0
        return out

    def matrix(self, points=None) -> np.ndarray:
        """Full distance matrix over ``points`` (default: all leaves, sorted)."""
        pts = np.sort(self.points) if points is None else np.asarray(points, dtype=np.int64)
        xs, ys = np.meshgrid(pts, pts, indexing="ij")
        return self.distances(xs.ravel(), ys.ravel()).reshape(len(pts), len(pts))

    def check(self) -> None:
        """Raise ``AssertionError`` if the labelling is not an ultrametric tree."""
        is_leaf = self.point >= 0
        assert np.all(self.gamma[is_leaf] == 0), "leaf with nonzero label"
        assert np.all(self.gamma[~is_leaf] > 0), "internal node with zero label"
        child = np.flatnonzero(self.parent >= 0)
        assert np.all(self.gamma[child] <= self.gamma[self.parent[child]]), "label decreases upward"

    def dumps(self) -> str:
        lines = [f"ultrametric {self.size}"]
        for x in range(self.size):
            pt = int(self.point[x])
            lines.append(f"{x} {int(self.parent[x])} {float(self.gamma[x])!r} {pt if pt >= 0 else '-'}")
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> "UltrametricTree":
        rows = [ln.split() for ln in text.splitlines() if ln.strip()]
        size = int(rows[0][1])
        parent = np.empty(size, dtype=np.int64)
        gamma = np.empty(size)
        point = np.empty(size, dtype=np.int64)
        for x, p, gm, pt in rows[1:]:
            x = int(x)
            parent[x], gamma[x] = int(p), float(gm)
            point[x] = -1 if pt == "-" else int(pt)
        return cls(parent, gamma, point)
