"""Approximate distance oracles from iterated hierarchical CKR partitions.

Each round samples a hierarchy of the surviving vertices, stores it as an
ultrametric and retires the vertices that are β-padded in it.  A query
looks up the round in which the first of its two endpoints retired and
reads the label of their lowest common ancestor there.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ._rng import master_seed, substream
from .graph import WeightedGraph, is_connected
from .hierarchy import hierarchy_to_ultrametric, padded_points, sample_hierarchy
from .scales import build_scale_family
from .spanner import baswana_sen
from .ultrametric import UltrametricTree

MAGIC = b"FCKRORCL"
FORMAT_VERSION = 1
MAX_EMPTY_DRAWS = 32


class OracleBuildError(RuntimeError):
    pass


class NonMetricError(ValueError):
    def __init__(self, message: str, triple: Optional[tuple[int, int, int]] = None):
        super().__init__(message)
        self.triple = triple


@dataclass(eq=False)
class DistanceOracle:
    levels: list[UltrametricTree]
    home: np.ndarray
    beta: float
    k: int
    seed: int
    spanner_stretch: float = 1.0
    draws: list[int] = field(default_factory=list)

    @property
    def n(self) -> int:
        return len(self.home)

    @property
    def stretch_bound(self) -> float:
        """Guaranteed ratio ``query / ρ``: ``8/β`` times the spanner stretch."""
        return 8.0 / self.beta * self.spanner_stretch

    @property
    def storage(self) -> int:
        """Total number of tree nodes over all levels."""
        return sum(t.size for t in self.levels)

    def query(self, x: int, y: int) -> float:
        return query(self, x, y)

    def save(self, path) -> None:
        with open(path, "wb") as fh:
            fh.write(self.to_bytes())

    @classmethod
    def load(cls, path) -> "DistanceOracle":
        with open(path, "rb") as fh:
            return cls.from_bytes(fh.read())

    def to_bytes(self) -> bytes:
        out = [MAGIC, struct.pack("<I", FORMAT_VERSION)]
        out.append(struct.pack("<QQdqdQ", self.n, self.k, self.beta, self.seed, self.spanner_stretch, len(self.levels)))
        for t in self.levels:
            out.append(struct.pack("<Q", t.size))
            out.append(t.parent.astype("<i8").tobytes())
            out.append(t.gamma.astype("<f8").tobytes())
            out.append(t.point.astype("<i8").tobytes())
        out.append(self.home.astype("<i8").tobytes())
        return b"".join(out)

    @classmethod
    def from_bytes(cls, data: bytes) -> "DistanceOracle":
        if data[:8] != MAGIC:
            raise ValueError("not an oracle snapshot")
        (version,) = struct.unpack_from("<I", data, 8)
        if version != FORMAT_VERSION:
            raise ValueError(f"unsupported snapshot version {version}")
        pos = 12
        n, k, beta, seed, sp, count = struct.unpack_from("<QQdqdQ", data, pos)
        pos += struct.calcsize("<QQdqdQ")
        levels = []

        def take(dtype, count):
            nonlocal pos
            arr = np.frombuffer(data, dtype=dtype, count=count, offset=pos)
            pos += arr.nbytes
            return arr.copy()

        for _ in range(count):
            (size,) = struct.unpack_from("<Q", data, pos)
            pos += 8
            parent = take("<i8", size)
            gamma = take("<f8", size)
            point = take("<i8", size)
            levels.append(UltrametricTree(parent, gamma, point))
        home = take("<i8", n)
        return cls(levels, home, beta, k, seed, sp)


def build_oracle(g: WeightedGraph, k: int, rng=None, beta: Optional[float] = None) -> DistanceOracle:
    """Oracle with stretch ``8/β`` (``256k`` for the default ``β = 1/32k``).

    Rounds whose padded set comes out empty are redrawn from a fresh
    substream; ``MAX_EMPTY_DRAWS`` consecutive empty draws abort the build.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    beta = 1.0 / (32 * k) if beta is None else float(beta)
    if not 0 < beta < 1 / 8:
        raise ValueError("beta must lie in (0, 1/8)")
    if g.n == 0:
        raise ValueError("empty graph")
    if not is_connected(g):
        raise ValueError("oracle needs a connected graph")
    seed = master_seed(rng)
    family = build_scale_family(g) if g.m else None
    alive = np.ones(g.n, dtype=bool)
    home = np.full(g.n, -1, dtype=np.int64)
    levels: list[UltrametricTree] = []
    draws: list[int] = []
    while alive.any():
        i = len(levels)
        active = np.flatnonzero(alive)
        for attempt in range(MAX_EMPTY_DRAWS):
            stream = substream(seed, "oracle", i, attempt)
            h, parts = sample_hierarchy(g, active, stream, family=family)
            if family is None:
                padded = active
            else:
                padded = padded_points(family, parts, beta, active).points
            if len(padded):
                break
        else:
            raise OracleBuildError(
                f"round {i}: {MAX_EMPTY_DRAWS} consecutive draws left no padded point "
                f"({len(active)} vertices remaining, seed {seed})"
            )
        draws.append(attempt + 1)
        levels.append(hierarchy_to_ultrametric(h))
        home[padded] = i
        alive[padded] = False
    return DistanceOracle(levels, home, beta, k, seed, draws=draws)


def query(o: DistanceOracle, x: int, y: int) -> float:
    """Distance estimate from the level where the first endpoint retired."""
    n = o.n
    if not (0 <= x < n and 0 <= y < n):
        raise IndexError(f"vertex out of range for n={n}")
    if x == y:
        return 0.0
    hx, hy = o.home[x], o.home[y]
    return o.levels[hx if hx < hy else hy].distance(x, y)


def query_many(o: DistanceOracle, xs, ys) -> np.ndarray:
    xs = np.asarray(xs, dtype=np.int64)
    ys = np.asarray(ys, dtype=np.int64)
    lvl = np.minimum(o.home[xs], o.home[ys])
    out = np.zeros(len(xs))
    for i in np.unique(lvl).tolist():
        sel = lvl == i
        out[sel] = o.levels[i].distances(xs[sel], ys[sel])
    return out


def check_metric(dist: np.ndarray, rtol: float = 1e-12) -> np.ndarray:
    """Validate a distance matrix, raising :class:`NonMetricError` on failure.

    Symmetry and the triangle inequality are checked up to a relative
    tolerance ``rtol`` so that matrices produced by floating-point shortest
    path codes pass.  Only the upper triangle is used afterwards.
    """
    d = np.asarray(dist, dtype=np.float64)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise NonMetricError("distance matrix must be square")
    n = d.shape[0]
    if not np.all(np.isfinite(d)):
        raise NonMetricError("distance matrix has non-finite entries")
    if np.any(np.diag(d) != 0):
        raise NonMetricError("distance matrix has a nonzero diagonal")
    asym = np.argwhere(np.abs(d - d.T) > rtol * np.maximum(d, d.T))
    if len(asym):
        a, b = asym[0].tolist()
        raise NonMetricError(f"asymmetric entry d[{a},{b}]={d[a, b]} vs d[{b},{a}]={d[b, a]}", (a, b, b))
    off = ~np.eye(n, dtype=bool)
    if np.any(d[off] <= 0):
        a, b = np.argwhere((d <= 0) & off)[0].tolist()
        raise NonMetricError(f"distinct points {a},{b} at distance {d[a, b]}", (a, b, b))
    for z in range(n):
        via = d[:, z][:, None] + d[z, :][None, :]
        bad = d > via * (1 + rtol)
        if bad.any():
            x, y = np.argwhere(bad)[0].tolist()
            raise NonMetricError(
                f"triangle inequality fails: d[{x},{y}]={d[x, y]} > d[{x},{z}]+d[{z},{y}]={via[x, y]}", (x, y, z)
            )
    return d


def oracle_from_matrix(dist: np.ndarray, k: int, rng=None, beta: Optional[float] = None) -> DistanceOracle:
    """Oracle for a metric given as a matrix, built on a sampled 5-spanner."""
    d = check_metric(dist)
    n = d.shape[0]
    seed = master_seed(rng)
    iu, ju = np.triu_indices(n, 1)
    complete = WeightedGraph.from_arrays(n, iu, ju, d[iu, ju])
    sp = baswana_sen(complete, 3, substream(seed, "spanner"))
    o = build_oracle(sp.graph, k, substream(seed, "oracle-seed").integers(0, 2**63 - 1), beta)
    o.seed = seed
    o.spanner_stretch = float(sp.stretch)
    return o
