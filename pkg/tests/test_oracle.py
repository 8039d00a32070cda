import itertools
import struct

import numpy as np
import pytest

import fastckr.oracle as oracle_mod
from fastckr.graph import WeightedGraph
from fastckr.oracle import (
    DistanceOracle,
    NonMetricError,
    OracleBuildError,
    build_oracle,
    check_metric,
    oracle_from_matrix,
    query,
    query_many,
)
from conftest import path, random_connected, scipy_metric


def all_pairs(n):
    return np.array(list(itertools.combinations(range(n), 2))).T


def test_single_vertex():
    o = build_oracle(WeightedGraph.from_edges(1, []), 1, 0)
    assert len(o.levels) == 1 and o.home.tolist() == [0]
    assert query(o, 0, 0) == 0.0


def test_single_block_one_level():
    o = build_oracle(WeightedGraph.from_edges(2, [(0, 1, 1.0)]), 1, 0)
    assert len(o.levels) == 1
    assert 1.0 <= query(o, 0, 1) <= 256.0


@pytest.mark.parametrize("k", [1, 2, 3])
def test_stretch_exhaustive(k):
    rng = np.random.default_rng(k)
    for _ in range(4):
        n = int(rng.integers(2, 129))
        g = random_connected(rng, n, lo=0.01, hi=100, log_weights=True)
        d = scipy_metric(g)
        o = build_oracle(g, k, rng)
        xs, ys = all_pairs(n)
        est = query_many(o, xs, ys)
        ratio = est / d[xs, ys]
        assert ratio.min() >= 1 - 1e-12
        assert ratio.max() <= 256 * k
        assert o.stretch_bound == 256 * k


def test_query_many_matches_query():
    g = random_connected(5, 40, lo=1, hi=3)
    o = build_oracle(g, 2, 5)
    xs, ys = all_pairs(40)
    est = query_many(o, xs, ys)
    assert all(est[i] == query(o, x, y) for i, (x, y) in enumerate(zip(xs, ys)))


def test_iterations_bound():
    k = 2
    rng = np.random.default_rng(77)
    g = random_connected(rng, 256, extra=400, lo=1, hi=10)
    iters = [len(build_oracle(g, k, seed).levels) for seed in range(20)]
    assert np.mean(iters) <= k * 256 ** (1 / k)


def test_unknown_vertex():
    o = build_oracle(path(3), 1, 0)
    with pytest.raises(IndexError):
        query(o, 0, 3)


def test_snapshot_roundtrip(tmp_path):
    g = random_connected(3, 60, lo=0.5, hi=4)
    o = build_oracle(g, 2, 42)
    p = tmp_path / "o.bin"
    o.save(p)
    r = DistanceOracle.load(p)
    assert r.to_bytes() == o.to_bytes()
    xs, ys = all_pairs(60)
    assert np.array_equal(query_many(r, xs, ys), query_many(o, xs, ys))
    assert build_oracle(g, 2, 42).to_bytes() == o.to_bytes()


def test_snapshot_rejects_garbage():
    o = build_oracle(path(3), 1, 0)
    data = o.to_bytes()
    with pytest.raises(ValueError):
        DistanceOracle.from_bytes(b"NOTANORC" + data[8:])
    with pytest.raises(ValueError):
        DistanceOracle.from_bytes(data[:8] + struct.pack("<I", 99) + data[12:])


def test_bad_arguments():
    with pytest.raises(ValueError):
        build_oracle(path(3), 0, 0)
    with pytest.raises(ValueError):
        build_oracle(path(3), 1, 0, beta=0.2)
    with pytest.raises(ValueError):
        build_oracle(WeightedGraph.from_edges(3, [(0, 1, 1.0)]), 1, 0)


def test_empty_draw_cap(monkeypatch):
    class Empty:
        points = np.zeros(0, dtype=np.int64)

    monkeypatch.setattr(oracle_mod, "padded_points", lambda *a, **k: Empty())
    with pytest.raises(OracleBuildError, match="seed 13"):
        build_oracle(path(4), 1, 13)


def test_matrix_two_points():
    d = np.array([[0.0, 2.5], [2.5, 0.0]])
    for k in (1, 2):
        o = oracle_from_matrix(d, k, 0)
        assert 2.5 <= query(o, 0, 1) <= 5 * 256 * k * 2.5


def test_matrix_of_path():
    g = path(12)
    d = scipy_metric(g)
    o = oracle_from_matrix(d, 1, 3)
    xs, ys = all_pairs(12)
    ratio = query_many(o, xs, ys) / d[xs, ys]
    assert ratio.min() >= 1 and ratio.max() <= o.stretch_bound == 5 * 256


def test_matrix_validation():
    with pytest.raises(NonMetricError):
        check_metric(np.array([[0.0, 1.0], [2.0, 0.0]]))
    with pytest.raises(NonMetricError):
        check_metric(np.array([[1.0, 1.0], [1.0, 0.0]]))
    with pytest.raises(NonMetricError):
        check_metric(np.zeros((2, 3)))
    with pytest.raises(NonMetricError):
        check_metric(np.array([[0.0, 0.0], [0.0, 0.0]]))
    bad = np.array([[0, 1, 5], [1, 0, 1], [5, 1, 0]], dtype=float)
    with pytest.raises(NonMetricError) as exc:
        oracle_from_matrix(bad, 1, 0)
    x, y, z = exc.value.triple
    assert bad[x, y] > bad[x, z] + bad[z, y]


def test_matrix_rounding_asymmetry_tolerated():
    d = np.array([[0.0, 1.0, 2.0], [1.0, 0.0, 1.0], [np.nextafter(2.0, 3.0), 1.0, 0.0]])
    assert check_metric(d) is not None
