"""Acceptance criteria, one test each.

Every test prints a single ``PASS``/``FAIL`` line with the measured
quantity next to its threshold.  Constants that the criteria leave open are
fixed here once for the whole corpus.
"""
import math
import time

import numpy as np
import pytest
from scipy.spatial.distance import cdist

from fastckr._rng import substream
from fastckr.ckr import ckr_partition_graph, ckr_partition_graph_with, ckr_partition_metric, draw_parameters
from fastckr.cli import bench_scaling, default_delta, regular_graph, run_bench
from fastckr.frt import sample_frt
from fastckr.graph import WeightedGraph
from fastckr.hierarchy import padded_points, sample_hierarchy
from fastckr.oracle import build_oracle, oracle_from_matrix, query_many
from fastckr.scales import build_bottleneck_tree, build_scale_family, quotient
from fastckr.spanner import baswana_sen
from conftest import cycle, random_connected, scipy_metric

STORAGE_C = 1.0  # oracle tree nodes <= C k n^(1+1/k)
FAMILY_C = 2.0  # scale-family size <= C m log2 n
SPANNER_C = 1.0  # mean spanner edges <= C k n^(1+1/k)


@pytest.fixture
def report(capsys):
    def emit(num, ok, detail):
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} criterion {num}: {detail}")
        assert ok, detail

    return emit


def _corpus():
    """200 random connected graphs with n <= 50 and their exact metrics."""
    rng = np.random.default_rng(20240601)
    out = []
    for i in range(200):
        n = int(rng.integers(1, 51))
        wide = i % 3 == 0
        g = random_connected(rng, n, lo=1e-2 if wide else 1.0, hi=1e3 if wide else 4.0, log_weights=wide)
        d = scipy_metric(g)
        delta = float(rng.uniform(0.1, 2.5) * max(d.max(), 1e-2))
        perm, radius = draw_parameters(n, delta, rng)
        out.append((g, d, delta, perm, radius))
    return out


CORPUS = None


def corpus():
    global CORPUS
    if CORPUS is None:
        CORPUS = _corpus()
    return CORPUS


def test_c01_fast_matches_reference(report):
    start = time.perf_counter()
    bad = 0
    for g, d, delta, perm, radius in corpus():
        fast, _ = ckr_partition_graph_with(g, delta, perm, radius)
        ref = ckr_partition_metric(d, delta, perm, radius)
        bad += int(not np.array_equal(fast.block, ref.block))
    el = time.perf_counter() - start
    report(1, bad == 0 and el < 60, f"{bad} mismatches over 200 graphs in {el:.2f}s (limit 60s)")


def test_c02_delta_semantics(report):
    bad = checked = 0
    for idx, (g, d, delta, perm, radius) in enumerate(corpus()):
        # state after every iteration i on a share of the corpus, final state on all
        prefixes = range(1, g.n + 1) if idx < 40 else [g.n]
        for i in prefixes:
            _, trace = ckr_partition_graph_with(g, delta, perm[:i], radius)
            near = d[perm[:i]].min(axis=0)
            expect = np.where(near <= radius, near, np.inf)
            same = np.isinf(expect) == np.isinf(trace.final_delta)
            fin = np.isfinite(expect)
            same &= ~fin | np.isclose(trace.final_delta, np.where(fin, expect, 0), rtol=1e-12, atol=0)
            bad += int(not same.all())
            checked += 1
    report(2, bad == 0, f"{bad} mismatching delta arrays out of {checked} checked states")


def test_c03_padding_probability(report):
    start = time.perf_counter()
    g = cycle(32)
    d = scipy_metric(g)
    x, delta, trials = 0, 16.0, 10_000
    balls = {t: np.flatnonzero(d[x] <= t) for t in (1, 2)}
    ratio = (d[x] <= delta / 8).sum() / (d[x] <= delta).sum()
    hits = {1: 0, 2: 0}
    for s in range(trials):
        p, _ = ckr_partition_graph(g, delta, substream(s, "c3"))
        for t, ball in balls.items():
            hits[t] += int(np.all(p.block[ball] == p.block[x]))
    slack = 3 * math.sqrt(0.25 / trials)
    lines, ok = [], True
    for t in (1, 2):
        bound = ratio ** (16 * t / delta) - slack
        emp = hits[t] / trials
        ok &= emp >= bound
        lines.append(f"t={t}: {emp:.4f} >= {bound:.4f}")
    el = time.perf_counter() - start
    report(3, ok and el < 120, "; ".join(lines) + f" in {el:.1f}s")


def test_c04_quotient_padding(report):
    rng = np.random.default_rng(4)
    samples = exceptions = 0
    for gi in range(100):
        n = int(rng.integers(2, 33))
        g = random_connected(rng, n, lo=1e-3, hi=1e2, log_weights=True)
        d = scipy_metric(g)
        tree = build_bottleneck_tree(g)
        for _ in range(100):
            delta = float(d.max() * 10 ** rng.uniform(-2, 0.5))
            q = quotient(g, tree, delta)
            p, _ = ckr_partition_graph(q.qgraph, delta, rng)
            block = q.pullback(p.block)
            t = delta / (2 * n)
            near = d <= t
            exceptions += int(np.any(near & (block[:, None] != block[None, :])))
            samples += 1
    report(4, exceptions == 0, f"{samples - exceptions}/{samples} samples with every B(x, delta/2n) inside P(x)")


def test_c05_hierarchical_padding(report):
    g = cycle(32)
    f = build_scale_family(g)
    beta, trials = 1 / 64, 10_000
    counts = np.zeros(g.n)
    for s in range(trials):
        _, parts = sample_hierarchy(g, None, substream(s, "c5"), family=f)
        counts[padded_points(f, parts, beta).points] += 1
    emp = counts / trials
    bound = g.n ** (-32 * beta) - 3 * math.sqrt(0.25 / trials)
    report(5, emp.min() >= bound, f"min over x of Pr[x padded] = {emp.min():.4f} >= {bound:.4f} (mean {emp.mean():.4f})")


def test_c06_frt(report):
    start = time.perf_counter()
    rng = np.random.default_rng(6)
    violations = pairs = 0
    for _ in range(60):
        n = int(rng.integers(2, 65))
        g = random_connected(rng, n, lo=1e-3, hi=1e3, log_weights=True)
        d = scipy_metric(g)
        f = build_scale_family(g)
        for _ in range(20):
            m = sample_frt(g, rng, f).matrix(np.arange(n))
            violations += int((m < d * (1 - 1e-12)).sum())
            pairs += n * (n - 1)
    lines, ok = [f"dominance violations {violations}/{pairs}"], violations == 0
    for n in (8, 16, 32, 64):
        g = cycle(n)
        d = scipy_metric(g)
        f = build_scale_family(g)
        total = np.zeros((n, n))
        for s in range(1000):
            total += sample_frt(g, substream(s, "c6", n), f).matrix(np.arange(n))
        off = ~np.eye(n, dtype=bool)
        worst = float((total[off] / 1000 / d[off]).max())
        ok &= worst <= 40 * math.log2(n)
        lines.append(f"C_{n} D={worst:.2f}<={40 * math.log2(n):.0f}")
    el = time.perf_counter() - start
    ok &= el < 300
    report(6, ok, "; ".join(lines) + f"; {el:.1f}s")


def test_c07_oracle(report):
    rng = np.random.default_rng(7)
    violations = 0
    worst_stretch = {1: 0.0, 2: 0.0, 3: 0.0}
    worst_storage = 0.0
    n = 128
    iu = np.triu_indices(n, 1)
    for gi in range(20):
        g = random_connected(rng, n, lo=1e-2 if gi % 2 else 1, hi=1e3 if gi % 2 else 5, log_weights=bool(gi % 2))
        d = scipy_metric(g)
        for k in (1, 2, 3):
            o = build_oracle(g, k, substream(gi, "c7", k))
            r = query_many(o, *iu) / d[iu]
            violations += int(((r < 1 - 1e-12) | (r > 256 * k)).sum())
            worst_stretch[k] = max(worst_stretch[k], float(r.max()) / (256 * k))
            worst_storage = max(worst_storage, o.storage / (k * n ** (1 + 1 / k)))
    ok = violations == 0 and worst_storage <= STORAGE_C
    report(7, ok, f"{violations} stretch violations; max stretch/256k by k {worst_stretch}; "
                  f"storage/(k n^(1+1/k)) max {worst_storage:.4f} <= C={STORAGE_C}")


def test_c08_family_size(report):
    rng = np.random.default_rng(8)
    worst = 0.0
    for i in range(80):
        n = int(rng.integers(2, 4000))
        if i % 2:
            g = random_connected(rng, n, lo=1, hi=1e8, log_weights=True)
        else:
            g = random_connected(rng, n)
        f = build_scale_family(g)
        worst = max(worst, f.total_size / (g.m * math.log2(max(n, 2))))
    report(8, worst <= FAMILY_C, f"max sum(|V_j|+|E_j|)/(m log2 n) = {worst:.3f} <= C={FAMILY_C}")


def test_c09_work_scaling(report):
    rep = run_bench("regular", [1000, 10000, 100000], 10, 0)
    fit = bench_scaling(rep)
    g = regular_graph(100_000, 4, substream(99, "c9"))
    delta = default_delta(g)
    start = time.perf_counter()
    ckr_partition_graph(g, delta, 99)
    el = time.perf_counter() - start
    ratios = ", ".join(f"{r:.3f}" for r in fit.ratios)
    # merged coinciding edges leave m a handful short of 2n
    report(9, not fit.flagged and el < 10 and g.m > 199_900,
           f"relaxations/(m log2 n) by size [{ratios}], flag {'raised' if fit.flagged else 'clear'}; "
           f"single n=1e5 m={g.m} run {el:.2f}s (limit 10s)")


def test_c10_spanner(report):
    lines, ok = [], True
    iu = np.triu_indices(64, 1)
    k64 = WeightedGraph.from_arrays(64, iu[0], iu[1], np.ones(len(iu[0])))
    rng = np.random.default_rng(10)
    corpus = [("K_64", k64)] + [(f"G{i}", random_connected(rng, int(rng.integers(2, 201)), lo=0.1, hi=10)) for i in range(10)]
    worst_stretch = 0.0
    worst_size = 0.0
    for k in (2, 3):
        for name, g in corpus:
            sizes = []
            for s in range(20):
                sp = baswana_sen(g, k, substream(s, "c10", k))
                sizes.append(sp.graph.m)
                if s < 3:
                    d = scipy_metric(sp.graph)
                    st = float((d[g.u, g.v] / g.w).max())
                    worst_stretch = max(worst_stretch, st / (2 * k - 1))
                    ok &= st <= 2 * k - 1 + 1e-12
            worst_size = max(worst_size, np.mean(sizes) / (k * g.n ** (1 + 1 / k)))
    ok &= worst_size <= SPANNER_C
    report(10, ok, f"max edge stretch/(2k-1) {worst_stretch:.3f} <= 1; mean size/(k n^(1+1/k)) max {worst_size:.3f} <= C={SPANNER_C}")


def test_c11_dense(report):
    rng = np.random.default_rng(11)
    n = 256
    iu = np.triu_indices(n, 1)
    lines, ok = [], True
    for k in (1, 2, 3):
        for kind in ("euclid", "graph"):
            if kind == "euclid":
                pts = rng.random((n, 3))
                d = cdist(pts, pts)
            else:
                d = scipy_metric(random_connected(rng, n, lo=1, hi=100))
            start = time.perf_counter()
            o = oracle_from_matrix(d, k, substream(k, "c11", len(lines)))
            el = time.perf_counter() - start
            r = query_many(o, *iu) / d[iu]
            good = r.min() >= 1 - 1e-12 and r.max() <= 1280 * k and el < 60
            ok &= good
            lines.append(f"k={k} {kind}: [{r.min():.2f}, {r.max():.1f}] build {el:.2f}s")
    report(11, ok, "; ".join(lines) + " (bound [1, 1280k], build < 60s)")
