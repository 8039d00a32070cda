"""Command-line front end.

Subcommands: ``partition``, ``scales``, ``hierarchy``, ``embed``,
``oracle build``, ``oracle query``, ``spanner`` and ``bench``.  Every
randomized subcommand requires ``--seed``; equal arguments give
byte-identical outputs.  Exit status is 0 on success, 2 on bad input and 3
when an internal invariant check fails.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ._rng import substream
from .ckr import ckr_partition_graph
from .frt import empirical_distortion, sample_frt
from .graph import GraphFormatError, WeightedGraph, dijkstra, format_graph, read_graph
from .hierarchy import sample_hierarchy
from .oracle import DistanceOracle, build_oracle, query
from .scales import build_scale_family
from .spanner import baswana_sen

EXIT_OK, EXIT_INPUT, EXIT_INVARIANT = 0, 2, 3


# -- graph generators -------------------------------------------------------

def cycle_graph(n: int) -> WeightedGraph:
    i = np.arange(n)
    return WeightedGraph.from_arrays(n, i, (i + 1) % n, np.ones(n))


def grid_graph(n: int) -> WeightedGraph:
    """Square grid with ``ceil(sqrt(n))**2`` vertices and unit weights."""
    side = math.isqrt(n - 1) + 1 if n > 1 else 1
    idx = np.arange(side * side).reshape(side, side)
    u = np.concatenate([idx[:, :-1].ravel(), idx[:-1, :].ravel()])
    v = np.concatenate([idx[:, 1:].ravel(), idx[1:, :].ravel()])
    return WeightedGraph.from_arrays(side * side, u, v, np.ones(len(u)))


def regular_graph(n: int, degree: int, rng, weights: str = "unit") -> WeightedGraph:
    """Union of ``degree/2`` random Hamiltonian cycles.

    Coinciding edges are merged, so a few vertices may end up with slightly
    lower degree.
    """
    if degree % 2 or degree < 2:
        raise ValueError("degree must be a positive even number")
    rng = np.random.default_rng(rng)
    us, vs = [], []
    for _ in range(degree // 2):
        p = rng.permutation(n)
        us.append(p)
        vs.append(np.roll(p, -1))
    u, v = np.concatenate(us), np.concatenate(vs)
    return WeightedGraph.from_arrays(n, u, v, _weights(len(u), rng, weights))


def geometric_graph(n: int, rng, radius: Optional[float] = None) -> WeightedGraph:
    """Random points in the unit square joined within ``radius`` (Euclidean
    weights), plus a nearest-point chain in x-order so the graph is connected."""
    from scipy.spatial import cKDTree

    rng = np.random.default_rng(rng)
    pts = rng.random((n, 2))
    radius = radius or math.sqrt(2.0 * math.log(max(n, 2)) / max(n, 2))
    pairs = cKDTree(pts).query_pairs(radius, output_type="ndarray")
    order = np.argsort(pts[:, 0])
    chain = np.stack([order[:-1], order[1:]], axis=1)
    pairs = np.concatenate([pairs.reshape(-1, 2), chain])
    w = np.linalg.norm(pts[pairs[:, 0]] - pts[pairs[:, 1]], axis=1)
    return WeightedGraph.from_arrays(n, pairs[:, 0], pairs[:, 1], np.maximum(w, 1e-12))


def _weights(m: int, rng, kind: str) -> np.ndarray:
    if kind == "unit":
        return np.ones(m)
    if kind == "uniform":
        return rng.uniform(1.0, 2.0, m)
    raise ValueError(f"unknown weight kind {kind!r}")


def make_graph(family: str, n: int, seed: int, degree: int = 4, weights: str = "unit") -> WeightedGraph:
    gen = substream(seed, "generator", n)
    if family == "cycle":
        return cycle_graph(n)
    if family == "grid":
        return grid_graph(n)
    if family == "regular":
        return regular_graph(n, degree, gen, weights)
    if family == "geometric":
        return geometric_graph(n, gen)
    raise ValueError(f"unknown graph family {family!r}")


# -- benchmark --------------------------------------------------------------

@dataclass
class BenchRecord:
    family: str
    n: int
    m: int
    seed: int
    delta: float
    wall_time: float
    relaxations: int
    queue_inserts: int

    @property
    def relaxations_per_edge(self) -> float:
        return self.relaxations / max(self.m, 1)

    @property
    def inserts_per_vertex(self) -> float:
        return self.queue_inserts / max(self.n, 1)

    def as_dict(self) -> dict:
        d = dict(self.__dict__)
        d["relaxations_per_edge"] = self.relaxations_per_edge
        d["inserts_per_vertex"] = self.inserts_per_vertex
        return d


@dataclass
class BenchReport:
    records: list[BenchRecord] = field(default_factory=list)

    def sizes(self) -> list[tuple[int, int, float, float]]:
        """Per vertex count: ``(n, m, mean relaxations, mean inserts)``."""
        out = []
        for n in sorted({r.n for r in self.records}):
            rs = [r for r in self.records if r.n == n]
            out.append((
                n,
                int(round(np.mean([r.m for r in rs]))),
                float(np.mean([r.relaxations for r in rs])),
                float(np.mean([r.queue_inserts for r in rs])),
            ))
        return out


@dataclass
class ScalingFit:
    coefficient: float
    ratios: list[float]
    flagged: bool


def bench_scaling(report: BenchReport) -> ScalingFit:
    """Fit mean relaxations against ``m log2 n`` through the origin.

    The flag is raised when the normalized count ``relaxations / (m log2 n)``
    at the largest size exceeds twice the one at the smallest size.
    """
    sizes = report.sizes()
    if len(sizes) < 3:
        raise ValueError("scaling fit needs at least three sizes")
    x = np.array([m * math.log2(n) for n, m, _, _ in sizes])
    y = np.array([r for _, _, r, _ in sizes])
    coef = float(x @ y / (x @ x))
    ratios = (y / x).tolist()
    return ScalingFit(coef, ratios, bool(ratios[-1] > 2 * ratios[0]))


def default_delta(g: WeightedGraph) -> float:
    """Eccentricity of vertex 0: balls of radius about a quarter of it."""
    d = dijkstra(g, 0)
    finite = d[np.isfinite(d)]
    return float(finite.max()) if finite.max() > 0 else 1.0


def run_bench(family: str, sizes: list[int], seeds: int, master: int, delta: Optional[float] = None,
              degree: int = 4, weights: str = "unit") -> BenchReport:
    report = BenchReport()
    for n in sizes:
        for s in range(seeds):
            g = make_graph(family, n, master + s, degree, weights)
            dlt = delta if delta is not None else default_delta(g)
            start = time.perf_counter()
            _, trace = ckr_partition_graph(g, dlt, substream(master + s, "bench", n))
            elapsed = time.perf_counter() - start
            report.records.append(BenchRecord(family, g.n, g.m, master + s, dlt, elapsed,
                                              trace.relaxations, trace.queue_inserts))
    return report


# -- configuration and dispatch ---------------------------------------------

@dataclass
class RunConfig:
    command: str
    input: Optional[str] = None
    output: Optional[str] = None
    seed: Optional[int] = None
    delta: Optional[float] = None
    beta: Optional[float] = None
    k: Optional[int] = None
    samples: int = 0
    oracle: Optional[str] = None
    pairs: Optional[str] = None
    report: Optional[str] = None
    family: str = "regular"
    sizes: list[int] = field(default_factory=list)
    seeds: int = 1
    degree: int = 4
    weights: str = "unit"
    format: str = "json"


class InputError(Exception):
    pass


def _parse_sizes(text: str) -> list[int]:
    out = []
    for tok in text.split(","):
        tok = tok.strip().lower()
        mult = 1
        if tok.endswith("k"):
            mult, tok = 1000, tok[:-1]
        elif tok.endswith("m"):
            mult, tok = 1000000, tok[:-1]
        out.append(int(float(tok) * mult))
    return out


def _emit(text: str, path: Optional[str]) -> None:
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _require(cfg: RunConfig, *names: str) -> None:
    missing = [f"--{n}" for n in names if getattr(cfg, n) is None]
    if missing:
        raise InputError(f"{cfg.command}: missing {', '.join(missing)}")


def _table(rows: list[dict]) -> str:
    """Tab-separated rows; a header line opens every run of rows sharing keys."""
    lines, keys = [], None
    for r in rows:
        if list(r) != keys:
            keys = list(r)
            lines.append("\t".join(keys))
        lines.append("\t".join(f"{r[k]:.6g}" if isinstance(r[k], float) else str(r[k]) for k in keys))
    return "\n".join(lines) + "\n" if lines else ""


def run(cfg: RunConfig) -> int:
    cmd = cfg.command
    if cmd == "partition":
        _require(cfg, "input", "seed", "delta")
        g = read_graph(cfg.input)
        part, trace = ckr_partition_graph(g, cfg.delta, cfg.seed)
        _emit(part.dumps(), cfg.output)
        if cfg.report:
            _emit(json.dumps({"n": g.n, "m": g.m, "delta": cfg.delta, "radius": part.radius,
                              "blocks": len(part.blocks()), "relaxations": trace.relaxations,
                              "queue_inserts": trace.queue_inserts}) + "\n", cfg.report)
    elif cmd == "scales":
        _require(cfg, "input")
        _emit(build_scale_family(read_graph(cfg.input)).dump(), cfg.output)
    elif cmd == "hierarchy":
        _require(cfg, "input", "seed")
        g = read_graph(cfg.input)
        h, _ = sample_hierarchy(g, None, substream(cfg.seed, "hierarchy"))
        h.check()
        _emit(h.dumps(), cfg.output)
    elif cmd == "embed":
        _require(cfg, "input", "seed")
        g = read_graph(cfg.input)
        t = sample_frt(g, substream(cfg.seed, "frt"))
        t.check()
        _emit(t.dumps(), cfg.output)
        if cfg.samples:
            rep = empirical_distortion(g, cfg.samples, substream(cfg.seed, "frt-distortion"))
            _emit(rep.to_jsonl(), cfg.report)
    elif cmd == "oracle-build":
        _require(cfg, "input", "seed", "k", "output")
        g = read_graph(cfg.input)
        o = build_oracle(g, cfg.k, cfg.seed, cfg.beta)
        o.save(cfg.output)
        if cfg.report:
            _emit(json.dumps({"n": o.n, "k": o.k, "beta": o.beta, "levels": len(o.levels),
                              "storage": o.storage, "stretch_bound": o.stretch_bound}) + "\n", cfg.report)
    elif cmd == "oracle-query":
        _require(cfg, "oracle", "pairs")
        o = DistanceOracle.load(cfg.oracle)
        lines = []
        with open(cfg.pairs) as fh:
            for lineno, raw in enumerate(fh, start=1):
                raw = raw.strip()
                if not raw or raw.startswith("#"):
                    continue
                try:
                    x, y = (int(t) for t in raw.split())
                except ValueError:
                    raise InputError(f"{cfg.pairs}: line {lineno}: expected 'x y'") from None
                lines.append(f"{x} {y} {query(o, x, y)!r}")
        _emit("\n".join(lines) + ("\n" if lines else ""), cfg.output)
    elif cmd == "spanner":
        _require(cfg, "input", "seed", "k")
        g = read_graph(cfg.input)
        sp = baswana_sen(g, cfg.k, substream(cfg.seed, "spanner"))
        _emit(format_graph(sp.graph), cfg.output)
    elif cmd == "bench":
        if not cfg.sizes:
            raise InputError("bench: --sizes is empty")
        rep = run_bench(cfg.family, cfg.sizes, cfg.seeds, cfg.seed, cfg.delta, cfg.degree, cfg.weights)
        rows = [r.as_dict() for r in rep.records]
        rows += [{"n": n, "m": m, "mean_relaxations": r, "mean_queue_inserts": q,
                  "relaxations_per_mlog2n": r / (m * math.log2(n)) if n > 1 and m else 0.0}
                 for n, m, r, q in rep.sizes()]
        if len(rep.sizes()) >= 3:
            fit = bench_scaling(rep)
            rows.append({"fit_coefficient": fit.coefficient, "flagged": fit.flagged})
        text = _table(rows) if cfg.format == "table" else "".join(json.dumps(r) + "\n" for r in rows)
        _emit(text, cfg.output)
    else:
        raise InputError(f"unknown command {cmd!r}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fastckr", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, seed=True):
        p.add_argument("--input")
        p.add_argument("--out", dest="output")
        if seed:
            p.add_argument("--seed", type=int)
        p.add_argument("--format", choices=["json", "table"], default="json")

    p = sub.add_parser("partition", help="sample one CKR partition")
    common(p)
    p.add_argument("--delta", type=float)
    p.add_argument("--report")

    p = sub.add_parser("scales", help="dump the processed scales")
    common(p, seed=False)

    p = sub.add_parser("hierarchy", help="sample a hierarchical partition")
    common(p)

    p = sub.add_parser("embed", help="sample an FRT tree")
    common(p)
    p.add_argument("--samples", type=int, default=0)
    p.add_argument("--report")

    p = sub.add_parser("oracle", help="build or query a distance oracle")
    osub = p.add_subparsers(dest="action", required=True)
    b = osub.add_parser("build")
    common(b)
    b.add_argument("--k", type=int)
    b.add_argument("--beta", type=float)
    b.add_argument("--report")
    q = osub.add_parser("query")
    q.add_argument("--oracle")
    q.add_argument("--pairs")
    q.add_argument("--out", dest="output")

    p = sub.add_parser("spanner", help="sample a (2k-1)-spanner")
    common(p)
    p.add_argument("--k", type=int)

    p = sub.add_parser("bench", help="time the fast sampler on generated graphs")
    common(p)
    # run r uses seed base + r, so --seeds alone fixes every draw
    p.set_defaults(seed=0)
    p.add_argument("--family", choices=["cycle", "grid", "regular", "geometric"], default="regular")
    p.add_argument("--sizes", type=_parse_sizes, default=[])
    p.add_argument("--seeds", type=int, default=1)
    p.add_argument("--delta", type=float)
    p.add_argument("--degree", type=int, default=4)
    p.add_argument("--weights", choices=["unit", "uniform"], default="unit")
    return ap


def parse_config(argv=None) -> RunConfig:
    ns = vars(build_parser().parse_args(argv))
    cmd = ns.pop("command")
    if cmd == "oracle":
        cmd = f"oracle-{ns.pop('action')}"
    known = RunConfig.__dataclass_fields__
    return RunConfig(command=cmd, **{k: v for k, v in ns.items() if k in known})


def main(argv=None) -> int:
    try:
        cfg = parse_config(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return run(cfg)
    except AssertionError as exc:
        print(f"fastckr: invariant violated: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (InputError, GraphFormatError, ValueError, KeyError, IndexError, OSError) as exc:
        print(f"fastckr: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
