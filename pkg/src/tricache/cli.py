"""Command-line surface: generation, runs, oracle comparison, cache sweeps.

Exit codes: 0 ok, 1 mismatch (compare), 2 usage error.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys

import numpy as np

from . import engine, experiments, oracle
from .cache import Policy
from .graph import CSR_MAGIC, CsrGraph, RelabelMap, parse_edge_list, preprocess, read_csr
from .partition import build_local, make_partition
from .rmat import RmatParams, generate_rmat
from .window import CostModel, WindowId, WindowStore, tcp_serve

log = logging.getLogger("tricache")

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_USAGE = 2


def _load_graph(path: str, directed: bool, seed: int, relabel: bool,
                fixpoint: bool = False) -> tuple[CsrGraph, RelabelMap]:
    with open(path, "rb") as f:
        magic = f.read(4)
    if magic == CSR_MAGIC:
        with open(path, "rb") as f:
            g = read_csr(f)
        # Binary CSR files are assumed pre-cleaned; identity relabel map.
        el = g.to_edge_list()
        return preprocess(el, seed=seed, relabel=relabel, fixpoint=fixpoint)
    with open(path) as f:
        el = parse_edge_list(f, directed=directed)
    return preprocess(el, seed=seed, relabel=relabel, fixpoint=fixpoint)


def _parse_policy(name: str) -> Policy:
    return {"lru": Policy.LRU, "positional": Policy.LRU_POSITIONAL,
            "degree": Policy.USER_SCORE}[name]


def _add_run_flags(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("input")
    sp.add_argument("--p", type=int, default=1)
    sp.add_argument("--backend", choices=["sim", "tcp"], default="sim")
    sp.add_argument("--alpha", type=float, default=2e-6)
    sp.add_argument("--beta", type=float, default=1e-10)
    sp.add_argument("--policy", choices=["lru", "positional", "degree"], default="degree")
    sp.add_argument("--cache-offsets-bytes", type=int, default=None)
    sp.add_argument("--cache-adj-bytes", type=int, default=None)
    sp.add_argument("--cache-total", type=int, default=None,
                    help="budget split as 16*(n/p) bytes for offsets, rest for adjacency")
    sp.add_argument("--method", choices=["hybrid", "ssi", "binary"], default="hybrid")
    sp.add_argument("--directed", action="store_true")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--relabel", action="store_true")
    sp.add_argument("--fixpoint", action="store_true")
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--cutoff", type=int, default=4096)
    sp.add_argument("--peers", default=None,
                    help="comma-separated host:port list, one per node id")


def _cfg_from_args(args, g: CsrGraph, mode: str) -> engine.RunConfig:
    off_bytes = args.cache_offsets_bytes
    adj_bytes = args.cache_adj_bytes
    if args.cache_total is not None:
        reserved = 16 * (-(-g.n // args.p))
        if off_bytes is None:
            off_bytes = min(reserved, args.cache_total)
        if adj_bytes is None:
            adj_bytes = max(0, args.cache_total - off_bytes)
    peers = None
    if args.peers:
        peers = {}
        for k, hp in enumerate(args.peers.split(",")):
            host, port = hp.rsplit(":", 1)
            peers[k] = (host, int(port))
    return engine.RunConfig(
        p=args.p, backend=args.backend,
        cost=CostModel(alpha=args.alpha, beta=args.beta),
        cache_offsets_bytes=off_bytes or 0,
        cache_adj_bytes=adj_bytes or 0,
        policy=_parse_policy(args.policy),
        method=args.method, mode=mode, workers=args.workers,
        cutoff=args.cutoff, seed=args.seed, peers=peers)


def cmd_gen_rmat(args) -> int:
    params = RmatParams(scale=args.scale, edge_factor=args.ef,
                        a=args.a, b=args.b, c=args.c, d=args.d, seed=args.seed)
    el = generate_rmat(params)
    with open(args.output, "w") as f:
        f.write(f"# R-MAT scale={args.scale} ef={args.ef} seed={args.seed}\n")
        for u, v in el.edges.tolist():
            f.write(f"{u} {v}\n")
    log.info("wrote %d insertions to %s", len(el.edges), args.output)
    return EXIT_OK


def cmd_run(args) -> int:
    mode = args.mode
    g, rmap = _load_graph(args.input, args.directed, args.seed, args.relabel,
                          args.fixpoint)
    cfg = _cfg_from_args(args, g, mode)
    cfg.validate(g)
    result, stats = engine._run(g, cfg)
    if mode == "tc":
        print(f"raw {result.global_raw} triangles {result.global_triangles}")
    if args.output:
        engine.write_scores(args.output, engine.expand_scores(result, rmap))
    if args.stats_csv:
        with open(args.stats_csv, "w") as f:
            f.write(stats.to_csv())
    log.info("makespan %.6g s, imbalance %.3f", stats.makespan_s, stats.imbalance)
    return EXIT_OK


def cmd_sweep(args) -> int:
    g, _ = _load_graph(args.input, args.directed, args.seed, args.relabel)
    sizes = []
    for tok in args.sizes.split(","):
        val = float(tok)
        sizes.append(val if val <= 1.0 else int(val))
    windows = []
    if args.window in ("offsets", "both"):
        windows.append(WindowId.OFFSETS)
    if args.window in ("adjacency", "both"):
        windows.append(WindowId.ADJACENCY)
    spec = experiments.SweepSpec(
        sizes=sizes, windows=windows,
        policies=[_parse_policy(p) for p in args.policies.split(",")],
        repetitions=args.repetitions, seed=args.seed)
    base = _cfg_from_args(args, g, "lcc")
    rows = experiments.sweep(g, spec, base)
    csv = experiments.sweep_csv(rows)
    if args.output:
        with open(args.output, "w") as f:
            f.write(csv)
    else:
        sys.stdout.write(csv)
    return EXIT_OK


def cmd_compare(args) -> int:
    with open(args.input) as f:
        el = parse_edge_list(f, directed=args.directed)
    g, rmap = preprocess(el, seed=args.seed, relabel=args.relabel)
    cfg = _cfg_from_args(args, g, "lcc")
    result, _ = engine.run_lcc(g, cfg)
    ref = oracle.brute_lcc(el)

    worst = 0.0
    worst_vertex = -1
    for orig, score in engine.expand_scores(result, rmap):
        dev = abs(score - ref.lcc[orig])
        if dev > worst:
            worst, worst_vertex = dev, orig
    # Vertices the oracle sees but cleaning removed must score 0 there too.
    print(f"max_abs_deviation {worst:.3e} first_mismatch_vertex "
          f"{worst_vertex if worst > args.tolerance else -1}")
    return EXIT_OK if worst <= args.tolerance else EXIT_MISMATCH


def cmd_tcp_serve(args) -> int:
    g, _ = _load_graph(args.input, args.directed, args.seed, args.relabel)
    part = make_partition(g.n, args.p)
    store = WindowStore()
    for k in range(args.p):
        store.expose(build_local(g, part, k))
    host, port = args.bind.rsplit(":", 1)
    server = tcp_serve(store, (host, int(port)))
    print(f"serving {args.p} partitions of n={g.n} on "
          f"{server.address[0]}:{server.address[1]}", flush=True)
    try:
        server._thread.join()
    except KeyboardInterrupt:
        server.stop()
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="tricache")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen-rmat", help="generate an R-MAT edge list")
    g.add_argument("--scale", type=int, required=True)
    g.add_argument("--ef", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--a", type=float, default=0.57)
    g.add_argument("--b", type=float, default=0.19)
    g.add_argument("--c", type=float, default=0.19)
    g.add_argument("--d", type=float, default=0.05)
    g.add_argument("-o", "--output", required=True)
    g.set_defaults(func=cmd_gen_rmat)

    r = sub.add_parser("run", help="run the distributed LCC / TC engine")
    _add_run_flags(r)
    r.add_argument("--mode", choices=["lcc", "tc"], default="lcc")
    r.add_argument("-o", "--output", default=None)
    r.add_argument("--stats-csv", default=None)
    r.set_defaults(func=cmd_run)

    s = sub.add_parser("sweep", help="cache-capacity sweep, CSV output")
    _add_run_flags(s)
    s.add_argument("--sizes", required=True,
                   help="comma list; values <= 1.0 are fractions of the window extent")
    s.add_argument("--window", choices=["offsets", "adjacency", "both"], default="both")
    s.add_argument("--policies", default="degree")
    s.add_argument("--repetitions", type=int, default=1)
    s.add_argument("-o", "--output", default=None)
    s.set_defaults(func=cmd_sweep)

    c = sub.add_parser("compare", help="engine vs brute-force oracle")
    _add_run_flags(c)
    c.add_argument("--tolerance", type=float, default=1e-12)
    c.set_defaults(func=cmd_compare)

    t = sub.add_parser("tcp-serve", help="serve a graph's windows over TCP")
    t.add_argument("input")
    t.add_argument("--p", type=int, default=1)
    t.add_argument("--directed", action="store_true")
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--relabel", action="store_true")
    t.add_argument("--bind", default="127.0.0.1:0")
    t.set_defaults(func=cmd_tcp_serve)

    return ap


def main(argv=None) -> int:
    level = os.environ.get("TRICACHE_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, FileNotFoundError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
