"""Distributed LCC / triangle-count engine over one-sided cached reads.

Each simulated node independently walks its owned vertices, fetching remote
adjacency lists through two window gets (offsets pair, then the list) that
may be served by per-window caches.  Nodes never wait on each other; all
communication is pull-only.  Results are invariant to the node count, the
backend, caching, and the intersection method.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from . import intersect
from .cache import CacheConfig, Policy, RmaCache, cached_get, suggest_table_slots
from .graph import CsrGraph, RelabelMap
from .partition import LocalCsr, Partition1D, build_local, make_partition, owner_array
from .window import (CostModel, GetRequest, NodePort, WindowId, WindowStore,
                     TcpTransport, tcp_serve)

CSV_HEADER = ("node,local_reads,remote_reads,gets_offsets,hits_offsets,"
              "gets_adj,hits_adj,compulsory,evictions,bytes_net,bytes_cache,"
              "comm_time_s,overlap_time_s,compute_time_s,triangles")


@dataclass
class RunConfig:
    p: int = 1
    backend: str = "sim"              # "sim" | "tcp"
    cost: CostModel = field(default_factory=CostModel)
    cache_offsets_bytes: int = 0      # 0 disables the offsets cache
    cache_adj_bytes: int = 0          # 0 disables the adjacency cache
    policy: Policy = Policy.USER_SCORE
    method: str = "hybrid"            # "hybrid" | "ssi" | "binary"
    mode: str = "lcc"                 # "lcc" | "tc"
    workers: int = 1
    cutoff: int = intersect.DEFAULT_CUTOFF
    seed: int = 0
    compute_ns: float = 1.0           # modeled ns per comparison
    record_trace: bool = False        # keep per-edge and remote-target traces
    peers: dict[int, tuple[str, int]] | None = None  # external TCP servers

    def validate(self, g: CsrGraph) -> None:
        if self.p < 1:
            raise ValueError("p must be >= 1")
        if self.backend not in ("sim", "tcp"):
            raise ValueError(f"unknown backend {self.backend!r}")
        if self.method not in ("hybrid", "ssi", "binary"):
            raise ValueError(f"unknown method {self.method!r}")
        if self.mode not in ("lcc", "tc"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.mode == "tc" and g.directed:
            raise ValueError("global triangle counting requires an undirected graph")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        if self.peers is not None and self.backend != "tcp":
            raise ValueError("--peers requires the tcp backend")


@dataclass
class NodeStats:
    node: int
    local_reads: int = 0
    remote_reads: int = 0
    gets_offsets: int = 0
    hits_offsets: int = 0
    gets_adj: int = 0
    hits_adj: int = 0
    compulsory: int = 0
    evictions: int = 0
    bytes_net: int = 0
    bytes_cache: int = 0
    comm_time_s: float = 0.0
    overlap_time_s: float = 0.0
    compute_time_s: float = 0.0
    triangles: int = 0

    def csv_row(self) -> str:
        return (f"{self.node},{self.local_reads},{self.remote_reads},"
                f"{self.gets_offsets},{self.hits_offsets},{self.gets_adj},"
                f"{self.hits_adj},{self.compulsory},{self.evictions},"
                f"{self.bytes_net},{self.bytes_cache},{self.comm_time_s!r},"
                f"{self.overlap_time_s!r},{self.compute_time_s!r},{self.triangles}")


@dataclass
class RunStats:
    nodes: list[NodeStats]
    makespan_s: float
    imbalance: float
    seed: int
    traces: dict = field(default_factory=dict)          # node -> window events
    remote_targets: dict = field(default_factory=dict)  # node -> [vertex ids]
    edge_costs: dict = field(default_factory=dict)      # node -> (fetch, compute)
    caches: dict = field(default_factory=dict)          # (node, window) -> RmaCache

    def to_csv(self) -> str:
        return "\n".join([CSV_HEADER] + [s.csv_row() for s in self.nodes]) + "\n"

    def total(self, attr: str):
        return sum(getattr(s, attr) for s in self.nodes)


@dataclass
class LccResult:
    scores: np.ndarray | None       # per processed vertex, float64
    triangles: np.ndarray           # per processed vertex intersection totals
    global_raw: int | None = None   # sum of upper-triangle edge counts (= 3T)
    global_triangles: int | None = None


def lcc_score(t: int, d: int) -> float:
    """LCC from the intersection total; vertices of out-degree < 2 score 0.

    With both directions of an undirected edge stored, ``t`` double-counts
    each neighbor edge, so the single expression covers the directed and
    undirected definitions alike.
    """
    if d < 2:
        return 0.0
    return t / (d * (d - 1))


def expected_remote_reads(deg_in: int, p: int) -> float:
    """Expected repeat accesses per non-owner node, (deg_in - p) / p, clamped."""
    if p < 1:
        raise ValueError("p must be >= 1")
    return max(0.0, (deg_in - p) / p)


def overlap_estimate(fetch, compute) -> float:
    """Double-buffering pipeline time: f1 + sum(max(c_e, f_{e+1})) + c_last."""
    fetch = list(fetch)
    compute = list(compute)
    if len(fetch) != len(compute):
        raise ValueError("fetch and compute sequences must have equal length")
    if not fetch:
        return 0.0
    t = fetch[0]
    for c, f in zip(compute[:-1], fetch[1:]):
        t += max(c, f)
    return t + compute[-1]


def reuse_histogram(trace) -> dict[int, int]:
    """Map reuse count -> number of distinct remote targets read that often."""
    per_target = Counter(trace)
    return dict(Counter(per_target.values()))


def top_decile_fraction(trace, degrees: np.ndarray) -> float:
    """Fraction of remote reads that target the top-10%-degree vertices."""
    trace = list(trace)
    if not trace:
        return 0.0
    n = len(degrees)
    top = max(1, n // 10)
    top_ids = set(np.argsort(degrees, kind="stable")[::-1][:top].tolist())
    return sum(1 for v in trace if v in top_ids) / len(trace)


def _make_cache(cfg: RunConfig, g: CsrGraph, window: WindowId) -> RmaCache | None:
    capacity = cfg.cache_offsets_bytes if window == WindowId.OFFSETS else cfg.cache_adj_bytes
    if capacity <= 0:
        return None
    slots = suggest_table_slots(g.n, capacity, max(1, 8 * g.m), window)
    policy = Policy.LRU if window == WindowId.OFFSETS else cfg.policy
    return RmaCache(CacheConfig(capacity_bytes=capacity, table_slots=slots, policy=policy))


def _compute_cost(len_a: int, len_b: int, method: str, cfg: RunConfig) -> float:
    if len_a > len_b:
        len_a, len_b = len_b, len_a
    if method == "hybrid":
        method = ("ssi" if intersect.choose_method(len_a, len_b) is intersect.Method.SSI
                  else "binary")
    if method == "ssi":
        work = len_a + len_b
    else:
        work = len_a * max(1, len_b.bit_length())
    return work * cfg.compute_ns * 1e-9


def _run_node(k: int, g: CsrGraph, part: Partition1D, owners: np.ndarray,
              local: LocalCsr, port: NodePort, cfg: RunConfig,
              cache_off: RmaCache | None, cache_adj: RmaCache | None,
              tri_out: np.ndarray):
    """Walk node k's owned vertices; returns its NodeStats and traces."""
    stats = NodeStats(node=k)
    offsets = local.csr.offsets
    adjacencies = local.csr.adjacencies
    base = local.base
    bounds = part.bounds
    tc_mode = cfg.mode == "tc"
    method = cfg.method
    parallel = cfg.workers > 1 and method == "hybrid"
    targets: list[int] = []
    fetch_costs: list[float] = []
    compute_costs: list[float] = []
    record = cfg.record_trace

    port.open_epoch()
    state = port.state
    compute_time = 0.0
    overlap_time = 0.0
    prev_compute = 0.0
    first_edge = True

    for lv in range(local.csr.n):
        s = offsets[lv]
        e = offsets[lv + 1]
        a = adjacencies[s:e]
        total = 0
        for j in a.tolist():
            t_owner = owners[j]
            comm_before = state.comm_time
            if t_owner == k:
                ls = offsets[j - base]
                le = offsets[j - base + 1]
                b = adjacencies[ls:le]
                stats.local_reads += 1
            else:
                pair = cached_get(cache_off, port.get,
                                  GetRequest(int(t_owner), WindowId.OFFSETS,
                                             int(j - bounds[t_owner]), 2))
                rs, re_ = int(pair[0]), int(pair[1])
                b = cached_get(cache_adj, port.get,
                               GetRequest(int(t_owner), WindowId.ADJACENCY,
                                          rs, re_ - rs), score_hint=re_ - rs)
                if record:
                    targets.append(j)
            if tc_mode:
                total += intersect.count_above(a, b, floor=j)
            elif parallel:
                total += intersect.parallel_count(a, b, cfg.workers, cfg.cutoff)
            elif method == "ssi":
                total += intersect.ssi_count(a, b)
            elif method == "binary":
                total += (intersect.binary_count(a, b) if len(a) <= len(b)
                          else intersect.binary_count(b, a))
            else:
                total += intersect.hybrid_count(a, b)

            fetch = state.comm_time - comm_before
            c_cost = _compute_cost(len(a), len(b), method, cfg)
            compute_time += c_cost
            if first_edge:
                overlap_time += fetch
                first_edge = False
            else:
                overlap_time += max(prev_compute, fetch)
            prev_compute = c_cost
            if record:
                fetch_costs.append(fetch)
                compute_costs.append(c_cost)
        tri_out[lv] = total
    if not first_edge:
        overlap_time += prev_compute
    port.flush()
    port.close_epoch()

    stats.remote_reads = state.gets
    stats.bytes_net = state.bytes_moved
    stats.comm_time_s = state.comm_time
    stats.compute_time_s = compute_time
    stats.overlap_time_s = overlap_time
    stats.triangles = int(tri_out.sum())
    for cache, gets_attr, hits_attr in ((cache_off, "gets_offsets", "hits_offsets"),
                                        (cache_adj, "gets_adj", "hits_adj")):
        if cache is not None:
            setattr(stats, gets_attr, cache.stats.gets)
            setattr(stats, hits_attr, cache.stats.hits)
            stats.compulsory += cache.stats.compulsory_misses
            stats.evictions += cache.stats.evictions
            stats.bytes_cache += cache.stats.bytes_from_cache
    return stats, targets, fetch_costs, compute_costs


def _run(g: CsrGraph, cfg: RunConfig) -> tuple[LccResult, RunStats]:
    cfg.validate(g)
    part = make_partition(g.n, cfg.p)
    owners = owner_array(part)
    locals_ = [build_local(g, part, k) for k in range(cfg.p)]

    store = WindowStore()
    for local in locals_:
        store.expose(local)

    server = None
    if cfg.backend == "tcp":
        if cfg.peers is None:
            server = tcp_serve(store)
            transports = [TcpTransport(server.address) for _ in range(cfg.p)]
        else:
            transports = [TcpTransport(cfg.peers) for _ in range(cfg.p)]
    else:
        transports = [store.read for _ in range(cfg.p)]

    triangles = np.zeros(g.n, dtype=np.int64)
    node_stats = []
    stats = RunStats(nodes=node_stats, makespan_s=0.0, imbalance=1.0, seed=cfg.seed)
    try:
        for k, local in enumerate(locals_):
            port = NodePort(k, transports[k], cfg.cost, record_trace=cfg.record_trace)
            cache_off = _make_cache(cfg, g, WindowId.OFFSETS)
            cache_adj = _make_cache(cfg, g, WindowId.ADJACENCY)
            lo, hi = int(part.bounds[k]), int(part.bounds[k + 1])
            ns, targets, fetch, compute = _run_node(
                k, g, part, owners, local, port, cfg, cache_off, cache_adj,
                triangles[lo:hi])
            node_stats.append(ns)
            stats.traces[k] = port.state.trace
            if cfg.record_trace:
                stats.remote_targets[k] = targets
                stats.edge_costs[k] = (fetch, compute)
            if cache_off is not None:
                stats.caches[(k, WindowId.OFFSETS)] = cache_off
            if cache_adj is not None:
                stats.caches[(k, WindowId.ADJACENCY)] = cache_adj
    finally:
        for t in transports:
            if isinstance(t, TcpTransport):
                t.close()
        if server is not None:
            server.stop()

    totals = [s.comm_time_s + s.compute_time_s for s in node_stats]
    stats.makespan_s = max(totals) if totals else 0.0
    mean = sum(totals) / len(totals) if totals else 0.0
    stats.imbalance = (stats.makespan_s / mean) if mean > 0 else 1.0

    if cfg.mode == "tc":
        raw = int(triangles.sum())
        result = LccResult(scores=None, triangles=triangles,
                           global_raw=raw, global_triangles=raw // 3)
    else:
        degrees = np.diff(g.offsets)
        scores = np.zeros(g.n, dtype=np.float64)
        d = degrees.astype(np.float64)
        mask = degrees >= 2
        scores[mask] = triangles[mask] / (d[mask] * (d[mask] - 1))
        result = LccResult(scores=scores, triangles=triangles)
    return result, stats


def run_lcc(g: CsrGraph, cfg: RunConfig) -> tuple[LccResult, RunStats]:
    """Per-vertex LCC scores and triangle totals with full run statistics."""
    if cfg.mode != "lcc":
        raise ValueError("run_lcc requires mode='lcc'")
    return _run(g, cfg)


def run_global_tc(g: CsrGraph, cfg: RunConfig) -> tuple[LccResult, RunStats]:
    """Global triangle count via the upper-triangle (k > j) per-edge rule."""
    if cfg.mode != "tc":
        raise ValueError("run_global_tc requires mode='tc'")
    return _run(g, cfg)


def expand_scores(result: LccResult, rmap: RelabelMap) -> list[tuple[int, float]]:
    """Scores keyed by original input ids; removed vertices score 0."""
    out = []
    for orig in rmap.original_ids().tolist():
        new = int(rmap.new_of_old[orig])
        score = float(result.scores[new]) if (new >= 0 and result.scores is not None) else 0.0
        out.append((orig, score))
    return out


def write_scores(path, pairs) -> None:
    """Text output: one '<id> <score>' line, 12 significant digits."""
    with open(path, "w") as f:
        for vid, score in pairs:
            f.write(f"{vid} {score:.12g}\n")
