"""Cache-sweep experiment: miss rate and modeled communication vs capacity.

Each configuration enables caching on one window only (non-cached reads on
the other) and replays the same run over the same preprocessed graph, so
curves across capacities are directly comparable.  Compulsory misses do not
depend on capacity and are emitted once per window as a baseline row.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

from .cache import Policy
from .engine import RunConfig, _run
from .graph import CsrGraph
from .window import WindowId

SWEEP_HEADER = "cache_bytes,window,policy,miss_rate,bytes_net,comm_time_s"


@dataclass
class SweepSpec:
    sizes: list[float]                       # bytes, or fractions (0,1] of the window's full extent
    windows: list[WindowId] = field(default_factory=lambda: [WindowId.OFFSETS, WindowId.ADJACENCY])
    policies: list[Policy] = field(default_factory=lambda: [Policy.USER_SCORE])
    repetitions: int = 1
    seed: int = 0

    def __post_init__(self):
        if not self.sizes:
            raise ValueError("size list must be non-empty")
        for s in self.sizes:
            if s <= 0:
                raise ValueError(f"invalid sweep size {s}")


def window_full_bytes(g: CsrGraph, window: WindowId) -> int:
    """Capacity at which the cache can hold every possible entry."""
    if window == WindowId.OFFSETS:
        return 16 * g.n  # one (start, end) u64 pair per vertex
    return 8 * g.m


def resolve_size(g: CsrGraph, window: WindowId, size: float) -> int:
    if isinstance(size, float) and size <= 1.0:
        return max(1, int(size * window_full_bytes(g, window)))
    return int(size)


@dataclass
class SweepRow:
    cache_bytes: int
    window: WindowId
    policy: str
    miss_rate: float
    bytes_net: int
    comm_time_s: float

    def csv_row(self) -> str:
        return (f"{self.cache_bytes},{self.window.name.lower()},{self.policy},"
                f"{self.miss_rate!r},{self.bytes_net},{self.comm_time_s!r}")


def _one_run(g: CsrGraph, base: RunConfig, window: WindowId, capacity: int,
             policy: Policy) -> tuple[float, int, float, int, int]:
    cfg = dataclasses.replace(
        base,
        cache_offsets_bytes=capacity if window == WindowId.OFFSETS else 0,
        cache_adj_bytes=capacity if window == WindowId.ADJACENCY else 0,
        policy=policy,
    )
    _, stats = _run(g, cfg)
    gets = stats.total("gets_offsets") + stats.total("gets_adj")
    hits = stats.total("hits_offsets") + stats.total("hits_adj")
    misses = gets - hits
    miss_rate = misses / gets if gets else 0.0
    return (miss_rate, stats.total("bytes_net"), sum(s.comm_time_s for s in stats.nodes),
            stats.total("compulsory"), gets)


def sweep(g: CsrGraph, spec: SweepSpec, base: RunConfig) -> list[SweepRow]:
    """Run the full sweep; data rows first, then one baseline row per window."""
    rows = []
    baselines = {}
    for window in spec.windows:
        for policy in spec.policies:
            for size in spec.sizes:
                capacity = resolve_size(g, window, size)
                for _ in range(spec.repetitions):
                    miss_rate, bytes_net, comm, compulsory, gets = _one_run(
                        g, base, window, capacity, policy)
                    rows.append(SweepRow(capacity, window, policy.value,
                                         miss_rate, bytes_net, comm))
                    if window not in baselines and gets:
                        baselines[window] = compulsory / gets
    for window in spec.windows:
        rows.append(SweepRow(0, window, "compulsory-baseline",
                             baselines.get(window, 0.0), 0, 0.0))
    return rows


def sweep_csv(rows: list[SweepRow]) -> str:
    return "\n".join([SWEEP_HEADER] + [r.csv_row() for r in rows]) + "\n"
