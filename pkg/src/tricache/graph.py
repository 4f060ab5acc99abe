"""Edge-list parsing, cleaning and CSR graph representation.

Graphs are cleaned before any analysis: self-loops and duplicate edges are
dropped, vertices that cannot lie on a triangle (degree below two) are
removed, and the survivors are compacted to a dense id range, optionally
through a seeded random permutation.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from typing import IO, Iterable

import numpy as np

CSR_MAGIC = b"CSR1"


class ParseError(ValueError):
    """Raised for malformed edge-list input; carries the offending line number."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass
class EdgeList:
    """Raw (src, dst) pairs as parsed or generated, before any cleaning."""

    directed: bool
    n_hint: int
    edges: np.ndarray  # shape (m, 2), int64

    def __post_init__(self):
        self.edges = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)


@dataclass(frozen=True)
class CsrGraph:
    """Immutable CSR graph with sorted, duplicate-free adjacency slices.

    For undirected graphs both edge directions are stored explicitly, so
    ``m`` counts stored (directed) edges.
    """

    directed: bool
    n: int
    m: int
    offsets: np.ndarray      # length n+1, int64
    adjacencies: np.ndarray  # length m, int64

    def degree(self, v: int) -> int:
        if not 0 <= v < self.n:
            raise IndexError(f"vertex {v} out of range [0, {self.n})")
        return int(self.offsets[v + 1] - self.offsets[v])

    def adjacency(self, v: int) -> np.ndarray:
        """Sorted neighbor slice of v (a read-only view)."""
        if not 0 <= v < self.n:
            raise IndexError(f"vertex {v} out of range [0, {self.n})")
        return self.adjacencies[self.offsets[v]:self.offsets[v + 1]]

    def to_edge_list(self) -> EdgeList:
        src = np.repeat(np.arange(self.n, dtype=np.int64), np.diff(self.offsets))
        edges = np.column_stack([src, self.adjacencies])
        return EdgeList(directed=self.directed, n_hint=self.n, edges=edges)


@dataclass
class RelabelMap:
    """Mapping between original vertex ids and the compacted id space.

    ``new_of_old[orig]`` is -1 for removed vertices; ``removed`` lists the
    original ids dropped by cleaning (only ids that appeared in the input).
    """

    new_of_old: np.ndarray  # length n_hint, int64, -1 where removed/unseen
    old_of_new: np.ndarray  # length n, int64
    removed: set = field(default_factory=set)
    seed: int | None = None

    @property
    def forward(self) -> dict:
        keep = self.new_of_old >= 0
        return {int(o): int(self.new_of_old[o]) for o in np.nonzero(keep)[0]}

    def original_ids(self) -> np.ndarray:
        """All input ids covered by the map (survivors plus removed), sorted."""
        survivors = np.nonzero(self.new_of_old >= 0)[0]
        return np.union1d(survivors, np.fromiter(self.removed, dtype=np.int64, count=len(self.removed)))


def parse_edge_list(stream: Iterable[str] | str, directed: bool) -> EdgeList:
    """Parse SNAP-style text: '#' comments, whitespace-separated id pairs."""
    if isinstance(stream, str):
        stream = stream.splitlines()
    srcs, dsts = [], []
    for lineno, line in enumerate(stream, start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ParseError(f"expected 'u v', got {line!r}", lineno)
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError(f"non-integer vertex id in {line!r}", lineno) from None
        if u < 0 or v < 0:
            raise ParseError(f"negative vertex id in {line!r}", lineno)
        srcs.append(u)
        dsts.append(v)
    edges = np.column_stack([
        np.asarray(srcs, dtype=np.int64),
        np.asarray(dsts, dtype=np.int64),
    ]) if srcs else np.empty((0, 2), dtype=np.int64)
    n_hint = int(edges.max()) + 1 if len(edges) else 0
    return EdgeList(directed=directed, n_hint=n_hint, edges=edges)


def _dedup(edges: np.ndarray) -> np.ndarray:
    if len(edges) == 0:
        return edges
    edges = edges[edges[:, 0] != edges[:, 1]]  # self-loops
    return np.unique(edges, axis=0)


def _degrees(edges: np.ndarray, n: int, directed: bool) -> np.ndarray:
    # Total degree: for directed graphs in-degree and out-degree both count.
    deg = np.bincount(edges[:, 0], minlength=n)
    if directed:
        deg = deg + np.bincount(edges[:, 1], minlength=n)
    else:
        # Undirected edges are already symmetrized; out-degree is the degree.
        pass
    return deg


def preprocess(
    el: EdgeList,
    seed: int = 0,
    relabel: bool = False,
    fixpoint: bool = False,
) -> tuple[CsrGraph, RelabelMap]:
    """Clean an edge list and build the CSR graph.

    Removes self-loops and duplicates, symmetrizes undirected input, drops
    vertices of total degree below two (single pass by default, iterated to
    a fixpoint with ``fixpoint=True``) and compacts the survivors to a dense
    0..n-1 range.  With ``relabel`` the survivors are shuffled by a seeded
    permutation instead of keeping input order.
    """
    n_hint = max(el.n_hint, int(el.edges.max()) + 1 if len(el.edges) else 0)
    edges = el.edges
    if not el.directed and len(edges):
        edges = np.concatenate([edges, edges[:, ::-1]])
    edges = _dedup(edges)

    seen = np.zeros(n_hint, dtype=bool)
    if len(edges):
        seen[edges[:, 0]] = True
        seen[edges[:, 1]] = True

    while True:
        deg = _degrees(edges, n_hint, el.directed)
        low = np.nonzero((deg > 0) & (deg < 2))[0]
        if len(low) == 0:
            break
        drop = np.zeros(n_hint, dtype=bool)
        drop[low] = True
        if len(edges):
            edges = edges[~(drop[edges[:, 0]] | drop[edges[:, 1]])]
        if not fixpoint:
            break

    # Survivors are the endpoints still carrying an edge; isolated vertices
    # (including those orphaned by the removal above) are dropped.
    alive = np.zeros(n_hint, dtype=bool)
    if len(edges):
        alive[edges[:, 0]] = True
        alive[edges[:, 1]] = True
    survivors = np.nonzero(alive)[0]
    n = len(survivors)

    new_of_old = np.full(n_hint, -1, dtype=np.int64)
    if relabel:
        rng = np.random.Generator(np.random.PCG64(seed))
        perm = rng.permutation(n)
    else:
        perm = np.arange(n, dtype=np.int64)
    new_of_old[survivors] = perm
    old_of_new = np.empty(n, dtype=np.int64)
    old_of_new[perm] = survivors

    removed = set(int(v) for v in np.nonzero(seen & ~alive)[0])
    rmap = RelabelMap(new_of_old=new_of_old, old_of_new=old_of_new,
                      removed=removed, seed=seed if relabel else None)

    if len(edges):
        edges = np.column_stack([new_of_old[edges[:, 0]], new_of_old[edges[:, 1]]])
        order = np.lexsort((edges[:, 1], edges[:, 0]))
        edges = edges[order]
        offsets = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(edges[:, 0], minlength=n), out=offsets[1:])
        adj = np.ascontiguousarray(edges[:, 1])
    else:
        offsets = np.zeros(n + 1, dtype=np.int64)
        adj = np.empty(0, dtype=np.int64)

    g = CsrGraph(directed=el.directed, n=n, m=len(adj), offsets=offsets, adjacencies=adj)
    return g, rmap


def degree(g: CsrGraph, v: int) -> int:
    return g.degree(v)


def adjacency(g: CsrGraph, v: int) -> np.ndarray:
    return g.adjacency(v)


def validate(g: CsrGraph) -> list[str]:
    """Check CSR invariants; returns human-readable violations (empty if ok)."""
    out = []
    if len(g.offsets) != g.n + 1:
        out.append(f"offsets length {len(g.offsets)} != n+1 = {g.n + 1}")
        return out
    if g.n >= 0 and g.offsets[0] != 0:
        out.append("offsets[0] != 0")
    if g.offsets[g.n] != g.m:
        out.append(f"offsets[n] = {g.offsets[g.n]} != m = {g.m}")
    diffs = np.diff(g.offsets)
    bad = np.nonzero(diffs < 0)[0]
    if len(bad):
        out.append(f"offsets non-monotone @{bad[0]}")
        return out
    if len(g.adjacencies) != g.m:
        out.append(f"adjacencies length {len(g.adjacencies)} != m = {g.m}")
        return out
    for v in range(g.n):
        sl = g.adjacencies[g.offsets[v]:g.offsets[v + 1]]
        if len(sl) and (sl.min() < 0 or sl.max() >= g.n):
            out.append(f"adjacency id out of range @{v}")
            continue
        if len(sl) > 1 and not np.all(np.diff(sl) > 0):
            out.append(f"slice unsorted @{v}")
    if not g.directed and not out:
        el = g.to_edge_list().edges
        fwd = set(map(tuple, el.tolist()))
        for u, v in fwd:
            if (v, u) not in fwd:
                out.append(f"missing reverse edge ({v},{u})")
                break
    return out


def write_csr(g: CsrGraph, f: IO[bytes]) -> None:
    """Binary CSR: magic, u8 directed, u64 n, u64 m, offsets, adjacencies (LE u64)."""
    f.write(CSR_MAGIC)
    f.write(struct.pack("<BQQ", 1 if g.directed else 0, g.n, g.m))
    f.write(g.offsets.astype("<u8").tobytes())
    f.write(g.adjacencies.astype("<u8").tobytes())


def read_csr(f: IO[bytes]) -> CsrGraph:
    magic = f.read(4)
    if magic != CSR_MAGIC:
        raise ValueError(f"bad CSR magic {magic!r}")
    directed, n, m = struct.unpack("<BQQ", f.read(17))
    offsets = np.frombuffer(f.read(8 * (n + 1)), dtype="<u8").astype(np.int64)
    adj = np.frombuffer(f.read(8 * m), dtype="<u8").astype(np.int64)
    if len(offsets) != n + 1 or len(adj) != m:
        raise ValueError("truncated CSR file")
    return CsrGraph(directed=bool(directed), n=int(n), m=int(m),
                    offsets=offsets, adjacencies=adj)
