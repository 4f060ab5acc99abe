"""1D contiguous vertex partitioning and per-node local CSR extraction."""

from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import IO

import numpy as np

from .graph import CsrGraph

PRT_MAGIC = b"PRT1"


@dataclass(frozen=True)
class Partition1D:
    n: int
    p: int
    bounds: np.ndarray  # length p+1, int64

    def size(self, k: int) -> int:
        return int(self.bounds[k + 1] - self.bounds[k])


@dataclass(frozen=True)
class LocalCsr:
    """Rows owned by one node; offsets rebased to 0, adjacency ids global."""

    node: int
    base: int
    csr: CsrGraph


def make_partition(n: int, p: int) -> Partition1D:
    """Contiguous ranges with bounds[k] = ceil(k*n/p); sizes differ by at most 1."""
    if p < 1:
        raise ValueError("p must be >= 1")
    if n < 0:
        raise ValueError("n must be >= 0")
    k = np.arange(p + 1, dtype=np.int64)
    bounds = -(-k * n // p)  # ceil division
    return Partition1D(n=n, p=p, bounds=bounds)


def owner(part: Partition1D, v: int) -> int:
    if not 0 <= v < part.n:
        raise IndexError(f"vertex {v} out of range [0, {part.n})")
    return int(np.searchsorted(part.bounds, v, side="right")) - 1


def owner_array(part: Partition1D) -> np.ndarray:
    """Per-vertex owner lookup table (fast path for hot loops)."""
    owners = np.zeros(part.n, dtype=np.int32)
    for k in range(part.p):
        owners[part.bounds[k]:part.bounds[k + 1]] = k
    return owners


def build_local(g: CsrGraph, part: Partition1D, k: int) -> LocalCsr:
    if not 0 <= k < part.p:
        raise ValueError(f"node {k} out of range [0, {part.p})")
    lo, hi = int(part.bounds[k]), int(part.bounds[k + 1])
    offsets = (g.offsets[lo:hi + 1] - g.offsets[lo]).astype(np.int64)
    adj = np.ascontiguousarray(g.adjacencies[g.offsets[lo]:g.offsets[hi]])
    local = CsrGraph(directed=g.directed, n=hi - lo, m=len(adj),
                     offsets=offsets, adjacencies=adj)
    return LocalCsr(node=k, base=lo, csr=local)


def cross_edge_fraction(g: CsrGraph, part: Partition1D) -> float:
    """Fraction of stored edges whose endpoints are owned by different nodes."""
    if g.m == 0:
        return 0.0
    owners = owner_array(part)
    src = np.repeat(np.arange(g.n, dtype=np.int64), np.diff(g.offsets))
    return float(np.mean(owners[src] != owners[g.adjacencies]))


def write_partition(local: LocalCsr, part: Partition1D, f: IO[bytes]) -> None:
    """Per-node partition file: PRT1 magic, u64 n/p/k, then CSR1 payload."""
    from .graph import write_csr

    f.write(PRT_MAGIC)
    f.write(struct.pack("<QQQ", part.n, part.p, local.node))
    write_csr(local.csr, f)


def read_partition(f: IO[bytes]) -> tuple[LocalCsr, Partition1D]:
    from .graph import read_csr

    magic = f.read(4)
    if magic != PRT_MAGIC:
        raise ValueError(f"bad partition magic {magic!r}")
    n, p, k = struct.unpack("<QQQ", f.read(24))
    part = make_partition(int(n), int(p))
    csr = read_csr(f)
    return LocalCsr(node=int(k), base=int(part.bounds[k]), csr=csr), part
