"""Brute-force reference implementations for triangle counts and LCC.

Deliberately naive: edge-set membership tests over Python sets, no CSR, no
sorted-list kernels, no partitioning.  Desk-scale inputs only.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .graph import EdgeList

SCALE_GUARD = 1 << 15


@dataclass
class OracleResult:
    triangles: np.ndarray   # per-vertex intersection totals (ordered pairs)
    lcc: np.ndarray         # per-vertex clustering coefficient
    global_triangles: int   # distinct vertex triples (undirected only, else 0)


def _adjacency_sets(el: EdgeList) -> tuple[int, list[set], set]:
    n = el.n_hint
    if n > SCALE_GUARD:
        raise ValueError(f"oracle refuses n={n} > {SCALE_GUARD}")
    adj = [set() for _ in range(n)]
    edges = set()
    for u, v in el.edges.tolist():
        if u == v:
            continue
        adj[u].add(v)
        edges.add((u, v))
        if not el.directed:
            adj[v].add(u)
            edges.add((v, u))
    return n, adj, edges


def brute_lcc(el: EdgeList) -> OracleResult:
    """Per-vertex numerators by direct (j, k) edge-membership testing.

    The numerator counts ordered neighbor pairs with an edge between them,
    which matches the engine's sum of intersection sizes for both the
    directed and the (double-stored) undirected formulation.
    """
    n, adj, edges = _adjacency_sets(el)
    tri = np.zeros(n, dtype=np.int64)
    lcc = np.zeros(n, dtype=np.float64)
    for i in range(n):
        a = adj[i]
        t = 0
        for j in a:
            for k in a:
                if (j, k) in edges:
                    t += 1
        tri[i] = t
        d = len(a)
        if d >= 2:
            lcc[i] = t / (d * (d - 1))
    return OracleResult(triangles=tri, lcc=lcc,
                        global_triangles=brute_triangles(el) if not el.directed else 0)


def brute_triangles(el: EdgeList) -> int:
    """Count vertex triples {i, j, k} with all three edges present."""
    if el.directed:
        raise ValueError("brute_triangles requires an undirected edge list")
    n, adj, edges = _adjacency_sets(el)
    count = 0
    for i in range(n):
        for j, k in combinations(sorted(adj[i]), 2):
            if j > i and k > i and (j, k) in edges:
                count += 1
    return count
