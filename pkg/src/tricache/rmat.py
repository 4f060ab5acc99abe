"""R-MAT synthetic graph generation (plain Chakrabarti model, no smoothing).

An instance with scale x and edge factor y draws ``y * 2**x`` edge
insertions over ``2**x`` vertices by recursive quadrant selection.
Duplicates and self-loops are left in; cleaning happens in preprocessing.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import EdgeList

MAX_SCALE = 40  # 2^40 vertices: anything beyond is past address-space sanity


@dataclass(frozen=True)
class RmatParams:
    scale: int
    edge_factor: int
    a: float = 0.57
    b: float = 0.19
    c: float = 0.19
    d: float = 0.05
    seed: int = 0

    def __post_init__(self):
        if self.scale < 1:
            raise ValueError("scale must be >= 1")
        if self.edge_factor < 1:
            raise ValueError("edge_factor must be >= 1")
        if abs(self.a + self.b + self.c + self.d - 1.0) > 1e-9:
            raise ValueError("quadrant probabilities must sum to 1")
        if min(self.a, self.b, self.c, self.d) < 0:
            raise ValueError("quadrant probabilities must be non-negative")


def generate_rmat(p: RmatParams) -> EdgeList:
    """Draw all edge insertions; deterministic for a fixed seed."""
    if p.scale > MAX_SCALE:
        raise ValueError(f"scale {p.scale} exceeds supported maximum {MAX_SCALE}")
    n = 1 << p.scale
    m = p.edge_factor * n
    rng = np.random.Generator(np.random.PCG64(p.seed))
    src = np.zeros(m, dtype=np.int64)
    dst = np.zeros(m, dtype=np.int64)
    # One quadrant choice per bit level, most significant bit first.
    for _ in range(p.scale):
        r = rng.random(m)
        src_bit = r >= p.a + p.b
        dst_bit = ((r >= p.a) & ~src_bit) | (r >= p.a + p.b + p.c)
        src = (src << 1) | src_bit
        dst = (dst << 1) | dst_bit
    edges = np.column_stack([src, dst])
    return EdgeList(directed=False, n_hint=n, edges=edges)
