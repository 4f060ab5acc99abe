"""Sorted-adjacency intersection kernels: binary search, SSI, hybrid, parallel.

All kernels count ``|A ∩ B|`` for strictly increasing int64 arrays.  The
hybrid dispatcher picks SSI when a merge scan is cheaper than ``|A|`` binary
lookups, using an exact integer form of the length-ratio rule so the choice
is deterministic across platforms.
"""

from __future__ import annotations

import enum
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from numba import njit

DEFAULT_CUTOFF = 4096

_pool: ThreadPoolExecutor | None = None


class Method(enum.Enum):
    BINARY_SEARCH = "binary"
    SSI = "ssi"


@njit(cache=True, nogil=True)
def _ssi_kernel(a, b):
    count = 0
    i = 0
    j = 0
    na = len(a)
    nb = len(b)
    while i < na and j < nb:
        x = a[i]
        y = b[j]
        if x == y:
            count += 1
            i += 1
            j += 1
        elif x < y:
            i += 1
        else:
            j += 1
    return count


@njit(cache=True, nogil=True)
def _binary_kernel(keys, tree):
    count = 0
    nt = len(tree)
    for k in range(len(keys)):
        x = keys[k]
        lo = 0
        hi = nt
        while lo < hi:
            mid = (lo + hi) // 2
            if tree[mid] < x:
                lo = mid + 1
            else:
                hi = mid
        if lo < nt and tree[lo] == x:
            count += 1
    return count


def _as_kernel_arg(a) -> np.ndarray:
    return np.ascontiguousarray(a, dtype=np.int64)


def ssi_count(a, b) -> int:
    """Two-pointer merge scan; O(|A| + |B|) comparisons."""
    return int(_ssi_kernel(_as_kernel_arg(a), _as_kernel_arg(b)))


def binary_count(keys, tree) -> int:
    """One binary search per key; callers should pass the shorter list as keys."""
    return int(_binary_kernel(_as_kernel_arg(keys), _as_kernel_arg(tree)))


def choose_method(len_a: int, len_b: int) -> Method:
    """Pick SSI when the merge scan beats |A| lookups (len_a <= len_b).

    Exact integer evaluation of len_b/len_a <= log2(len_b) - 1, with
    floor(log2) and ties going to binary search.
    """
    if len_b < 1:
        return Method.BINARY_SEARCH
    floor_log2 = len_b.bit_length() - 1
    if len_b <= len_a * (floor_log2 - 1):
        return Method.SSI
    return Method.BINARY_SEARCH


def hybrid_count(a, b) -> int:
    """Dispatch between SSI and binary search by list lengths."""
    a = _as_kernel_arg(a)
    b = _as_kernel_arg(b)
    if len(a) > len(b):
        a, b = b, a
    if choose_method(len(a), len(b)) is Method.SSI:
        return int(_ssi_kernel(a, b))
    return int(_binary_kernel(a, b))


def count_above(a, b, floor: int) -> int:
    """|{x in A ∩ B : x > floor}|, the upper-triangle de-duplication count."""
    a = _as_kernel_arg(a)
    b = _as_kernel_arg(b)
    a = a[np.searchsorted(a, floor, side="right"):]
    b = b[np.searchsorted(b, floor, side="right"):]
    return hybrid_count(a, b)


def _get_pool() -> ThreadPoolExecutor:
    global _pool
    if _pool is None:
        _pool = ThreadPoolExecutor(max_workers=8, thread_name_prefix="intersect")
    return _pool


def parallel_count(a, b, workers: int = 1, cutoff: int = DEFAULT_CUTOFF) -> int:
    """Chunked parallel intersection; identical value to hybrid_count.

    Binary-search mode splits the keys array into even chunks; SSI mode
    splits the longer array and each worker locates its start in the shorter
    array by binary search.  Below ``cutoff`` combined elements the work is
    done sequentially.
    """
    if workers < 1:
        raise ValueError("workers must be >= 1")
    a = _as_kernel_arg(a)
    b = _as_kernel_arg(b)
    if len(a) > len(b):
        a, b = b, a
    if workers == 1 or len(a) + len(b) < cutoff or len(b) == 0:
        return hybrid_count(a, b)

    method = choose_method(len(a), len(b))
    if method is Method.BINARY_SEARCH:
        chunks = np.array_split(a, workers)
        jobs = [(c, b) for c in chunks if len(c)]
        fn = _binary_kernel
    else:
        bounds = np.linspace(0, len(b), workers + 1).astype(np.int64)
        jobs = []
        for lo, hi in zip(bounds[:-1], bounds[1:]):
            if hi <= lo:
                continue
            chunk = b[lo:hi]
            # Restrict the shorter list to the chunk's value range.
            alo = np.searchsorted(a, chunk[0], side="left")
            ahi = np.searchsorted(a, chunk[-1], side="right")
            jobs.append((np.ascontiguousarray(a[alo:ahi]), chunk))
        fn = _ssi_kernel
    pool = _get_pool()
    return int(sum(pool.map(lambda args: fn(*args), jobs)))
