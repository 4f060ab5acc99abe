"""Per-node transparent read cache with variable-size entries.

Entries are indexed by a fixed-size hash table (one entry per slot; a
collision bypasses the incoming entry) and placed in a byte buffer managed
through a free-region ledger with best-fit allocation and coalescing.
Eviction is pluggable: plain LRU, LRU weighted against fragmentation, or a
user-supplied score (here: vertex degree) with LRU tie-breaking.
"""

from __future__ import annotations

import enum
import heapq
from bisect import bisect_left, insort
from collections import OrderedDict
from dataclasses import dataclass, field

import numpy as np

MAX_EVICTIONS_PER_INSERT = 64


class Policy(enum.Enum):
    LRU = "lru"
    LRU_POSITIONAL = "positional"
    USER_SCORE = "degree"


class InsertOutcome(enum.Enum):
    STORED = "stored"
    BYPASSED = "bypassed"


@dataclass
class CacheConfig:
    capacity_bytes: int
    table_slots: int
    policy: Policy = Policy.LRU

    def __post_init__(self):
        if self.capacity_bytes < 0:
            raise ValueError("capacity_bytes must be >= 0")
        if self.table_slots < 1:
            raise ValueError("table_slots must be >= 1")


@dataclass
class CacheStats:
    gets: int = 0
    hits: int = 0
    misses: int = 0
    compulsory_misses: int = 0
    evictions: int = 0
    bypasses: int = 0
    bytes_from_cache: int = 0
    bytes_from_network: int = 0


@dataclass
class _Entry:
    key: tuple
    payload: np.ndarray
    size: int           # bytes
    score: float
    last_access: int
    placement: int
    slot: int


class FreeLedger:
    """Disjoint, coalesced free regions with best-fit lookup.

    Two sorted lists: by address (for coalescing) and by (size, address)
    (for best-fit = smallest region that fits).
    """

    def __init__(self, capacity: int):
        self.capacity = capacity
        self.by_addr: list[tuple[int, int]] = [(0, capacity)] if capacity > 0 else []
        self.by_size: list[tuple[int, int]] = [(capacity, 0)] if capacity > 0 else []

    def regions(self) -> list[tuple[int, int]]:
        return list(self.by_addr)

    def free_bytes(self) -> int:
        return sum(size for _, size in self.by_addr)

    def _remove(self, addr: int, size: int) -> None:
        i = bisect_left(self.by_addr, (addr, size))
        del self.by_addr[i]
        j = bisect_left(self.by_size, (size, addr))
        del self.by_size[j]

    def _add(self, addr: int, size: int) -> None:
        insort(self.by_addr, (addr, size))
        insort(self.by_size, (size, addr))

    def allocate(self, size: int) -> int | None:
        """Best-fit allocation; returns the placement or None if nothing fits."""
        if size == 0:
            return 0
        i = bisect_left(self.by_size, (size, -1))
        if i == len(self.by_size):
            return None
        rsize, raddr = self.by_size[i]
        self._remove(raddr, rsize)
        if rsize > size:
            self._add(raddr + size, rsize - size)
        return raddr

    def release(self, addr: int, size: int) -> None:
        """Return a region, coalescing with free neighbors."""
        if size == 0:
            return
        i = bisect_left(self.by_addr, (addr, 0))
        if i > 0:
            paddr, psize = self.by_addr[i - 1]
            if paddr + psize == addr:
                self._remove(paddr, psize)
                addr, size = paddr, psize + size
                i -= 1
        if i < len(self.by_addr):
            naddr, nsize = self.by_addr[i]
            if addr + size == naddr:
                self._remove(naddr, nsize)
                size += nsize
        self._add(addr, size)

    def adjacent_free(self, addr: int, size: int) -> int:
        """Free bytes immediately before and after [addr, addr+size)."""
        total = 0
        i = bisect_left(self.by_addr, (addr, 0))
        if i > 0:
            paddr, psize = self.by_addr[i - 1]
            if paddr + psize == addr:
                total += psize
        if i < len(self.by_addr):
            naddr, nsize = self.by_addr[i]
            if naddr == addr + size:
                total += nsize
        return total


class RmaCache:
    """Variable-size entry cache fronting one window of one node."""

    def __init__(self, config: CacheConfig):
        self.config = config
        self.stats = CacheStats()
        self.ledger = FreeLedger(config.capacity_bytes)
        self.entries: dict[tuple, _Entry] = {}
        self.slots: dict[int, tuple] = {}
        self._recency: OrderedDict[tuple, None] = OrderedDict()
        self._score_heap: list[tuple[float, int, tuple]] = []
        self._seen: set[tuple] = set()
        self._clock = 0

    # -- bookkeeping helpers

    def _slot_of(self, key: tuple) -> int:
        return hash(key) % self.config.table_slots

    def _touch(self, entry: _Entry) -> None:
        self._clock += 1
        entry.last_access = self._clock
        self._recency.move_to_end(entry.key)

    @property
    def live_entries(self) -> int:
        return len(self.entries)

    def live_bytes(self) -> int:
        return sum(e.size for e in self.entries.values())

    # -- victim selection

    def select_victim(self) -> tuple:
        if not self.entries:
            raise RuntimeError("select_victim on an empty cache")
        policy = self.config.policy
        if policy is Policy.LRU:
            return next(iter(self._recency))
        if policy is Policy.USER_SCORE:
            while True:
                score, last, key = self._score_heap[0]
                entry = self.entries.get(key)
                if entry is None or entry.score != score:
                    heapq.heappop(self._score_heap)
                    continue
                if entry.last_access != last:
                    # Stale recency record: refresh and re-order.
                    heapq.heapreplace(self._score_heap, (score, entry.last_access, key))
                    continue
                return key
        # LRU weighted against fragmentation: normalized recency rank minus
        # the normalized free space adjacent to the entry; evict the maximum.
        live = len(self.entries)
        cap = max(self.config.capacity_bytes, 1)
        best_key, best_score = None, -np.inf
        for i, key in enumerate(self._recency):  # oldest first
            entry = self.entries[key]
            rank = (live - i) / live
            bonus = self.ledger.adjacent_free(entry.placement, entry.size) / cap
            s = rank - bonus
            if s > best_score:
                best_key, best_score = key, s
        return best_key

    def _evict(self, key: tuple) -> None:
        entry = self.entries.pop(key)
        del self.slots[entry.slot]
        del self._recency[key]
        self.ledger.release(entry.placement, entry.size)
        self.stats.evictions += 1

    # -- public surface

    def insert(self, key: tuple, payload: np.ndarray, score: float = 0.0) -> InsertOutcome:
        if key in self.entries:
            raise ValueError(f"key {key} is already live")
        size = 8 * len(payload)
        if size > self.config.capacity_bytes:
            self.stats.bypasses += 1
            return InsertOutcome.BYPASSED
        slot = self._slot_of(key)
        if slot in self.slots:
            self.stats.bypasses += 1
            return InsertOutcome.BYPASSED
        placement = self.ledger.allocate(size)
        evicted = 0
        while placement is None and evicted < MAX_EVICTIONS_PER_INSERT and self.entries:
            self._evict(self.select_victim())
            evicted += 1
            placement = self.ledger.allocate(size)
        if placement is None:
            self.stats.bypasses += 1
            return InsertOutcome.BYPASSED
        self._clock += 1
        entry = _Entry(key=key, payload=payload, size=size, score=score,
                       last_access=self._clock, placement=placement, slot=slot)
        self.entries[key] = entry
        self.slots[slot] = key
        self._recency[key] = None
        if self.config.policy is Policy.USER_SCORE:
            heapq.heappush(self._score_heap, (score, entry.last_access, key))
        return InsertOutcome.STORED

    def lookup(self, key: tuple) -> np.ndarray | None:
        entry = self.entries.get(key)
        if entry is None:
            return None
        self._touch(entry)
        return entry.payload

    def note_first_seen(self, key: tuple) -> bool:
        """Record the key; True if this is its first-ever occurrence here."""
        if key in self._seen:
            return False
        self._seen.add(key)
        return True

    def reset_stats(self) -> None:
        self.stats = CacheStats()

    def check_ledger(self) -> list[str]:
        """Conservation and coalescing invariants; empty when healthy."""
        out = []
        regions = sorted(self.ledger.by_addr)
        if regions != self.ledger.by_addr:
            out.append("free list not address-sorted")
        for (a, s), (na, _) in zip(regions, regions[1:]):
            if a + s > na:
                out.append(f"overlapping free regions at {a}")
            elif a + s == na:
                out.append(f"uncoalesced free regions at {a}")
        live = sorted((e.placement, e.size) for e in self.entries.values())
        for (a, s), (na, _) in zip(live, live[1:]):
            if a + s > na:
                out.append(f"overlapping live entries at {a}")
        total = self.ledger.free_bytes() + sum(s for _, s in live)
        if total != self.config.capacity_bytes:
            out.append(f"bytes not conserved: {total} != {self.config.capacity_bytes}")
        return out


def cached_get(cache: RmaCache | None, transport, req, score_hint: float | None = None) -> np.ndarray:
    """Read through the cache; misses fall back to the transport and insert.

    ``transport`` is any callable mapping a GetRequest to its payload.  A
    failed insert degrades to a bypass; the payload is returned either way.
    """
    if cache is None:
        return transport(req)
    key = req.key()
    cache.stats.gets += 1
    payload = cache.lookup(key)
    if payload is not None:
        cache.stats.hits += 1
        cache.stats.bytes_from_cache += 8 * req.length
        return payload
    cache.stats.misses += 1
    if cache.note_first_seen(key):
        cache.stats.compulsory_misses += 1
    payload = transport(req)
    cache.stats.bytes_from_network += 8 * req.length
    score = score_hint if score_hint is not None else 0.0
    cache.insert(key, payload, score)
    return payload


def suggest_table_slots(n: int, capacity_bytes: int, graph_bytes: int, window) -> int:
    """Hash-table sizing: offsets entries are 16-byte pairs, adjacency slot
    counts follow the power-law heuristic n * (capacity/graph)^2."""
    from .window import WindowId

    if n <= 0 or capacity_bytes <= 0 or graph_bytes <= 0:
        return 1
    if window == WindowId.OFFSETS:
        return max(1, min(n, capacity_bytes // 16))
    r = capacity_bytes / graph_bytes
    return max(1, int(n * r * r))
