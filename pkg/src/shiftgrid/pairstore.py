"""Deduplicating stores for reported neighbor pairs.

Two interchangeable backends:

* :class:`SetPairStore` -- an array of unordered sets, entry ``i`` holding
  the reported partners ``j > i``. Memory is linear in the number of stored
  pairs; expected O(1) insert and query. This is the default.
* :class:`BitPairStore` -- the upper triangle of an ``n x n`` boolean matrix
  flattened into a packed bit array. Constant-time insert/query with a fixed
  n(n-1)/2-bit footprint, so construction is refused above a configurable
  memory cap.

Pairs are canonicalized to ``i < j`` on the way in, and the query interface
is symmetric. Both stores also double as a filter: the neighbor-search
engine asks ``contains`` before spending a distance computation on a
candidate pair.
"""

from __future__ import annotations

import numpy as np


class BitStoreMemoryError(MemoryError):
    """Raised when a BitPairStore would exceed its memory cap."""


def _canonical(i: int, j: int) -> tuple[int, int]:
    if i == j:
        raise ValueError(f"a pair needs two distinct indices, got ({i}, {j})")
    return (i, j) if i < j else (j, i)


class PairStore:
    """Common interface of both pair-store backends."""

    n: int

    def insert(self, i: int, j: int) -> bool:
        """Store the pair; return True iff it was not present before."""
        raise NotImplementedError

    def contains(self, i: int, j: int) -> bool:
        raise NotImplementedError

    def __len__(self) -> int:
        raise NotImplementedError

    # Bulk variants used by the vectorized engines. ``ii``/``jj`` are equal
    # length integer arrays; entries must already satisfy i != j.
    def contains_many(self, ii: np.ndarray, jj: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def insert_many(self, ii: np.ndarray, jj: np.ndarray) -> int:
        """Store pairs in bulk; return how many were newly inserted."""
        raise NotImplementedError

    def pairs(self) -> tuple[np.ndarray, np.ndarray]:
        """All stored pairs as arrays (ii, jj) with ii < jj, sorted lexicographically."""
        raise NotImplementedError

    def pair_set(self) -> set[tuple[int, int]]:
        ii, jj = self.pairs()
        return set(zip(ii.tolist(), jj.tolist()))


class SetPairStore(PairStore):
    """Array of unordered sets; set ``i`` holds reported partners ``j > i``."""

    def __init__(self, n: int):
        if n < 0:
            raise ValueError("point count must be >= 0")
        self.n = n
        self._sets: list[set[int]] = [set() for _ in range(n)]
        self._count = 0

    def insert(self, i: int, j: int) -> bool:
        i, j = _canonical(int(i), int(j))
        s = self._sets[i]
        if j in s:
            return False
        s.add(j)
        self._count += 1
        return True

    def contains(self, i: int, j: int) -> bool:
        i, j = _canonical(int(i), int(j))
        return j in self._sets[i]

    def __len__(self) -> int:
        return self._count

    def contains_many(self, ii, jj) -> np.ndarray:
        lo = np.minimum(ii, jj).tolist()
        hi = np.maximum(ii, jj).tolist()
        sets = self._sets
        return np.fromiter((b in sets[a] for a, b in zip(lo, hi)), dtype=bool, count=len(lo))

    def insert_many(self, ii, jj) -> int:
        lo = np.minimum(ii, jj).tolist()
        hi = np.maximum(ii, jj).tolist()
        sets = self._sets
        added = 0
        for a, b in zip(lo, hi):
            s = sets[a]
            if b not in s:
                s.add(b)
                added += 1
        self._count += added
        return added

    def pairs(self) -> tuple[np.ndarray, np.ndarray]:
        ii = np.empty(self._count, dtype=np.int64)
        jj = np.empty(self._count, dtype=np.int64)
        pos = 0
        for i, s in enumerate(self._sets):
            if not s:
                continue
            js = sorted(s)
            ii[pos:pos + len(js)] = i
            jj[pos:pos + len(js)] = js
            pos += len(js)
        return ii, jj


class BitPairStore(PairStore):
    """Flattened upper-triangle bit matrix over all n(n-1)/2 index pairs."""

    DEFAULT_MEMORY_CAP = 256 * 1024 * 1024  # bytes

    def __init__(self, n: int, memory_cap_bytes: int = DEFAULT_MEMORY_CAP):
        if n < 0:
            raise ValueError("point count must be >= 0")
        total = n * (n - 1) // 2
        nbytes = (total + 7) // 8
        if nbytes > memory_cap_bytes:
            raise BitStoreMemoryError(
                f"bit store for n={n} needs {nbytes} bytes, over the cap of {memory_cap_bytes}"
            )
        self.n = n
        self._bits = np.zeros(nbytes, dtype=np.uint8)
        self._count = 0
        # row i starts at flat offset i*(2n-i-1)/2
        self._row_offsets = self._offsets(n)

    @staticmethod
    def _offsets(n: int) -> np.ndarray:
        i = np.arange(n, dtype=np.int64)
        return i * (2 * n - i - 1) // 2

    def _flat(self, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
        return self._row_offsets[lo] + (hi - lo - 1)

    def insert(self, i: int, j: int) -> bool:
        i, j = _canonical(int(i), int(j))
        if j >= self.n:
            raise IndexError(f"pair index {j} out of range for n={self.n}")
        f = int(self._row_offsets[i]) + (j - i - 1)
        byte, bit = f >> 3, f & 7
        if (self._bits[byte] >> bit) & 1:
            return False
        self._bits[byte] |= np.uint8(1 << bit)
        self._count += 1
        return True

    def contains(self, i: int, j: int) -> bool:
        i, j = _canonical(int(i), int(j))
        if j >= self.n:
            raise IndexError(f"pair index {j} out of range for n={self.n}")
        f = int(self._row_offsets[i]) + (j - i - 1)
        return bool((self._bits[f >> 3] >> (f & 7)) & 1)

    def __len__(self) -> int:
        return self._count

    def contains_many(self, ii, jj) -> np.ndarray:
        lo = np.minimum(ii, jj)
        hi = np.maximum(ii, jj)
        f = self._flat(lo, hi)
        return ((self._bits[f >> 3] >> (f & 7).astype(np.uint8)) & 1).astype(bool)

    def insert_many(self, ii, jj) -> int:
        lo = np.minimum(ii, jj)
        hi = np.maximum(ii, jj)
        f = np.unique(self._flat(lo, hi))  # drop batch-internal duplicates
        byte = f >> 3
        bit = (f & 7).astype(np.uint8)
        prior = ((self._bits[byte] >> bit) & 1).astype(bool)
        fresh = f[~prior]
        if len(fresh):
            np.bitwise_or.at(self._bits, fresh >> 3, np.uint8(1) << (fresh & 7).astype(np.uint8))
        self._count += len(fresh)
        return len(fresh)

    def pairs(self) -> tuple[np.ndarray, np.ndarray]:
        total = self.n * (self.n - 1) // 2
        flats = []
        chunk = 1 << 20  # bytes per unpack block
        for start in range(0, len(self._bits), chunk):
            block = np.unpackbits(self._bits[start:start + chunk], bitorder="little")
            hits = np.flatnonzero(block).astype(np.int64) + 8 * start
            flats.append(hits)
        f = np.concatenate(flats) if flats else np.empty(0, dtype=np.int64)
        f = f[f < total]
        ii = np.searchsorted(self._row_offsets, f, side="right") - 1
        jj = f - self._row_offsets[ii] + ii + 1
        return ii, jj


class NeighborLists:
    """Per-point neighbor lists; every stored pair appears in both directions.

    Turning the all-pairs result into this structure answers the repeated
    single-point radius queries of the planners by plain lookup.
    """

    def __init__(self, store: PairStore, n: int):
        ii, jj = store.pairs()
        if len(ii) and (ii.max() >= n or jj.max() >= n):
            raise IndexError(f"stored pair index out of range for n={n}")
        both_src = np.concatenate([ii, jj])
        both_dst = np.concatenate([jj, ii])
        order = np.lexsort((both_dst, both_src))
        self._dst = both_dst[order]
        self._starts = np.searchsorted(both_src[order], np.arange(n + 1))
        self.n = n

    def neighbors(self, i: int) -> np.ndarray:
        """Ascending array of neighbors of point ``i``."""
        if not 0 <= i < self.n:
            raise IndexError(f"point index {i} out of range for n={self.n}")
        return self._dst[self._starts[i]:self._starts[i + 1]]

    def degree(self, i: int) -> int:
        return len(self.neighbors(i))


def neighbor_lists_from_store(store: PairStore, n: int) -> NeighborLists:
    """Reduce a pair store to per-point neighbor lists (each pair kept twice)."""
    return NeighborLists(store, n)
