"""Axis-parallel grids with random shifts: cell keys and point bucketing.

A grid of cell size ``c`` shifted by ``s`` assigns point ``p`` the integer
cell key ``floor((p[k] - s[k]) / c)`` per axis. Mathematical floor (toward
minus infinity) matters here: shifts push coordinates near zero into
negative cell indices.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import Rng, as_point_set

# splitmix64 finalizer constants, used to mix per-axis cell indices into one
# 64-bit value for grouping. A (vanishingly rare) collision merges two cells'
# candidate lists, which costs extra distance checks but can never corrupt
# results -- every candidate pair is distance-verified.
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)


def cell_keys(points: np.ndarray, shift: np.ndarray, c: float) -> np.ndarray:
    """Integer cell coordinates, one row per point, floor toward -inf."""
    if c <= 0:
        raise ValueError(f"cell size must be positive, got {c}")
    return np.floor((points - shift) / c).astype(np.int64)


def _mix_keys(keys: np.ndarray) -> np.ndarray:
    """Collapse (n, d) integer cell keys into one mixed uint64 per point."""
    n, d = keys.shape
    h = np.full(n, _GOLDEN, dtype=np.uint64)
    for k in range(d):
        v = keys[:, k].astype(np.uint64)
        v = (v ^ (v >> np.uint64(30))) * _MIX1
        v = (v ^ (v >> np.uint64(27))) * _MIX2
        h = h * _GOLDEN + (v ^ (v >> np.uint64(31)))
    return h


def bucket_order(points: np.ndarray, shift: np.ndarray, c: float):
    """Group points by cell.

    Returns ``(order, starts)``: ``order`` permutes point indices so that
    same-cell points are contiguous, and ``starts`` marks the bucket
    boundaries within ``order`` (len = #buckets + 1).
    """
    keys = cell_keys(points, shift, c)
    h = _mix_keys(keys)
    order = np.argsort(h, kind="stable")
    hs = h[order]
    boundary = np.flatnonzero(np.r_[True, hs[1:] != hs[:-1], True])
    return order, boundary


@dataclass
class ShiftedGrid:
    """One shifted grid: the shift, the cell size, and cell -> point buckets."""

    shift: np.ndarray
    cell_size: float
    buckets: dict[tuple[int, ...], np.ndarray]

    def bucket_of(self, p) -> tuple[int, ...]:
        key = np.floor((np.asarray(p, dtype=np.float64) - self.shift) / self.cell_size)
        return tuple(int(v) for v in key)


def build_grid(points, c: float, rng: Rng | None = None, *, shift=None) -> ShiftedGrid:
    """Bucket a point set under one randomly shifted grid of cell size ``c``.

    The shift is drawn uniformly from [0, c) per axis unless given
    explicitly (useful for replay and tests).
    """
    pts = as_point_set(points)
    n, d = pts.shape
    if c <= 0:
        raise ValueError(f"cell size must be positive, got {c}")
    if shift is None:
        if rng is None:
            raise ValueError("either rng or an explicit shift is required")
        shift = rng.random(d) * c
    shift = np.asarray(shift, dtype=np.float64)
    if shift.shape != (d,):
        raise ValueError(f"shift must have shape ({d},), got {shift.shape}")

    buckets: dict[tuple[int, ...], np.ndarray] = {}
    if n:
        keys = cell_keys(pts, shift, c)
        order, starts = bucket_order(pts, shift, c)
        for b in range(len(starts) - 1):
            members = order[starts[b]:starts[b + 1]]
            buckets[tuple(keys[members[0]].tolist())] = np.sort(members)
    return ShiftedGrid(shift=shift, cell_size=float(c), buckets=buckets)


def within_bucket_pairs(order: np.ndarray, starts: np.ndarray):
    """Yield candidate pairs (lo, hi arrays) of points sharing a bucket.

    Enumerates, for each offset t, the contiguous positions (p, p+t) that
    fall in the same bucket -- every unordered same-bucket pair comes out
    exactly once. Deterministic for a fixed grouping.
    """
    n = len(order)
    if n == 0:
        return
    sizes = np.diff(starts)
    max_run = int(sizes.max())
    bucket_id = np.repeat(np.arange(len(sizes)), sizes)
    for t in range(1, max_run):
        same = bucket_id[:-t] == bucket_id[t:]
        if not same.any():
            continue
        a = order[:-t][same]
        b = order[t:][same]
        yield np.minimum(a, b), np.maximum(a, b)
