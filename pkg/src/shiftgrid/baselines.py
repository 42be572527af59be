"""Interchangeable all-pairs neighbor-search backends and a timing shim.

Backends answer the same query -- every pair of points at distance <= r --
behind one small interface, so the planners and the benchmark driver can
swap them freely:

* ``brute-force``: the exact O(n^2 d) oracle.
* ``static-grid``: exact search over one unshifted grid of cell size r,
  inspecting same-cell and adjacent-cell pairs only.
* ``rsg``: the approximate randomly-shifted-grids engine.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .engine import RsgParams, brute_force_all_pairs, recall, shifted_grids_all_pairs
from .geometry import as_point_set, make_rng
from .grid import bucket_order, cell_keys, within_bucket_pairs
from .pairstore import BitPairStore, PairStore, SetPairStore
from .tuning import params_for


def static_grid_all_pairs(points, r: float, store: PairStore | None = None) -> PairStore:
    """Exact all-pairs search on a fixed (unshifted) grid of cell size r.

    Any pair at distance <= r has per-axis gaps <= r, so its two cells are
    identical or adjacent (Chebyshev distance <= 1); scanning each cell
    against itself and its lexicographically larger neighbors therefore
    covers every true pair exactly once.
    """
    pts = as_point_set(points)
    n, d = pts.shape
    if r <= 0:
        raise ValueError(f"static grid needs a positive radius, got {r}")
    if store is None:
        store = SetPairStore(n)
    if n < 2:
        return store
    r2 = r * r
    zero_shift = np.zeros(d)

    # within-cell pairs
    order, starts = bucket_order(pts, zero_shift, r)
    for lo, hi in within_bucket_pairs(order, starts):
        diff = pts[lo] - pts[hi]
        hit = np.einsum("ij,ij->i", diff, diff) <= r2
        if hit.any():
            store.insert_many(lo[hit], hi[hit])

    # cross-cell pairs, one canonical direction per neighbor offset
    keys = cell_keys(pts, zero_shift, r)
    cells: dict[tuple[int, ...], np.ndarray] = {}
    for b in range(len(starts) - 1):
        members = order[starts[b]:starts[b + 1]]
        cells[tuple(keys[members[0]].tolist())] = members
    offsets = _positive_half_offsets(d)
    for key, members in cells.items():
        for off in offsets:
            other = cells.get(tuple(k + o for k, o in zip(key, off)))
            if other is None:
                continue
            a = np.repeat(members, len(other))
            b = np.tile(other, len(members))
            diff = pts[a] - pts[b]
            hit = np.einsum("ij,ij->i", diff, diff) <= r2
            if hit.any():
                store.insert_many(a[hit], b[hit])
    return store


def _positive_half_offsets(d: int) -> list[tuple[int, ...]]:
    """The lexicographically positive half of {-1,0,1}^d, excluding zero."""
    out = []
    for raw in np.ndindex(*(3,) * d):
        off = tuple(v - 1 for v in raw)
        if off > (0,) * d:
            out.append(off)
    return out


class NnBackend:
    """An all-pairs radius-query backend. Subclasses set ``name``."""

    name: str = "abstract"

    def all_pairs(self, points, r: float) -> PairStore:
        raise NotImplementedError

    def describe(self) -> dict:
        """Backend parameters worth recording in result rows."""
        return {}


class BruteForceBackend(NnBackend):
    name = "brute-force"

    def __init__(self, store_factory=SetPairStore):
        self._store_factory = store_factory

    def all_pairs(self, points, r):
        return brute_force_all_pairs(points, r, self._store_factory(len(points)))


class StaticGridBackend(NnBackend):
    name = "static-grid"

    def __init__(self, store_factory=SetPairStore):
        self._store_factory = store_factory

    def all_pairs(self, points, r):
        return static_grid_all_pairs(points, r, self._store_factory(len(points)))


class RsgBackend(NnBackend):
    """Randomly-shifted-grids backend.

    Parameters come from the shipped tuned table when available (falling
    back to auto-tuning), or can be pinned explicitly. Each query draws its
    grid shifts from a generator seeded by ``seed``, re-seeded per call so
    repeated queries are reproducible.
    """

    name = "rsg"

    def __init__(self, m: int | None = None, c_tilde: float | None = None,
                 seed: int = 0, store_factory=SetPairStore, target_recall: float = 0.98):
        if (m is None) != (c_tilde is None):
            raise ValueError("pin both m and c_tilde or neither")
        self._m = m
        self._c_tilde = c_tilde
        self._seed = seed
        self._store_factory = store_factory
        self._target_recall = target_recall
        self.last_params: RsgParams | None = None

    def _resolve(self, n: int, d: int, r: float) -> RsgParams:
        if self._m is not None:
            return RsgParams(r=r, c_tilde=self._c_tilde, m=self._m)
        return params_for(n, d, r, self._target_recall, base_seed=self._seed)

    def all_pairs(self, points, r):
        pts = as_point_set(points)
        n, d = pts.shape
        params = self._resolve(n, d, r)
        self.last_params = params
        return shifted_grids_all_pairs(pts, params, make_rng(self._seed),
                                       self._store_factory(n))

    def describe(self):
        if self.last_params is None:
            return {"seed": self._seed}
        return {"m": self.last_params.m, "c_tilde": self.last_params.c_tilde,
                "seed": self._seed}


BACKEND_FACTORIES = {
    "brute-force": BruteForceBackend,
    "static-grid": StaticGridBackend,
    "rsg": RsgBackend,
    "rsg-bit": lambda **kw: RsgBackend(store_factory=BitPairStore, **kw),
}


def make_backend(name: str, **kwargs) -> NnBackend:
    try:
        factory = BACKEND_FACTORIES[name]
    except KeyError:
        raise ValueError(f"unknown backend {name!r}; known: {sorted(BACKEND_FACTORIES)}")
    backend = factory(**kwargs)
    backend.name = name
    return backend


@dataclass
class BenchmarkRecord:
    """Wall-time and quality of one backend on one query."""

    backend: str
    n: int
    d: int
    r: float
    mean_time: float
    std_time: float
    recall: float
    pairs: int
    times: list[float] = field(default_factory=list)
    params: dict = field(default_factory=dict)


def benchmark_backend(backend: NnBackend, points, r: float,
                      repetitions: int = 1) -> BenchmarkRecord:
    """Time a backend's all-pairs query and score its recall.

    The ground truth is computed once, outside the timed region. Each timed
    repetition covers the full query including the backend's pair-store
    allocation, which is part of the algorithm's cost.
    """
    if repetitions < 1:
        raise ValueError(f"repetitions must be >= 1, got {repetitions}")
    pts = as_point_set(points)
    truth = brute_force_all_pairs(pts, r)
    times = []
    result = None
    for _ in range(repetitions):
        t0 = time.perf_counter()
        result = backend.all_pairs(pts, r)
        times.append(time.perf_counter() - t0)
    return BenchmarkRecord(
        backend=backend.name, n=len(pts), d=pts.shape[1], r=r,
        mean_time=float(np.mean(times)), std_time=float(np.std(times)),
        recall=recall(result, truth), pairs=len(result),
        times=times, params=backend.describe(),
    )
