"""Point sets, Euclidean metrics, and seeded sampling in the unit hypercube.

A point set is a plain ``(n, d)`` float64 array; row ``i`` is point ``i`` and
rows never move after construction. All randomness flows through numpy's
PCG64 generator so that a 64-bit seed reproduces every draw bit for bit.
"""

from __future__ import annotations

import numpy as np

# Every generator in this package is PCG64 behind numpy's Generator API.
# Seeds are plain integers and are recorded in all benchmark output rows.
Rng = np.random.Generator


def make_rng(seed: int) -> Rng:
    """Return a PCG64 generator for a 64-bit integer seed."""
    return np.random.default_rng(seed)


def split_seeds(seed: int, k: int) -> list[int]:
    """Derive ``k`` independent child seeds from one parent seed.

    Uses numpy's SeedSequence spawning, so parallel workers never share a
    generator stream.
    """
    children = np.random.SeedSequence(seed).spawn(k)
    return [int(c.generate_state(1, np.uint64)[0]) for c in children]


def as_point_set(points, d: int | None = None) -> np.ndarray:
    """Validate and return ``points`` as an ``(n, d)`` float64 array."""
    arr = np.ascontiguousarray(points, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"point set must be 2-D (n, d), got shape {arr.shape}")
    if d is not None and arr.shape[1] != d:
        raise ValueError(f"point set has dimension {arr.shape[1]}, expected {d}")
    if arr.shape[1] < 1:
        raise ValueError("point set dimension must be >= 1")
    return arr


def sample_unit_hypercube(rng: Rng, n: int, d: int) -> np.ndarray:
    """Draw ``n`` i.i.d. uniform points in [0, 1]^d.

    Deterministic given the generator state; ``n = 0`` yields an empty
    ``(0, d)`` array.
    """
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    if n < 0:
        raise ValueError(f"sample count must be >= 0, got {n}")
    return rng.random((n, d))


def _check_same_dim(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError(f"points must be 1-D of equal dimension, got {a.shape} and {b.shape}")


def squared_dist(a, b) -> float:
    """Squared Euclidean distance between two points."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    _check_same_dim(a, b)
    diff = a - b
    return float(diff @ diff)


def euclidean_dist(a, b) -> float:
    """Euclidean (L2) distance between two points."""
    return float(np.sqrt(squared_dist(a, b)))
