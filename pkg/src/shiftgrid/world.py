"""Box-obstacle environments in the unit hypercube.

A world is a list of closed axis-aligned boxes inside [0, 1]^d plus a
segment-checking resolution. Obstacle boundaries count as colliding: ties
break conservatively, so a "free" verdict is the strong one. Straight-line
segments are checked at evenly spaced samples no more than ``resolution``
apart (endpoints included), which can miss obstacles thinner than the step;
the built-in scenarios keep obstacles at least 10x thicker than the default
resolution of 1e-3.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import Rng

DEFAULT_RESOLUTION = 1e-3

# Rejection sampling gives up after this many consecutive misses.
STALL_LIMIT = 10_000

SCENARIO_NAMES = ("empty", "z-tunnel", "grid-of-boxes")


class DegenerateWorldError(ValueError):
    """The obstacles leave no free space."""


class SamplingStalledError(RuntimeError):
    """Rejection sampling exceeded the consecutive-miss limit."""


@dataclass(frozen=True)
class Aabb:
    """Closed axis-aligned box, contained in the unit hypercube."""

    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        lo = np.asarray(self.lo, dtype=np.float64)
        hi = np.asarray(self.hi, dtype=np.float64)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        if lo.ndim != 1 or lo.shape != hi.shape:
            raise ValueError("box corners must be 1-D arrays of equal dimension")
        if np.any(lo > hi):
            raise ValueError("box must satisfy lo <= hi on every axis")
        if np.any(lo < 0) or np.any(hi > 1):
            raise ValueError("box must lie inside the unit hypercube")

    @property
    def d(self) -> int:
        return len(self.lo)

    def volume(self) -> float:
        return float(np.prod(self.hi - self.lo))

    def intersect(self, other: "Aabb") -> "Aabb | None":
        lo = np.maximum(self.lo, other.lo)
        hi = np.minimum(self.hi, other.hi)
        if np.any(lo > hi):
            return None
        return Aabb(lo, hi)


class World:
    """Obstacle set, dimension, and collision-check resolution."""

    def __init__(self, d: int, obstacles: list[Aabb] = (), resolution: float = DEFAULT_RESOLUTION):
        if d < 1:
            raise ValueError(f"dimension must be >= 1, got {d}")
        if resolution <= 0:
            raise ValueError(f"resolution must be positive, got {resolution}")
        obstacles = list(obstacles)
        for box in obstacles:
            if box.d != d:
                raise ValueError(f"obstacle dimension {box.d} != world dimension {d}")
        self.d = d
        self.obstacles = obstacles
        self.resolution = float(resolution)
        if obstacles:
            self._los = np.stack([b.lo for b in obstacles])
            self._his = np.stack([b.hi for b in obstacles])
        else:
            self._los = np.empty((0, d))
            self._his = np.empty((0, d))
        self._volume: float | None = None
        self.volume_method: str | None = None
        self.volume_mc_seed: int | None = None
        self.volume_mc_samples: int | None = None

    def points_free(self, points: np.ndarray) -> np.ndarray:
        """Boolean mask: True where a point hits no obstacle (closed boxes)."""
        pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
        if pts.shape[1] != self.d:
            raise ValueError(f"points have dimension {pts.shape[1]}, world is {self.d}-D")
        if not self.obstacles:
            return np.ones(len(pts), dtype=bool)
        inside = np.all(
            (pts[:, None, :] >= self._los[None]) & (pts[:, None, :] <= self._his[None]),
            axis=2,
        )
        return ~inside.any(axis=1)


def is_free(world: World, p) -> bool:
    """True iff the configuration lies in no obstacle (boundaries collide)."""
    p = np.asarray(p, dtype=np.float64)
    if p.shape != (world.d,):
        raise ValueError(f"point has shape {p.shape}, expected ({world.d},)")
    return bool(world.points_free(p[None])[0])


def collision_free_segment(world: World, a, b) -> bool:
    """Discretized check of the straight segment from a to b.

    Samples at steps of at most ``world.resolution`` along the segment,
    endpoints included.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != (world.d,) or b.shape != (world.d,):
        raise ValueError(f"segment endpoints must be {world.d}-D")
    if not world.obstacles:
        return True
    length = float(np.linalg.norm(b - a))
    steps = max(1, math.ceil(length / world.resolution))
    ts = np.linspace(0.0, 1.0, steps + 1)
    pts = a[None, :] + ts[:, None] * (b - a)[None, :]
    return bool(world.points_free(pts).all())


def _union_volume_inclusion_exclusion(boxes: list[Aabb]) -> float:
    """Exact union volume by subset inclusion-exclusion (use for few boxes)."""
    total = 0.0
    n = len(boxes)
    # depth-first over subsets, pruning branches whose intersection is empty
    def visit(start: int, current: Aabb | None, depth: int):
        nonlocal total
        for k in range(start, n):
            inter = boxes[k] if current is None else current.intersect(boxes[k])
            if inter is None:
                continue
            total += (-1.0) ** depth * inter.volume()
            visit(k + 1, inter, depth + 1)
    visit(0, None, 0)
    return total


def _pairwise_disjoint(boxes: list[Aabb]) -> bool:
    return all(a.intersect(b) is None
               for a, b in itertools.combinations(boxes, 2))


def free_space_volume(world: World, mc_seed: int = 0, mc_samples: int = 1 << 20) -> float:
    """Volume of the free space, in (0, 1].

    Exact (1 minus the obstacle-union volume) when the boxes are pairwise
    disjoint or few enough for inclusion-exclusion; otherwise a Monte Carlo
    estimate whose seed and sample count are recorded on the world. The
    result is cached on the world.
    """
    if world._volume is not None:
        return world._volume
    boxes = world.obstacles
    if not boxes:
        vol, method = 1.0, "exact"
    elif _pairwise_disjoint(boxes):
        vol, method = 1.0 - sum(b.volume() for b in boxes), "exact"
    elif len(boxes) <= 20:
        vol, method = 1.0 - _union_volume_inclusion_exclusion(boxes), "exact"
    else:
        rng = np.random.default_rng(mc_seed)
        pts = rng.random((mc_samples, world.d))
        vol = float(world.points_free(pts).mean())
        method = "monte-carlo"
        world.volume_mc_seed = mc_seed
        world.volume_mc_samples = mc_samples
    if vol <= 0:
        raise DegenerateWorldError("obstacles fill the whole unit cube")
    world._volume = float(min(vol, 1.0))
    world.volume_method = method
    return world._volume


def sample_free(world: World, rng: Rng, n: int) -> np.ndarray:
    """Rejection-sample ``n`` collision-free configurations."""
    if n < 0:
        raise ValueError(f"sample count must be >= 0, got {n}")
    out = np.empty((n, world.d))
    got = 0
    misses = 0
    batch = max(64, min(4096, 2 * n))
    while got < n:
        cand = rng.random((batch, world.d))
        free = world.points_free(cand)
        hits = cand[free]
        if len(hits) == 0:
            misses += batch
            if misses >= STALL_LIMIT:
                raise SamplingStalledError(
                    f"{misses} consecutive rejections; free volume too small")
        else:
            misses = 0
        take = min(n - got, len(hits))
        out[got:got + take] = hits[:take]
        got += take
    return out


@dataclass
class Scenario:
    """A named world with one start/goal query."""

    name: str
    world: World
    start: np.ndarray
    goal: np.ndarray
    meta: dict = field(default_factory=dict)


def _slab(d: int, x_lo: float, x_hi: float, y_lo: float, y_hi: float) -> Aabb:
    """Box spanning [x_lo,x_hi] on axis 0, [y_lo,y_hi] on axis 1, full otherwise."""
    lo = np.zeros(d)
    hi = np.ones(d)
    lo[0], hi[0] = x_lo, x_hi
    lo[1], hi[1] = y_lo, y_hi
    return Aabb(lo, hi)


def make_scenario(name: str, d: int, resolution: float = DEFAULT_RESOLUTION) -> Scenario:
    """Construct a built-in scenario.

    * ``empty``: no obstacles; start and goal on the main diagonal.
    * ``z-tunnel``: three wall slabs with alternating gaps, forcing a
      Z-shaped corridor; the straight start-goal segment is blocked.
    * ``grid-of-boxes``: a 3^d lattice of boxes, each filling half of its
      lattice cell per axis, with free streets between them; the straight
      start-goal diagonal hits the first box.
    """
    if name == "empty":
        if d < 1:
            raise ValueError("empty scenario needs d >= 1")
        world = World(d, [], resolution)
        return Scenario(name, world, np.full(d, 0.1), np.full(d, 0.9))

    if name == "z-tunnel":
        if d < 2:
            raise ValueError("z-tunnel needs d >= 2")
        walls = [
            _slab(d, 0.25, 0.35, 0.0, 0.8),
            _slab(d, 0.45, 0.55, 0.2, 1.0),
            _slab(d, 0.65, 0.75, 0.0, 0.8),
        ]
        world = World(d, walls, resolution)
        start = np.full(d, 0.5)
        goal = np.full(d, 0.5)
        start[0], goal[0] = 0.1, 0.9
        return Scenario(name, world, start, goal, meta={"mu_exact": 0.76})

    if name == "grid-of-boxes":
        if d < 1:
            raise ValueError("grid-of-boxes needs d >= 1")
        k = 3
        boxes = []
        for cell in itertools.product(range(k), repeat=d):
            idx = np.array(cell, dtype=np.float64)
            boxes.append(Aabb((idx + 0.25) / k, (idx + 0.75) / k))
        world = World(d, boxes, resolution)
        return Scenario(name, world, np.full(d, 0.05), np.full(d, 0.95),
                        meta={"mu_exact": 1.0 - 0.5 ** d})

    raise ValueError(f"unknown scenario {name!r}; known: {SCENARIO_NAMES}")


def write_scenario(path, scenario: Scenario) -> None:
    """Serialize a scenario to the JSON scenario-file format."""
    doc = {
        "name": scenario.name,
        "d": scenario.world.d,
        "resolution": scenario.world.resolution,
        "obstacles": [{"lo": b.lo.tolist(), "hi": b.hi.tolist()}
                      for b in scenario.world.obstacles],
        "start": scenario.start.tolist(),
        "goal": scenario.goal.tolist(),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def read_scenario(path) -> Scenario:
    """Parse a scenario file written by :func:`write_scenario`."""
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    d = int(doc["d"])
    world = World(
        d,
        [Aabb(np.asarray(b["lo"], dtype=float), np.asarray(b["hi"], dtype=float))
         for b in doc["obstacles"]],
        float(doc.get("resolution", DEFAULT_RESOLUTION)),
    )
    start = np.asarray(doc["start"], dtype=float)
    goal = np.asarray(doc["goal"], dtype=float)
    if start.shape != (d,) or goal.shape != (d,):
        raise ValueError("start/goal dimension does not match d")
    return Scenario(str(doc.get("name", "custom")), world, start, goal)
