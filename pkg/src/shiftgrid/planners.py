"""Sampling-based motion planners over an interchangeable neighbor backend.

Four planners share the same skeleton -- sample free configurations, ask a
backend for all vertex pairs within a connection radius, collision-check
some or all of those candidate edges, and search the resulting graph:

* ``prm_star``: batch roadmap; every candidate edge is validated eagerly.
* ``lazy_prm_star``: same graph, but edges are validated only when they
  appear on a candidate shortest path; colliding edges are removed and the
  search repeats.
* ``fmt_star``: grows a minimum-cost-to-come tree outward from the start,
  validating one locally optimal edge per connection.
* ``batched_rrt_star``: runs a standard RRT exploration, then the
  fast-marching pass over the RRT's vertex set.

The connection radii follow the standard shrinking-ball schedules for
asymptotically optimal planners; see the ``radius_*`` functions.
"""

from __future__ import annotations

import heapq
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .baselines import NnBackend
from .geometry import Rng, euclidean_dist
from .pairstore import neighbor_lists_from_store
from .world import (World, collision_free_segment, free_space_volume, is_free,
                    sample_free)


class RewireCycleError(RuntimeError):
    """A rewire would have created a cycle; tree costs were inconsistent."""


# --------------------------------------------------------------------------
# connection radii


def unit_ball_volume(d: int) -> float:
    """Lebesgue volume of the unit ball in d dimensions."""
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    return math.pi ** (d / 2) / math.gamma(d / 2 + 1)


def _check_radius_args(n: float, d: int, mu_free: float) -> None:
    if n < 2:
        raise ValueError(f"sample count must be >= 2 for the radius schedule, got {n}")
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    # unit-cube worlds have mu <= 1, but the closed form is meaningful for
    # any positive measure, so only positivity is enforced
    if mu_free <= 0:
        raise ValueError(f"free-space volume must be positive, got {mu_free}")


def radius_prm_star(n: float, d: int, mu_free: float = 1.0) -> float:
    """Connection radius of the batch roadmap planner.

    ``2 * [(1 + 1/d) * (mu/zeta_d) * (log n / n)]^(1/d)`` with the natural
    logarithm and ``zeta_d`` the unit-ball volume. Accepts real-valued ``n``
    so the closed form itself can be evaluated and tested.
    """
    _check_radius_args(n, d, mu_free)
    zeta = unit_ball_volume(d)
    return 2.0 * ((1 + 1 / d) * (mu_free / zeta) * (math.log(n) / n)) ** (1 / d)


def radius_fmt_star(n: float, d: int, mu_free: float = 1.0, eta: float = 0.1) -> float:
    """Connection radius of the fast-marching planner (smaller than the
    roadmap radius for any ``eta`` near 0).

    ``2 * (1 + eta) * [(1/d) * (mu/zeta_d) * (log n / n)]^(1/d)``. The
    optimality guarantee needs ``eta > 0``; ``eta = 0`` is accepted for
    evaluating the formula's limit.
    """
    _check_radius_args(n, d, mu_free)
    if eta < 0:
        raise ValueError(f"eta must be >= 0, got {eta}")
    zeta = unit_ball_volume(d)
    return 2.0 * (1 + eta) * ((1 / d) * (mu_free / zeta) * (math.log(n) / n)) ** (1 / d)


def radius_rrt_star(i: float, d: int, mu_free: float = 1.0) -> float:
    """Per-iteration radius of the rewiring tree planner at iteration ``i``.

    ``[2 * (1 + 1/d) * (mu/zeta_d) * (log i / i)]^(1/d)``.
    """
    _check_radius_args(i, d, mu_free)
    zeta = unit_ball_volume(d)
    return (2 * (1 + 1 / d) * (mu_free / zeta) * (math.log(i) / i)) ** (1 / d)


# --------------------------------------------------------------------------
# shared plumbing


@dataclass(frozen=True)
class GoalRegion:
    """Closed Euclidean ball around a goal configuration."""

    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", np.asarray(self.center, dtype=np.float64))
        if self.radius < 0:
            raise ValueError(f"goal radius must be >= 0, got {self.radius}")

    def contains(self, p) -> bool:
        return euclidean_dist(p, self.center) <= self.radius

    def contains_many(self, points: np.ndarray) -> np.ndarray:
        diff = points - self.center[None, :]
        return np.einsum("ij,ij->i", diff, diff) <= self.radius**2


@dataclass
class BuildStats:
    """Instrumentation of a roadmap or plan construction."""

    n_vertices: int = 0
    r: float = 0.0
    nn_time: float = 0.0
    cd_time: float = 0.0
    cd_calls: int = 0
    total_time: float = 0.0
    pairs: int = 0
    edges: int = 0
    edges_removed: int = 0
    goal_injected: bool = False
    extraction_costs: list = field(default_factory=list)


@dataclass
class Roadmap:
    """Graph (or tree) over sampled configurations.

    ``adjacency[i]`` lists ``(j, weight)`` with symmetric entries. Trees
    additionally carry ``parent`` (-1 at the root) and cost-to-come arrays.
    """

    points: np.ndarray
    adjacency: list[list[tuple[int, float]]]
    parent: np.ndarray | None = None
    cost: np.ndarray | None = None
    stats: BuildStats | None = None

    @property
    def n_vertices(self) -> int:
        return len(self.points)

    def edge_count(self) -> int:
        return sum(len(a) for a in self.adjacency) // 2

    def edges(self):
        """Yield each undirected edge once as (i, j, weight), i < j."""
        for i, nbrs in enumerate(self.adjacency):
            for j, w in nbrs:
                if i < j:
                    yield i, j, w


@dataclass
class PlanResult:
    """Outcome of a single planning query."""

    path: np.ndarray | None
    cost: float
    stats: BuildStats
    tree: "Roadmap | None" = None  # the planner's tree, when it builds one

    @property
    def success(self) -> bool:
        return self.path is not None


def _timed_all_pairs(backend: NnBackend, points: np.ndarray, r: float):
    t0 = time.perf_counter()
    store = backend.all_pairs(points, r)
    return store, time.perf_counter() - t0


def _gather_vertices(world: World, start: np.ndarray, n: int, rng: Rng,
                     goal: GoalRegion | None = None):
    """Start vertex first, then n free samples; inject the goal center as an
    extra vertex when no sample landed inside the goal region."""
    start = np.asarray(start, dtype=np.float64)
    if not is_free(world, start):
        raise ValueError("start configuration is not collision-free")
    samples = sample_free(world, rng, n)
    vertices = np.vstack([start[None, :], samples])
    injected = False
    if goal is not None:
        if not is_free(world, goal.center):
            raise ValueError("goal center is not collision-free")
        if not goal.contains_many(vertices).any():
            vertices = np.vstack([vertices, goal.center[None, :]])
            injected = True
    return vertices, injected


def _dijkstra(adjacency, source: int, n: int):
    """Shortest paths from ``source``; returns (dist, parent) arrays."""
    dist = np.full(n, np.inf)
    parent = np.full(n, -1, dtype=np.int64)
    dist[source] = 0.0
    done = np.zeros(n, dtype=bool)
    heap = [(0.0, source)]
    while heap:
        du, u = heapq.heappop(heap)
        if done[u]:
            continue
        done[u] = True
        for v, w in adjacency[u]:
            nd = du + w
            if nd < dist[v]:
                dist[v] = nd
                parent[v] = u
                heapq.heappush(heap, (nd, v))
    return dist, parent


def _backtrack(points: np.ndarray, parent: np.ndarray, end: int) -> np.ndarray:
    idx = [end]
    while parent[idx[-1]] != -1:
        idx.append(int(parent[idx[-1]]))
    return points[np.array(idx[::-1])]


def _goal_vertex(dist: np.ndarray, goal_mask: np.ndarray) -> int:
    """Reachable goal vertex of minimum path cost, or -1."""
    candidates = np.flatnonzero(goal_mask & np.isfinite(dist))
    if len(candidates) == 0:
        return -1
    return int(candidates[np.argmin(dist[candidates])])


# --------------------------------------------------------------------------
# batch roadmap planner (eager and lazy)


def prm_star(world: World, start, n: int, backend: NnBackend, rng: Rng,
             radius: float | None = None, radius_mode: str = "prm",
             eta: float = 0.1) -> Roadmap:
    """Build the r-disk roadmap over the start plus ``n`` free samples.

    Candidate edges come from one all-pairs query at the connection radius
    (the roadmap schedule by default, the smaller fast-marching schedule
    with ``radius_mode="fmt"``); each candidate is collision-checked and
    kept with its Euclidean length as weight.
    """
    t_start = time.perf_counter()
    vertices, _ = _gather_vertices(world, start, n, rng)
    mu = free_space_volume(world)
    if radius is None:
        radius = (radius_prm_star(n, world.d, mu) if radius_mode == "prm"
                  else radius_fmt_star(n, world.d, mu, eta))
    store, nn_time = _timed_all_pairs(backend, vertices, radius)
    ii, jj = store.pairs()

    adjacency: list[list[tuple[int, float]]] = [[] for _ in range(len(vertices))]
    t0 = time.perf_counter()
    edges = 0
    for i, j in zip(ii.tolist(), jj.tolist()):
        if collision_free_segment(world, vertices[i], vertices[j]):
            w = euclidean_dist(vertices[i], vertices[j])
            adjacency[i].append((j, w))
            adjacency[j].append((i, w))
            edges += 1
    cd_time = time.perf_counter() - t0

    stats = BuildStats(n_vertices=len(vertices), r=radius, nn_time=nn_time,
                       cd_time=cd_time, cd_calls=len(ii), pairs=len(ii),
                       edges=edges, total_time=time.perf_counter() - t_start)
    return Roadmap(points=vertices, adjacency=adjacency, stats=stats)


def prm_query(roadmap: Roadmap, start, goal: GoalRegion) -> PlanResult:
    """Shortest roadmap path from a start vertex into the goal region."""
    start = np.asarray(start, dtype=np.float64)
    matches = np.flatnonzero(np.all(roadmap.points == start[None, :], axis=1))
    if len(matches) == 0:
        raise ValueError("start is not a roadmap vertex")
    source = int(matches[0])

    t0 = time.perf_counter()
    if goal.contains(start):
        stats = BuildStats(n_vertices=roadmap.n_vertices,
                           total_time=time.perf_counter() - t0)
        return PlanResult(path=roadmap.points[[source]], cost=0.0, stats=stats)

    dist, parent = _dijkstra(roadmap.adjacency, source, roadmap.n_vertices)
    goal_mask = goal.contains_many(roadmap.points)
    end = _goal_vertex(dist, goal_mask)
    stats = BuildStats(n_vertices=roadmap.n_vertices,
                       total_time=time.perf_counter() - t0)
    if end < 0:
        return PlanResult(path=None, cost=math.inf, stats=stats)
    return PlanResult(path=_backtrack(roadmap.points, parent, end),
                      cost=float(dist[end]), stats=stats)


def lazy_prm_star(world: World, start, goal: GoalRegion, n: int,
                  backend: NnBackend, rng: Rng, radius: float | None = None,
                  radius_mode: str = "prm", eta: float = 0.1) -> PlanResult:
    """Batch roadmap with collision checks deferred to query time.

    The r-disk graph is built with no edge validation. Then, repeatedly:
    take the current shortest start-to-goal path, validate its edges, and
    drop every colliding edge. A path that survives validation is returned;
    it has exactly the cost the eager roadmap's query would have found,
    because edge removal only ever deletes edges the eager build would have
    rejected too. Validated-free edges are cached so no segment is checked
    twice.
    """
    t_start = time.perf_counter()
    vertices, injected = _gather_vertices(world, start, n, rng, goal)
    mu = free_space_volume(world)
    if radius is None:
        radius = (radius_prm_star(n, world.d, mu) if radius_mode == "prm"
                  else radius_fmt_star(n, world.d, mu, eta))
    store, nn_time = _timed_all_pairs(backend, vertices, radius)
    ii, jj = store.pairs()

    adjacency: list[dict[int, float]] = [{} for _ in range(len(vertices))]
    for i, j in zip(ii.tolist(), jj.tolist()):
        w = euclidean_dist(vertices[i], vertices[j])
        adjacency[i][j] = w
        adjacency[j][i] = w
    adj_lists = [list(d.items()) for d in adjacency]

    goal_mask = np.asarray(
        [goal.contains(v) for v in vertices], dtype=bool)
    validated: set[tuple[int, int]] = set()
    cd_calls = 0
    removed = 0
    cd_time = 0.0
    max_rounds = len(ii) + 1  # each failed round removes at least one edge

    for _ in range(max_rounds):
        dist, parent = _dijkstra(adj_lists, 0, len(vertices))
        end = _goal_vertex(dist, goal_mask)
        if end < 0:
            stats = BuildStats(n_vertices=len(vertices), r=radius, nn_time=nn_time,
                               cd_time=cd_time, cd_calls=cd_calls, pairs=len(ii),
                               edges_removed=removed, goal_injected=injected,
                               total_time=time.perf_counter() - t_start)
            return PlanResult(path=None, cost=math.inf, stats=stats)

        chain = [end]
        while parent[chain[-1]] != -1:
            chain.append(int(parent[chain[-1]]))
        chain.reverse()

        bad_edges = []
        t0 = time.perf_counter()
        for a, b in zip(chain, chain[1:]):
            key = (a, b) if a < b else (b, a)
            if key in validated:
                continue
            cd_calls += 1
            if collision_free_segment(world, vertices[a], vertices[b]):
                validated.add(key)
            else:
                bad_edges.append(key)
        cd_time += time.perf_counter() - t0

        if not bad_edges:
            stats = BuildStats(n_vertices=len(vertices), r=radius, nn_time=nn_time,
                               cd_time=cd_time, cd_calls=cd_calls, pairs=len(ii),
                               edges_removed=removed, goal_injected=injected,
                               total_time=time.perf_counter() - t_start)
            return PlanResult(path=_backtrack(vertices, parent, end),
                              cost=float(dist[end]), stats=stats)
        for a, b in bad_edges:
            adjacency[a].pop(b, None)
            adjacency[b].pop(a, None)
            removed += 1
        adj_lists = [list(d.items()) for d in adjacency]

    raise RuntimeError("lazy search failed to terminate within the edge budget")


# --------------------------------------------------------------------------
# fast-marching tree


def _fmt_pass(world: World, vertices: np.ndarray, goal: GoalRegion,
              backend: NnBackend, radius: float, stats: BuildStats) -> PlanResult:
    """Grow the minimum-cost-to-come tree from vertex 0 until the goal.

    One all-pairs query at ``radius`` fixes every vertex's neighbor list up
    front. The frontier set is expanded in cost order; each candidate vertex
    is wired to its locally best frontier parent, with a single collision
    check on that edge. Vertices whose best edge collides stay unconnected
    for now and may be reached again from a later frontier vertex.
    """
    n_v = len(vertices)
    store, nn_time = _timed_all_pairs(backend, vertices, radius)
    stats.nn_time += nn_time
    stats.pairs = len(store)
    nbrs = neighbor_lists_from_store(store, n_v)

    goal_mask = goal.contains_many(vertices)
    in_w = np.ones(n_v, dtype=bool)   # not yet wired into the tree
    in_h = np.zeros(n_v, dtype=bool)  # wired and expandable (the frontier)
    in_w[0] = False
    in_h[0] = True
    cost = np.full(n_v, np.inf)
    cost[0] = 0.0
    parent = np.full(n_v, -1, dtype=np.int64)
    heap = [(0.0, 0)]

    def tree_roadmap():
        adjacency: list[list[tuple[int, float]]] = [[] for _ in range(n_v)]
        for child in range(n_v):
            p = int(parent[child])
            if p != -1:
                w = float(cost[child] - cost[p])
                adjacency[child].append((p, w))
                adjacency[p].append((child, w))
        return Roadmap(points=vertices, adjacency=adjacency,
                       parent=parent, cost=cost)

    t_cd = 0.0
    while heap:
        cz, z = heapq.heappop(heap)
        stats.extraction_costs.append(cz)
        if goal_mask[z]:
            stats.cd_time += t_cd
            return PlanResult(path=_backtrack(vertices, parent, z),
                              cost=float(cost[z]), stats=stats,
                              tree=tree_roadmap())

        frontier_new = []
        for x in nbrs.neighbors(z).tolist():
            if not in_w[x]:
                continue
            candidates = nbrs.neighbors(x)
            candidates = candidates[in_h[candidates]]
            if len(candidates) == 0:
                continue
            diff = vertices[candidates] - vertices[x]
            totals = cost[candidates] + np.sqrt(np.einsum("ij,ij->i", diff, diff))
            best = int(np.argmin(totals))  # ties: lowest vertex index
            y_min = int(candidates[best])
            stats.cd_calls += 1
            t0 = time.perf_counter()
            free = collision_free_segment(world, vertices[y_min], vertices[x])
            t_cd += time.perf_counter() - t0
            if free:
                parent[x] = y_min
                cost[x] = float(totals[best])
                in_w[x] = False
                frontier_new.append(x)

        in_h[z] = False
        for x in frontier_new:
            in_h[x] = True
            heapq.heappush(heap, (float(cost[x]), x))

    stats.cd_time += t_cd
    return PlanResult(path=None, cost=math.inf, stats=stats, tree=tree_roadmap())


def fmt_star(world: World, start, goal: GoalRegion, n: int, backend: NnBackend,
             rng: Rng, eta: float = 0.1, radius: float | None = None) -> PlanResult:
    """Fast-marching tree over the start plus ``n`` free samples."""
    t_start = time.perf_counter()
    vertices, injected = _gather_vertices(world, start, n, rng, goal)
    mu = free_space_volume(world)
    if radius is None:
        radius = radius_fmt_star(n, world.d, mu, eta)
    stats = BuildStats(n_vertices=len(vertices), r=radius, goal_injected=injected)
    result = _fmt_pass(world, vertices, goal, backend, radius, stats)
    stats.total_time = time.perf_counter() - t_start
    return result


# --------------------------------------------------------------------------
# RRT exploration and the batched rewiring variant


def rrt(world: World, start, n: int, rng: Rng, steer_eps: float) -> Roadmap:
    """Standard RRT: ``n`` extension attempts, steering at most ``steer_eps``.

    Nearest-vertex queries are an exact linear scan -- the single-point
    query is not served by the all-pairs backends, and the scan is fine at
    the sample counts used here (documented hot spot).
    """
    if steer_eps <= 0:
        raise ValueError(f"steer_eps must be positive, got {steer_eps}")
    start = np.asarray(start, dtype=np.float64)
    if not is_free(world, start):
        raise ValueError("start configuration is not collision-free")

    t_start = time.perf_counter()
    points = np.empty((n + 1, world.d))
    points[0] = start
    parent = np.full(n + 1, -1, dtype=np.int64)
    cost = np.zeros(n + 1)
    size = 1
    cd_calls = 0
    cd_time = 0.0

    for _ in range(n):
        x_rand = sample_free(world, rng, 1)[0]
        diff = points[:size] - x_rand
        nearest = int(np.argmin(np.einsum("ij,ij->i", diff, diff)))
        gap = x_rand - points[nearest]
        dist = float(np.linalg.norm(gap))
        if dist == 0.0:
            continue
        x_new = points[nearest] + min(1.0, steer_eps / dist) * gap
        cd_calls += 1
        t0 = time.perf_counter()
        free = collision_free_segment(world, points[nearest], x_new)
        cd_time += time.perf_counter() - t0
        if not free:
            continue
        points[size] = x_new
        parent[size] = nearest
        cost[size] = cost[nearest] + euclidean_dist(points[nearest], x_new)
        size += 1

    points = points[:size]
    parent = parent[:size]
    cost = cost[:size]
    adjacency: list[list[tuple[int, float]]] = [[] for _ in range(size)]
    for child in range(1, size):
        p = int(parent[child])
        w = float(cost[child] - cost[p])
        adjacency[child].append((p, w))
        adjacency[p].append((child, w))
    stats = BuildStats(n_vertices=size, cd_calls=cd_calls, cd_time=cd_time,
                       total_time=time.perf_counter() - t_start)
    return Roadmap(points=points, adjacency=adjacency, parent=parent,
                   cost=cost, stats=stats)


def batched_rrt_star(world: World, start, goal: GoalRegion, n: int,
                     backend: NnBackend, rng: Rng, steer_eps: float,
                     eta: float = 0.1, radius: float | None = None) -> PlanResult:
    """RRT exploration followed by the fast-marching pass over its vertices.

    The RRT supplies the vertex set (no resampling); the tree pass then
    rebuilds the minimum-cost-to-come tree over those vertices using the
    fast-marching connection radius evaluated at the actual vertex count.
    """
    t_start = time.perf_counter()
    tree = rrt(world, start, n, rng, steer_eps)
    vertices = tree.points
    injected = False
    if not goal.contains_many(vertices).any():
        if not is_free(world, goal.center):
            raise ValueError("goal center is not collision-free")
        vertices = np.vstack([vertices, goal.center[None, :]])
        injected = True
    mu = free_space_volume(world)
    if radius is None:
        radius = radius_fmt_star(max(len(vertices), 2), world.d, mu, eta)
    stats = BuildStats(n_vertices=len(vertices), r=radius, goal_injected=injected,
                       cd_calls=tree.stats.cd_calls, cd_time=tree.stats.cd_time)
    result = _fmt_pass(world, vertices, goal, backend, radius, stats)
    stats.total_time = time.perf_counter() - t_start
    return result


def rewire_rrt_star(tree: Roadmap, x_potential_parent: int, x_child: int,
                    world: World) -> bool:
    """Reparent ``x_child`` onto ``x_potential_parent`` if that is strictly
    cheaper and the connecting segment is free.

    On success the child's subtree costs are updated in place. With
    consistent tree costs a cycle-creating rewire is impossible (any
    descendant costs strictly more than the child); this is asserted by
    walking the new parent's ancestry.
    """
    if tree.parent is None or tree.cost is None:
        raise ValueError("rewiring needs a tree roadmap with parent/cost arrays")
    n_v = tree.n_vertices
    if not (0 <= x_potential_parent < n_v and 0 <= x_child < n_v):
        raise ValueError("vertex index out of range")
    if x_potential_parent == x_child:
        return False
    if not collision_free_segment(world, tree.points[x_potential_parent],
                                  tree.points[x_child]):
        return False
    c = euclidean_dist(tree.points[x_potential_parent], tree.points[x_child])
    new_cost = tree.cost[x_potential_parent] + c
    if not new_cost < tree.cost[x_child]:
        return False

    node = x_potential_parent
    while node != -1:
        if node == x_child:
            raise RewireCycleError(
                "potential parent is a descendant of the child; tree costs are inconsistent")
        node = int(tree.parent[node])

    delta = new_cost - tree.cost[x_child]
    tree.parent[x_child] = x_potential_parent
    children: list[list[int]] = [[] for _ in range(n_v)]
    for v in range(n_v):
        p = int(tree.parent[v])
        if p != -1:
            children[p].append(v)
    stack = [x_child]
    while stack:
        v = stack.pop()
        tree.cost[v] += delta
        stack.extend(children[v])
    return True
