"""Benchmark experiments and their CSV result format.

Each experiment function takes a config dataclass and returns result rows;
the CLI wraps these with config-file/flag handling and writes one CSV per
invocation. Every row is self-describing (all parameters present, explicit
seed), timing columns use a monotonic clock with six decimals, and
everything except wall times is reproducible bit for bit given the config.
"""

from __future__ import annotations

import csv
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields

from .baselines import BACKEND_FACTORIES, make_backend
from .engine import brute_force_all_pairs, recall
from .geometry import euclidean_dist, make_rng, sample_unit_hypercube, split_seeds
from .pairstore import BitPairStore, SetPairStore
from .planners import (GoalRegion, batched_rrt_star, fmt_star, lazy_prm_star,
                       prm_query, prm_star, radius_fmt_star, radius_prm_star)
from .tuning import select_best, sweep_candidates
from .world import free_space_volume, make_scenario, write_scenario

PLANNERS = ("fmt_star", "batched_rrt_star", "lazy_prm_star")

DEFAULT_NN_SEEDS = 10       # averaging width for neighbor-query timing runs
DEFAULT_PLAN_SEEDS = 20     # averaging width for planning runs

_STORE_FACTORIES = {"set": SetPairStore, "bit": BitPairStore}


class ConfigError(ValueError):
    """Invalid benchmark configuration."""


@dataclass
class ResultRow:
    """One self-describing measurement row."""

    experiment: str
    d: int
    n: int
    seed: int
    backend: str = ""
    planner: str = ""
    m: int | None = None
    c_tilde: float | None = None
    r: float | None = None
    t_build: float | None = None
    t_nn: float | None = None
    t_cd: float | None = None
    t_total: float | None = None
    recall: float | None = None
    pairs: int | None = None
    path_cost: float | None = None
    norm_cost: float | None = None
    success: bool | None = None


_TIME_FIELDS = {"t_build", "t_nn", "t_cd", "t_total"}
_INT_FIELDS = {"d", "n", "seed", "m", "pairs"}
_FLOAT_FIELDS = {"c_tilde", "r", "recall", "path_cost", "norm_cost"}

RESULT_COLUMNS = [f.name for f in fields(ResultRow)]


def _format_cell(name: str, value) -> str:
    if value is None:
        return ""
    if name in _TIME_FIELDS:
        return f"{value:.6f}"
    if name == "success":
        return "1" if value else "0"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _parse_cell(name: str, text: str):
    if name in ("experiment", "backend", "planner"):
        return text  # plain strings; empty means not applicable
    if text == "":
        return None
    if name in _INT_FIELDS:
        return int(text)
    if name in _FLOAT_FIELDS or name in _TIME_FIELDS:
        return float(text)
    if name == "success":
        return text == "1"
    return text


def sort_rows(rows: list[ResultRow]) -> list[ResultRow]:
    return sorted(rows, key=lambda r: (
        r.experiment, r.d, r.n, r.backend, r.planner, r.seed,
        r.m if r.m is not None else -1,
        r.c_tilde if r.c_tilde is not None else -1.0,
    ))


def write_rows(path, rows: list[ResultRow]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(RESULT_COLUMNS)
        for row in rows:
            writer.writerow([_format_cell(c, getattr(row, c)) for c in RESULT_COLUMNS])


def read_rows(path) -> list[ResultRow]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != RESULT_COLUMNS:
            raise ConfigError(f"unexpected result header in {path}")
        return [ResultRow(**{c: _parse_cell(c, v) for c, v in zip(header, line)})
                for line in reader]


def _resolve_store(name: str):
    try:
        return _STORE_FACTORIES[name]
    except KeyError:
        raise ConfigError(f"unknown pair store {name!r}; known: {sorted(_STORE_FACTORIES)}")


def _run_units(units, worker, jobs: int):
    if jobs <= 1:
        results = [worker(u) for u in units]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(worker, units))
    rows: list[ResultRow] = []
    for chunk in results:
        rows.extend(chunk)
    return sort_rows(rows)


# --------------------------------------------------------------------------
# tune


@dataclass
class TuneConfig:
    d: int = 9
    n: int = 12800
    target_recall: float = 0.98
    m_list: tuple = tuple(range(5, 65, 5))
    ctilde_list: tuple = (1.1,)
    trials: int = 3
    base_seed: int = 0
    radius_formula: str = "fmt"
    eta: float = 0.1
    mu: float = 1.0
    store: str = "set"


def _query_radius(formula: str, n: int, d: int, mu: float, eta: float) -> float:
    if formula == "fmt":
        return radius_fmt_star(n, d, mu, eta)
    if formula == "prm":
        return radius_prm_star(n, d, mu)
    raise ConfigError(f"unknown radius formula {formula!r}; use 'fmt' or 'prm'")


def run_tune(cfg: TuneConfig) -> list[ResultRow]:
    """Sweep (m, c_tilde) candidates and mark the fastest one meeting the
    recall target.

    Emits one row per candidate (mean recall and mean time over the trials)
    plus a final ``tune-best`` row; fails softly when no candidate reaches
    the target, still reporting the sweep with the best-recall candidate
    marked.
    """
    r = _query_radius(cfg.radius_formula, cfg.n, cfg.d, cfg.mu, cfg.eta)
    results = sweep_candidates(
        sample_unit_hypercube, cfg.n, cfg.d, r,
        cfg.m_list, cfg.ctilde_list, trials=cfg.trials, base_seed=cfg.base_seed,
        store_factory=_resolve_store(cfg.store))
    rows = [ResultRow(experiment="tune", d=cfg.d, n=cfg.n, seed=cfg.base_seed,
                      backend="rsg", m=c.m, c_tilde=c.c_tilde, r=r,
                      t_total=c.mean_time, recall=c.mean_recall)
            for c in results]
    try:
        best = select_best(results, cfg.target_recall)
        reached = True
    except Exception:
        best = max(results, key=lambda c: c.mean_recall)
        reached = False
    rows.append(ResultRow(experiment="tune-best", d=cfg.d, n=cfg.n, seed=cfg.base_seed,
                          backend="rsg", m=best.m, c_tilde=best.c_tilde, r=r,
                          t_total=best.mean_time, recall=best.mean_recall,
                          success=reached))
    return sort_rows(rows)


# --------------------------------------------------------------------------
# nn-compare


@dataclass
class NnCompareConfig:
    dims: tuple = (3, 6)
    n_list: tuple = (400, 800, 1600)
    backends: tuple = ("brute-force", "static-grid", "rsg")
    seeds: tuple = tuple(range(DEFAULT_NN_SEEDS))
    eta: float = 0.1
    mu: float = 1.0
    store: str = "set"
    jobs: int = 1


def run_nn_compare(cfg: NnCompareConfig) -> list[ResultRow]:
    """Time each backend's all-pairs query and score recall vs. the oracle."""
    for name in cfg.backends:
        if name not in BACKEND_FACTORIES:
            raise ConfigError(f"unknown backend {name!r}; known: {sorted(BACKEND_FACTORIES)}")
    store_factory = _resolve_store(cfg.store)
    units = [(d, n, seed) for d in cfg.dims for n in cfg.n_list for seed in cfg.seeds]

    def worker(unit):
        d, n, seed = unit
        r = radius_fmt_star(n, d, cfg.mu, cfg.eta)
        points = sample_unit_hypercube(make_rng(seed), n, d)
        truth = brute_force_all_pairs(points, r)
        out = []
        for name in cfg.backends:
            kwargs = {"store_factory": store_factory} if name != "rsg-bit" else {}
            if name.startswith("rsg"):
                kwargs["seed"] = split_seeds(seed, 1)[0]
            backend = make_backend(name, **kwargs)
            t0 = time.perf_counter()
            reported = backend.all_pairs(points, r)
            elapsed = time.perf_counter() - t0
            params = backend.describe()
            out.append(ResultRow(
                experiment="nn-compare", d=d, n=n, seed=seed, backend=name,
                m=params.get("m"), c_tilde=params.get("c_tilde"), r=r,
                t_nn=elapsed, t_total=elapsed,
                recall=recall(reported, truth), pairs=len(reported)))
        return out

    return _run_units(units, worker, cfg.jobs)


# --------------------------------------------------------------------------
# roadmap-build


@dataclass
class RoadmapBuildConfig:
    scenario: str = "z-tunnel"
    d: int = 3
    n_list: tuple = (500, 1000, 2000)
    backends: tuple = ("brute-force", "rsg")
    seeds: tuple = tuple(range(DEFAULT_PLAN_SEEDS))
    goal_radius: float = 0.25
    radius_mode: str = "prm"
    eta: float = 0.1
    store: str = "set"
    jobs: int = 1


def run_roadmap_build(cfg: RoadmapBuildConfig) -> list[ResultRow]:
    """Time eager roadmap construction per backend and record whether the
    start-goal query succeeds on the built roadmap."""
    for name in cfg.backends:
        if name not in BACKEND_FACTORIES:
            raise ConfigError(f"unknown backend {name!r}; known: {sorted(BACKEND_FACTORIES)}")
    store_factory = _resolve_store(cfg.store)
    scenario = make_scenario(cfg.scenario, cfg.d)
    goal = GoalRegion(scenario.goal, cfg.goal_radius)
    units = [(n, seed, name) for n in cfg.n_list for seed in cfg.seeds
             for name in cfg.backends]

    def worker(unit):
        n, seed, name = unit
        rng_seed, backend_seed = split_seeds(seed, 2)
        kwargs = {"store_factory": store_factory} if name != "rsg-bit" else {}
        if name.startswith("rsg"):
            kwargs["seed"] = backend_seed
        backend = make_backend(name, **kwargs)
        roadmap = prm_star(scenario.world, scenario.start, n, backend,
                           make_rng(rng_seed), radius_mode=cfg.radius_mode,
                           eta=cfg.eta)
        result = prm_query(roadmap, scenario.start, goal)
        st = roadmap.stats
        params = backend.describe()
        return [ResultRow(
            experiment="roadmap-build", d=cfg.d, n=n, seed=seed, backend=name,
            planner="prm_star", m=params.get("m"), c_tilde=params.get("c_tilde"),
            r=st.r, t_build=st.total_time, t_nn=st.nn_time, t_cd=st.cd_time,
            t_total=st.total_time + result.stats.total_time, pairs=st.pairs,
            path_cost=result.cost if result.success else None,
            success=result.success)]

    return _run_units(units, worker, cfg.jobs)


# --------------------------------------------------------------------------
# converge


@dataclass
class ConvergeConfig:
    scenario: str = "empty"
    d: int = 3
    planner: str = "fmt_star"
    schedule: tuple = (250, 500, 1000, 2000)
    backend: str = "brute-force"
    seeds: tuple = tuple(range(DEFAULT_PLAN_SEEDS))
    goal_radius: float = 0.1
    eta: float = 0.1
    steer_eps: float = 0.1
    store: str = "set"
    jobs: int = 1


def run_converge(cfg: ConvergeConfig) -> list[ResultRow]:
    """Batch-to-anytime driver: re-run the planner at each sample count of a
    doubling schedule, recording cumulative time and best-so-far cost.

    Costs are also normalized by the straight-line lower bound (distance
    from start to the goal ball), which no valid path can beat.
    """
    if cfg.planner not in PLANNERS:
        raise ConfigError(f"unknown planner {cfg.planner!r}; known: {PLANNERS}")
    if cfg.backend not in BACKEND_FACTORIES:
        raise ConfigError(f"unknown backend {cfg.backend!r}")
    store_factory = _resolve_store(cfg.store)
    scenario = make_scenario(cfg.scenario, cfg.d)
    goal = GoalRegion(scenario.goal, cfg.goal_radius)
    lower_bound = max(euclidean_dist(scenario.start, scenario.goal) - cfg.goal_radius, 0.0)
    if lower_bound <= 0:
        raise ConfigError("goal region contains the start; nothing to converge to")

    def worker(seed):
        rows = []
        best = math.inf
        elapsed = 0.0
        for step, n in enumerate(cfg.schedule):
            rng_seed, backend_seed = split_seeds(seed * 1000 + step, 2)
            kwargs = {"store_factory": store_factory} if cfg.backend != "rsg-bit" else {}
            if cfg.backend.startswith("rsg"):
                kwargs["seed"] = backend_seed
            backend = make_backend(cfg.backend, **kwargs)
            rng = make_rng(rng_seed)
            if cfg.planner == "fmt_star":
                res = fmt_star(scenario.world, scenario.start, goal, n, backend,
                               rng, eta=cfg.eta)
            elif cfg.planner == "batched_rrt_star":
                res = batched_rrt_star(scenario.world, scenario.start, goal, n,
                                       backend, rng, steer_eps=cfg.steer_eps,
                                       eta=cfg.eta)
            else:
                res = lazy_prm_star(scenario.world, scenario.start, goal, n,
                                    backend, rng, eta=cfg.eta)
            elapsed += res.stats.total_time
            if res.success:
                best = min(best, res.cost)
            rows.append(ResultRow(
                experiment="converge", d=cfg.d, n=n, seed=seed,
                backend=cfg.backend, planner=cfg.planner, r=res.stats.r,
                t_nn=res.stats.nn_time, t_cd=res.stats.cd_time, t_total=elapsed,
                path_cost=best if math.isfinite(best) else None,
                norm_cost=best / lower_bound if math.isfinite(best) else None,
                success=math.isfinite(best)))
        return rows

    return _run_units(list(cfg.seeds), worker, cfg.jobs)


# --------------------------------------------------------------------------
# scenario-emit


@dataclass
class ScenarioEmitConfig:
    scenario: str = "z-tunnel"
    d: int = 3


def run_scenario_emit(cfg: ScenarioEmitConfig, out_path) -> None:
    scenario = make_scenario(cfg.scenario, cfg.d)
    free_space_volume(scenario.world)  # validates the world is not degenerate
    write_scenario(out_path, scenario)
