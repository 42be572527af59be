"""All-pairs fixed-radius neighbor search over randomly shifted grids, plus
the sampling-based motion planners that consume it.

The core primitive answers one query: given n points in the unit hypercube
and a radius r, report every pair at Euclidean distance at most r. The
engine overlays m randomly shifted uniform grids and brute-forces within
cells, trading a tunable sliver of recall for large speedups; exact
baselines (brute force, a fixed unshifted grid) share the same interface.
On top sit the standard batch planners -- PRM*, its lazy variant, FMT*, and
a batched RRT* -- all parameterized over the neighbor backend.
"""

from .baselines import (BACKEND_FACTORIES, BenchmarkRecord, BruteForceBackend,
                        NnBackend, RsgBackend, StaticGridBackend,
                        benchmark_backend, make_backend, static_grid_all_pairs)
from .engine import (RsgParams, brute_force_all_pairs, recall,
                     shifted_grids_all_pairs)
from .geometry import (Rng, as_point_set, euclidean_dist, make_rng,
                       sample_unit_hypercube, split_seeds, squared_dist)
from .grid import ShiftedGrid, build_grid, cell_keys
from .pairstore import (BitPairStore, BitStoreMemoryError, NeighborLists,
                        PairStore, SetPairStore, neighbor_lists_from_store)
from .planners import (BuildStats, GoalRegion, PlanResult, RewireCycleError,
                       Roadmap, batched_rrt_star, fmt_star, lazy_prm_star,
                       prm_query, prm_star, radius_fmt_star, radius_prm_star,
                       radius_rrt_star, rewire_rrt_star, rrt, unit_ball_volume)
from .tuning import (DEFAULT_CTILDE_CANDIDATES, DEFAULT_M_CANDIDATES,
                     NoTunedEntryError, TuningFailedError, auto_tune,
                     lookup_tuned_params, params_for, sweep_candidates)
from .world import (Aabb, DegenerateWorldError, SamplingStalledError, Scenario,
                    World, collision_free_segment, free_space_volume, is_free,
                    make_scenario, read_scenario, sample_free, write_scenario)

__version__ = "0.1.0"
