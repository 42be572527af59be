"""Worlds, volumes, and the scenario file format.

Free-space volume feeds the planners' connection radii, so it is computed
exactly whenever the obstacle boxes allow (disjoint boxes, or few enough
for inclusion-exclusion) and by seeded Monte Carlo otherwise. Scenarios
round-trip through a small JSON format, also writable from the CLI:
    shiftgrid-bench scenario-emit --scenario z-tunnel --d 3 --out z.json
"""

import tempfile
from pathlib import Path

import numpy as np

import shiftgrid as sg

for name in ("empty", "z-tunnel", "grid-of-boxes"):
    sc = sg.make_scenario(name, 3)
    mu = sg.free_space_volume(sc.world)
    print(f"{name:14s} d=3  obstacles={len(sc.world.obstacles):3d}  "
          f"mu={mu:.4f} ({sc.world.volume_method})")

# overlapping boxes: inclusion-exclusion handles up to 20 exactly
w = sg.World(2, [sg.Aabb(np.array([0.0, 0.0]), np.array([0.5, 1.0])),
                 sg.Aabb(np.array([0.25, 0.0]), np.array([0.75, 1.0]))])
print(f"\ntwo overlapping slabs: mu = {sg.free_space_volume(w):.4f} (exactly 0.25)")

# beyond 20 overlapping boxes the volume falls back to seeded Monte Carlo
rng = sg.make_rng(5)
boxes = []
for _ in range(24):
    lo = rng.random(2) * 0.5
    boxes.append(sg.Aabb(lo, lo + 0.3))
w = sg.World(2, boxes)
mu = sg.free_space_volume(w, mc_seed=1)
print(f"24 overlapping boxes: mu ~= {mu:.4f} "
      f"({w.volume_method}, seed={w.volume_mc_seed}, samples={w.volume_mc_samples})")

# the scenario file round-trips
sc = sg.make_scenario("z-tunnel", 3)
path = Path(tempfile.gettempdir()) / "z_tunnel_demo.json"
sg.write_scenario(path, sc)
back = sg.read_scenario(path)
print(f"\nwrote and re-read {path.name}: d={back.world.d}, "
      f"{len(back.world.obstacles)} obstacles, start {back.start.tolist()}")

# rejection sampling respects the obstacles; boundaries count as colliding
pts = sg.sample_free(sc.world, sg.make_rng(0), 1000)
print(f"sampled {len(pts)} free configurations; all free: "
      f"{bool(sc.world.points_free(pts).all())}")
print(f"a point on an obstacle face is colliding: "
      f"{not sg.is_free(sc.world, np.array([0.25, 0.4, 0.5]))}")
