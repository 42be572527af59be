"""All-pairs radius search, three ways.

Samples points in the unit cube, asks for every pair within a radius, and
compares the exact brute-force scan, the exact fixed-grid baseline, and the
approximate randomly-shifted-grids engine (which trades ~2% of recall for a
large speedup as n grows).
"""

import time

import shiftgrid as sg

n, d = 20_000, 6
rng = sg.make_rng(7)
points = sg.sample_unit_hypercube(rng, n, d)
r = sg.radius_fmt_star(n, d, mu_free=1.0, eta=0.1)
print(f"{n} points in {d}-D, radius {r:.4f}\n")

t0 = time.perf_counter()
truth = sg.brute_force_all_pairs(points, r)
t_brute = time.perf_counter() - t0
print(f"brute force      {len(truth):>9} pairs   {t_brute:6.2f}s")

t0 = time.perf_counter()
exact = sg.static_grid_all_pairs(points, r)
t_static = time.perf_counter() - t0
print(f"static grid      {len(exact):>9} pairs   {t_static:6.2f}s (exact)")

m, c_tilde = sg.lookup_tuned_params(n, d)
params = sg.RsgParams(r=r, c_tilde=c_tilde, m=m)
t0 = time.perf_counter()
approx = sg.shifted_grids_all_pairs(points, params, sg.make_rng(1))
t_rsg = time.perf_counter() - t0
print(f"shifted grids    {len(approx):>9} pairs   {t_rsg:6.2f}s "
      f"(recall {sg.recall(approx, truth):.4f}, m={m}, c_tilde={c_tilde})")

# the same pairs, bit-matrix store: faster, memory fixed at n(n-1)/2 bits
t0 = time.perf_counter()
approx_bit = sg.shifted_grids_all_pairs(points, params, sg.make_rng(1),
                                        sg.BitPairStore(n))
t_bit = time.perf_counter() - t0
print(f"  (bit store)    {len(approx_bit):>9} pairs   {t_bit:6.2f}s")

# per-point neighbor lookups come free once the pairs are stored twice
lists = sg.neighbor_lists_from_store(approx, n)
print(f"\npoint 0 has {lists.degree(0)} recalled neighbors: "
      f"{lists.neighbors(0)[:8].tolist()} ...")
