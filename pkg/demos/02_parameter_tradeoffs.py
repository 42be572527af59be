"""The two knobs of the shifted-grids engine: grid count and cell size.

More grids (m) and larger cells (c_tilde) both push recall up and runtime
up. This sweep prints the trade-off table and picks the fastest setting
that clears a 98% recall target -- the same procedure that produced the
parameter table shipped with the package.

Writes the sweep as a bench CSV so the plotting frontend can render it:
    python demos/02_parameter_tradeoffs.py
    cd frontend && npm run render -- --input ../demos/out/tune_sweep.csv \
        --kind tune-sweep --out ../demos/out/tune_sweep.svg
"""

from pathlib import Path

from shiftgrid.bench import TuneConfig, run_tune, write_rows

cfg = TuneConfig(d=6, n=3200, target_recall=0.98,
                 m_list=(5, 10, 15, 20, 25, 30, 35, 40),
                 ctilde_list=(1.35,), trials=3, base_seed=0)
rows = run_tune(cfg)

print(f"n={cfg.n}, d={cfg.d}, cell-size factor fixed at {cfg.ctilde_list[0]}\n")
print("   m   recall    mean time")
for row in rows:
    if row.experiment == "tune":
        print(f"  {row.m:>2}   {row.recall:.4f}   {row.t_total:8.3f}s")
best = next(r for r in rows if r.experiment == "tune-best")
verdict = "meets" if best.success else "MISSES"
print(f"\nselected: m={best.m}, c_tilde={best.c_tilde} "
      f"({verdict} the {cfg.target_recall:.0%} target at recall {best.recall:.4f})")

out = Path(__file__).parent / "out"
out.mkdir(exist_ok=True)
write_rows(out / "tune_sweep.csv", rows)
print(f"\nwrote {out / 'tune_sweep.csv'}")
