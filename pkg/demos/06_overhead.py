"""
Storage overhead under different annotation habits
==================================================

Synthetic annotations vary the depth of belief paths and how evenly
users take part.  Each default a world inherits is stored as a row, so
deep paths spread over many users cost the most.  This runs a small
version of the overhead grid; ``beliefdb bench --kind overhead`` runs
the full one.
"""

from beliefdb import bench

N = 2000
cells = bench.run_overhead(bench.table1_grid(N, ms=(10, 100)))

print(f"relative overhead, n={N}")
print(f"{'depth distribution':<22}" + "".join(f"{f'm={m} {p}':>14}" for m in (10, 100) for p in ("zipf", "uniform")))
for depth in bench.TABLE1_DEPTHS:
    row = [c for c in cells if c.params.depth_dist == depth]
    label = "/".join(f"{x:.3g}" for x in depth)
    print(f"{label:<22}" + "".join(f"{c.overhead:>14.1f}" for c in row))

# %%
# The size bound holds on every generated store.
print(all(bench.size_bound_holds(c.report, N) for c in cells))
