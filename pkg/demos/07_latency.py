"""
Query latency
=============

The content queries read one world, the conflict query also probes a
second world for negatives, and the user query must try every user's
world.  Times are for the in-process engine on this machine.
"""

from beliefdb import bench

params = bench.GenParams(m=100, n=10_000, depth_dist=(0.199, 0.8, 0.001), seed=0)
store = bench.build_store(bench.generate(params), params.m)
report = bench.run_queries(store, bench.benchmark_queries((1, 2)), repetitions=10, n=params.n)

print(f"overhead {report.overhead:.1f}")
for name, text in bench.benchmark_sql(("user1", "user2")).items():
    t = report.timing(name)
    print(f"{name:<5} {t.mean_ms:7.2f} ms  ±{t.stdev_ms:5.2f}  rows={t.result_size:<5} {text[:70]}")
