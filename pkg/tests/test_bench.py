from collections import Counter

import pytest

from beliefdb import Session, Store, check_integrity, db_consistent, stats
from beliefdb.bench import (
    SCHEMA,
    SIZE_BOUND_C,
    UNIFORM_THIRDS,
    GenParams,
    benchmark_queries,
    build_store,
    generate,
    overhead_csv,
    run_overhead,
    run_overhead_cell,
    run_queries,
    size_bound_holds,
    statements_to_bsql,
    table1_grid,
    users_for,
)
from beliefdb.core import BeliefDatabase
from beliefdb.store import materialize


def test_generation_is_deterministic():
    p = GenParams(10, 500, seed=4)
    assert generate(p) == generate(p)
    assert generate(p) != generate(GenParams(10, 500, seed=5))


def test_empty_generation():
    assert generate(GenParams(10, 0)) == []


def test_generated_database_is_consistent():
    p = GenParams(5, 800, participation="zipf", seed=1)
    statements = generate(p)
    assert len(statements) == 800
    db = BeliefDatabase(SCHEMA, users_for(5), frozenset(statements))
    assert db_consistent(db)


def test_depth_frequencies():
    statements = generate(GenParams(10, 10_000, UNIFORM_THIRDS, seed=0))
    counts = Counter(len(s.path) for s in statements)
    for d in range(3):
        assert counts[d] / 10_000 == pytest.approx(1 / 3, abs=0.02)


def test_zipf_participation_skews_users():
    statements = generate(GenParams(5, 5000, (0, 1), "zipf", seed=0))
    counts = Counter(s.path[0] for s in statements)
    assert counts[1] > counts[2] > counts[3] > counts[4]
    assert counts[1] / 5000 == pytest.approx(0.5 / (1 - 2 ** -5), abs=0.03)


def test_parameter_validation():
    with pytest.raises(ValueError):
        GenParams(1, 10, UNIFORM_THIRDS)
    with pytest.raises(ValueError):
        GenParams(3, 10, (0.5, 0.4))
    with pytest.raises(ValueError):
        GenParams(3, 10, participation="pareto")
    with pytest.raises(ValueError):
        GenParams(0, 10)


def test_build_store_matches_batch():
    p = GenParams(4, 300, seed=2)
    statements = generate(p)
    store = build_store(statements, p.m)
    check_integrity(store)
    db = BeliefDatabase(SCHEMA, users_for(p.m), frozenset(statements))
    assert store.canonical() == materialize(db).canonical()


def test_size_bound_and_structure():
    for m, n, part in [(1, 500, "uniform"), (10, 1000, "uniform"), (10, 1000, "zipf"), (30, 2000, "uniform")]:
        depth = (0.5, 0.5) if m == 1 else UNIFORM_THIRDS
        store = build_store(generate(GenParams(m, n, depth, part)), m)
        report = stats(store, n)
        assert size_bound_holds(report, n)
        assert report.total <= SIZE_BOUND_C * (n + m) * report.N
        assert report.counts["S"] == report.N - 1
        assert report.counts["E"] == m + (report.N - 1) * (m - 1)


def test_single_user_overhead_is_small():
    cell = run_overhead_cell(GenParams(1, 1000, (0.5, 0.5)))
    assert 1 < cell.overhead < 3


def test_overhead_grid_shape():
    grid = table1_grid(200, (3, 5))
    assert len(grid) == 12
    cells = run_overhead(grid)
    text = overhead_csv(cells)
    assert text.count("\n") == 13
    assert text.startswith("m,n,depth_dist,participation")


def test_seed_averaging():
    one = run_overhead_cell(GenParams(5, 200, seed=0))
    three = run_overhead_cell(GenParams(5, 200, seed=0), seeds=3)
    assert three.seeds == 3 and one.overhead != three.overhead


def test_query_report_on_empty_store():
    store = Store(SCHEMA, users_for(2))
    report = run_queries(store, benchmark_queries(), repetitions=1)
    assert [t.name for t in report.timings] == ["q1_0", "q1_1", "q1_2", "q1_3", "q1_4", "q2", "q3"]
    assert all(t.result_size == 0 for t in report.timings)
    assert report.to_csv().splitlines()[0] == "query,mean_ms,stdev_ms,result_size"


def test_bsql_export_replays_to_same_store():
    p = GenParams(4, 200, seed=3, root_negatives=False)
    statements = generate(p)
    session = Session()
    session.execute(statements_to_bsql(statements, p.m))
    assert session.store.canonical() == build_store(statements, p.m).canonical()


def test_bsql_export_refuses_root_negatives():
    statements = generate(GenParams(4, 200, seed=3, negative_prob=0.9))
    with pytest.raises(ValueError):
        statements_to_bsql(statements, 4)
