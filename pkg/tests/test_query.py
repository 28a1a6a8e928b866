import random

import pytest

from beliefdb import (
    NEG,
    POS,
    Bcq,
    Const,
    Store,
    Subgoal,
    UnsafeQueryError,
    Var,
    check_safety,
    evaluate,
    materialize,
    parse_bcq,
    query,
    translate,
)
from beliefdb.bench import benchmark_queries
from beliefdb.errors import BeliefDBError, SchemaError
from beliefdb.query import Comparison, compare, negative_witnesses
from beliefdb.sample import ALICE, BOB, SAMPLES_SCHEMA, SCHEMA, USERS

from conftest import brute_force, corpus, random_query

EX17 = "q(x,y,z) :- [y] R+(x,u,v), [z] R-(x,u,v)"
Q3 = "q3(x) :- [x] Sightings-(y,z,u,v,'Lake Placid'), [1] Sightings+(y,z,u,v,'Lake Placid')"


def test_parse_bcq_forms():
    q = parse_bcq("q(x) :- □_{2·1} R+(x,'a',3), □_y S-(x,_), x != 'b'")
    assert q.subgoals[0].path == (Const(2), Const(1))
    assert q.subgoals[0].args == (Var("x"), Const("a"), Const(3))
    assert q.subgoals[1].path == (Var("y"),)
    assert q.subgoals[1].sign is NEG
    assert q.comparisons == (Comparison(Var("x"), "!=", Const("b")),)
    assert str(parse_bcq(EX17)) == "q(x,y,z) :- □_y R+(x,u,v), □_z R−(x,u,v)"


def test_parse_bcq_errors():
    with pytest.raises(BeliefDBError):
        parse_bcq("q(x) :- R+(x")
    with pytest.raises(BeliefDBError):
        parse_bcq("q(x) :- [1] R+(x) extra")


def test_alpha_equivalence():
    a = parse_bcq("q(a) :- [b] R+(a,c,d)")
    b = parse_bcq("p(x) :- [y] R+(x,u,v)")
    assert a.equivalent(b)
    assert not a.equivalent(parse_bcq("p(x) :- [y] R-(x,u,v)"))


def test_safety():
    assert check_safety(parse_bcq(EX17))
    assert check_safety(parse_bcq(Q3))
    unsafe = parse_bcq("q(y) :- [1] R-(y,u,v)")
    assert not check_safety(unsafe)
    with pytest.raises(UnsafeQueryError):
        translate(unsafe)
    # variables only in comparisons are unsafe too
    assert not check_safety(parse_bcq("q(x) :- [1] R+(x,u,v), w != x"))


def test_translate_example_17():
    plan = translate(parse_bcq(EX17), SAMPLES_SCHEMA)
    assert len(plan.temp_tables) == 2
    text = plan.render()
    assert "T1(y,x,u,v,s) :- E(0,y,z1), V(z1,t,x,s,_), R*(t,_,u,v)" in text
    assert "T2(z,x,u,v,s) :- E(0,z,z1), V(z1,t,x,s,_), R*(t,_,u,v)" in text
    assert "(s2 = '−' ∧ u2 = u ∧ v2 = v) ∨ (s2 = '+' ∧ (u2 ≠ u ∨ v2 ≠ v))" in text


def test_translate_root_and_constant_paths():
    root = translate(parse_bcq("q(x,y) :- [] R+(x,y,_)"), SAMPLES_SCHEMA).render()
    assert "E(" not in root and "V(0," in root and "'+'" in root
    chain = translate(parse_bcq("q(x) :- [2.1] R+(x,_,_)"), SAMPLES_SCHEMA).render()
    assert "E(0,2,z1), E(z1,1,z2), V(z2," in chain


def test_translate_is_deterministic():
    q = parse_bcq(EX17)
    assert translate(q, SAMPLES_SCHEMA) == translate(q, SAMPLES_SCHEMA)


def test_translate_checks_schema():
    with pytest.raises(SchemaError):
        translate(parse_bcq("q(x) :- [] R+(x)"), SAMPLES_SCHEMA)
    with pytest.raises(SchemaError):
        translate(parse_bcq("q(x) :- [] Nope+(x)"), SAMPLES_SCHEMA)


def test_q3_on_running_example(running_db):
    assert query(running_db, Q3).rows == {(BOB,)}


def test_q2_style_disagreement(running_db):
    got = query(running_db, "q(y,a,b) :- [1] Sightings+(k,w,a,d,l), [y] Sightings+(k,w2,b,d2,l2), a != b")
    assert got.rows == {(BOB, "crow", "raven")}


def test_benchmark_queries_on_running_example(running_db):
    store = materialize(running_db)
    qs = benchmark_queries((ALICE, BOB))
    assert query(store, qs["q1_0"]).rows == {("s1", "bald eagle")}
    assert query(store, qs["q1_1"]).rows == {("s1", "bald eagle"), ("s2", "crow")}
    assert query(store, qs["q3"]).rows == {(BOB,)}


def test_deep_path_resolves_through_back_edges(running_db):
    got = query(running_db, "q(x) :- [3.2.3.1] Sightings+(x,_,'crow',_,_)")
    assert got.rows == {("s2",)}


def test_empty_store_gives_empty_result():
    store = Store(SCHEMA, USERS)
    assert len(query(store, "q(x,y) :- [y] Sightings+(x,_,_,_,_)")) == 0


def test_set_semantics(running_db):
    got = query(running_db, "q(x) :- [y] Sightings+(x,_,_,_,_)")
    assert got.rows == {("s1",), ("s2",)}


def test_comparisons_are_typed():
    assert compare(1, "<", 2)
    assert not compare(1, "<", "2")
    assert not compare("1", "=", 1)
    assert compare("a", "!=", 1)


def test_negative_witnesses_kinds(running_db):
    store = materialize(running_db)
    bob = store.wid_of_path((BOB,))
    crow = ("s2", "Alice", "crow", "6-14-08", "Lake Placid")
    eagle = ("s1", "Carol", "bald eagle", "6-14-08", "Lake Forest")
    assert [k for k, _ in negative_witnesses(store, bob, "Sightings", crow)] == ["unstated"]
    assert [k for k, _ in negative_witnesses(store, bob, "Sightings", eagle)] == ["stated"]


def test_result_rendering(running_db):
    got = query(running_db, "q(x) :- [y] Sightings+(x,_,_,_,_)")
    assert got.to_csv() == "x\ns1\ns2\n"
    assert "(2 rows)" in got.to_table()


def test_matches_brute_force_on_random_queries():
    rng = random.Random(17)
    nonempty_negative = 0
    for db in corpus(80, seed=5, n_max=10):
        store = materialize(db)
        for _ in range(8):
            q = random_query(rng, db.m)
            expected = brute_force(db, q)
            assert evaluate(translate(q, db.schema), store).rows == expected, str(q)
            if expected and any(g.sign is NEG for g in q.subgoals):
                nonempty_negative += 1
    assert nonempty_negative >= 5


def test_negative_bindings_are_witnessed():
    for db in corpus(30, seed=9):
        store = materialize(db)
        g = Subgoal((Var("p"),), "R", NEG, (Var("x"), Var("y")))
        q = Bcq((Var("p"), Var("x"), Var("y")), (Subgoal((), "R", POS, (Var("x"), Var("y"))), g))
        for p, x, y in query(store, q).rows:
            wid = store.follow(0, (p,))
            assert negative_witnesses(store, wid, "R", (x, y))
