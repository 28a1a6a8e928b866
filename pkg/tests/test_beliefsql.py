import pytest

from beliefdb import POS, SqlError, parse_bcq
from beliefdb.bench import SCHEMA as BENCH_SCHEMA, benchmark_queries, benchmark_sql, users_for
from beliefdb.beliefsql import (
    ColumnRef,
    Insert,
    InsertOp,
    Literal,
    Select,
    lower_dml,
    lower_select,
    parse,
    parse_script,
    to_sql,
    tokenize,
)
from beliefdb.sample import (
    ALICE,
    BOB,
    INSERT_SCRIPT,
    Q1,
    Q2,
    Q_DISAGREE,
    SAMPLES_SCHEMA,
    SCHEMA,
    SCRIPT,
    STATEMENTS,
    USERS,
    c2_1,
    s2_2,
)


def test_tokens_carry_positions():
    toks = tokenize("select\n  x -- note\nfrom 'it''s'")
    assert [t.kind for t in toks] == ["kw", "ident", "kw", "str", "eof"]
    x = toks[1]
    assert (x.span.line, x.span.column, x.span.start) == (2, 3, 9)
    assert toks[3].text == "'it''s'"
    assert toks[3].span.end - toks[3].span.start == 7


def test_unterminated_string():
    with pytest.raises(SqlError, match="unterminated"):
        tokenize("select 'abc")


def test_parse_q1():
    stmt = parse(Q1)
    assert isinstance(stmt, Select)
    assert [f.name for f in stmt.from_items] == ["U", "S"]
    assert stmt.from_items[1].target.prefix[0].column == ColumnRef("U", "uid")
    assert len(stmt.where) == 2


def test_parse_negated_insert():
    i2 = parse_script(INSERT_SCRIPT)[1]
    assert isinstance(i2, Insert)
    assert i2.target.negated
    assert [u.name for u in i2.target.prefix] == ["Bob"]
    assert len(i2.rows[0]) == 5


def test_parse_disagreement_query_with_loose_commas():
    stmt = parse(Q_DISAGREE)
    assert [f.name for f in stmt.from_items] == ["U1", "U2", "R1", "R2"]
    assert stmt.from_items[3].target.negated


def test_select_from_error_position():
    with pytest.raises(SqlError) as info:
        parse("select from R")
    err = info.value
    assert err.span.start == 7
    assert (err.span.line, err.span.column) == (1, 8)


def test_errors_name_what_was_expected():
    with pytest.raises(SqlError, match="expected"):
        parse("insert into R values ('a'")
    with pytest.raises(SqlError):
        parse("select R.a from not R")  # not without BELIEF
    with pytest.raises(SqlError):
        parse("select R.a from BELIEF 'x' not BELIEF 'y' R")


def test_round_trip_through_printer():
    for stmt in parse_script(SCRIPT + Q1 + ";" + Q2 + ";" + Q_DISAGREE):
        assert parse(to_sql(stmt)) == stmt


def test_update_and_delete_parse():
    stmt = parse("update BELIEF 'Bob' Sightings set species = 'crow' where sid = 's2'")
    assert stmt.assignments[0].attribute == "species"
    stmt = parse("delete from BELIEF 'Bob' not Sightings where species <> 'crow'")
    assert stmt.target.negated and stmt.where[0].op == "<>"


def test_lower_disagreement_query():
    q = lower_select(parse(Q_DISAGREE), SAMPLES_SCHEMA, {1: "a", 2: "b"})
    assert q.equivalent(parse_bcq("q(x,y,z) :- [y] R+(x,u,v), [z] R-(x,u,v)"))
    assert q.name_columns == {1, 2}
    assert q.labels == ("R1.sample", "U1.name", "U2.name")


def test_lower_q2():
    q = lower_select(parse(Q2), SCHEMA, USERS)
    assert q.equivalent(parse_bcq(
        "q(y,a,b) :- [1] Sightings+(k,w,a,d,l), [y] Sightings+(k,w2,b,d2,l2), a != b"
    ))


def test_lower_q1_keeps_constant_in_head():
    q = lower_select(parse(Q1), SCHEMA, USERS)
    assert q.subgoals[0].path[0].value == BOB
    assert "S_location" not in str(q)


def test_lower_root_select():
    q = lower_select(parse("select S.sid from Sightings as S"), SCHEMA, USERS)
    assert len(q.subgoals) == 1
    assert q.subgoals[0].path == () and q.subgoals[0].sign is POS


def test_lower_rejects_bad_references():
    for text in (
        "select S.nope from Sightings as S",
        "select S.sid from Missing as S",
        "select X.sid from Sightings as S",
        "select S.sid from BELIEF 'Nobody' Sightings as S",
        "select sid from Sightings as S, Comments as C",
        "select S.sid from Sightings as S, BELIEF S.sid Comments as C",
    ):
        with pytest.raises(SqlError):
            lower_select(parse(text), SCHEMA, USERS)


def test_lower_rejects_unsafe_select():
    text = "select S.sid from Users as U, BELIEF 'Bob' not Sightings as S"
    with pytest.raises(SqlError, match="unsafe"):
        lower_select(parse(text), SCHEMA, USERS)


def test_lower_inserts():
    ops = [op for s in parse_script(INSERT_SCRIPT) for op in lower_dml(s, SCHEMA, USERS)]
    assert [(op.path, op.tuple, op.sign) for op in ops] == [(s.path, s.tuple, s.sign) for s in STATEMENTS]
    assert ops[5] == InsertOp((BOB,), s2_2, POS)
    assert ops[6] == InsertOp((BOB, ALICE), c2_1, POS)


def test_insert_arity_and_types():
    with pytest.raises(SqlError, match="expects 5 values"):
        lower_dml(parse("insert into Sightings values ('a','b','c','d')"), SCHEMA, USERS)
    with pytest.raises(SqlError, match="expects"):
        lower_dml(parse("insert into Comments values ('a', 3, 'b')"), SCHEMA, USERS)


def test_insert_rejects_repeated_user():
    with pytest.raises(SqlError, match="repeat"):
        lower_dml(parse("insert into BELIEF 'Bob' BELIEF 'Bob' Comments values ('a','b','c')"), SCHEMA, USERS)


def test_benchmark_queries_as_sql():
    structured = benchmark_queries((1, 2))
    for name, text in benchmark_sql().items():
        q = lower_select(parse(text), BENCH_SCHEMA, users_for(3))
        assert q.equivalent(structured[name]), name


def test_negative_literals():
    stmt = parse("select R.a from R where R.b > -3")
    assert stmt.where[0].right == Literal(-3)
