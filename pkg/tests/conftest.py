import itertools
import random

import pytest
from hypothesis import strategies as st

from beliefdb import NEG, POS, BeliefDatabase, Schema, db_consistent, stmt, tup
from beliefdb import sample
from beliefdb.core import is_valid_path

SCHEMA = Schema.of(R=["k", "v"], Q=["k", "v:int"])


def rand_tuple(rng):
    if rng.random() < 0.5:
        return tup("R", rng.choice("ab"), rng.choice("xyz"))
    return tup("Q", rng.choice("ab"), rng.randint(0, 2))


def rand_path(rng, m, max_depth):
    d = rng.randint(0, max_depth)
    p = []
    while len(p) < d:
        u = rng.randint(1, m)
        if not p or p[-1] != u:
            p.append(u)
    return tuple(p)


def random_db(rng, m=3, n=8, max_depth=2):
    """A consistent database with up to ``n`` statements, built greedily."""
    users = {i: f"u{i}" for i in range(1, m + 1)}
    if m == 1:
        max_depth = min(max_depth, 1)
    chosen = set()
    for _ in range(20 * n + 10):
        if len(chosen) >= n:
            break
        sign = POS if rng.random() < 0.65 else NEG
        c = stmt(rand_path(rng, m, max_depth), rand_tuple(rng), sign)
        if db_consistent(BeliefDatabase(SCHEMA, users, chosen | {c})):
            chosen.add(c)
    return BeliefDatabase(SCHEMA, users, chosen)


def corpus(count, seed=0, m_max=3, n_max=8, max_depth=2):
    rng = random.Random(seed)
    for _ in range(count):
        m = rng.randint(1, m_max)
        yield random_db(rng, m, rng.randint(0, n_max), max_depth)


def valid_paths(users, max_depth):
    for d in range(max_depth + 1):
        for p in itertools.product(sorted(users), repeat=d):
            if is_valid_path(p, users):
                yield p


def probe_statements(db, max_depth=3):
    """Every signed statement over the db's tuple pool up to ``max_depth``."""
    pool = sorted({s.tuple for s in db.statements}, key=lambda t: t.sort_key())
    for p in valid_paths(db.users, max_depth):
        for t in pool:
            for s in (POS, NEG):
                yield stmt(p, t, s)


@st.composite
def databases(draw, m_max=3, n_max=8, max_depth=2):
    seed = draw(st.integers(0, 2**32 - 1))
    m = draw(st.integers(1, m_max))
    n = draw(st.integers(0, n_max))
    return random_db(random.Random(seed), m, n, max_depth)


@pytest.fixture
def running_db():
    return sample.database()


# ----- reference query evaluation -----

def brute_force(db, q):
    """Answers of ``q`` by enumerating valuations and checking each subgoal
    with the closure oracle; only for tiny inputs."""
    from beliefdb.oracle import closure_levels, world_at
    from beliefdb.query import Const, compare
    from beliefdb.core import world_entails

    depth = max((len(g.path) for g in q.subgoals), default=0)
    levels = closure_levels(db, depth)
    pool = {s.tuple for s in db.statements}
    consts = [t.value for g in q.subgoals for t in g.args if isinstance(t, Const)]
    values = sorted({v for t in pool for v in t.values} | set(consts), key=lambda v: (isinstance(v, str), v))
    users = sorted(db.users)
    path_vars = sorted(q.path_variables() | set(q.user_vars))
    other = sorted(q.variables() - set(path_vars))

    def val(t, th):
        return t.value if isinstance(t, Const) else th[t.name]

    out = set()
    for pu in itertools.product(users, repeat=len(path_vars)):
        for ov in itertools.product(values, repeat=len(other)):
            th = dict(zip(path_vars, pu)) | dict(zip(other, ov))
            ok = True
            for g in q.subgoals:
                path = tuple(val(t, th) for t in g.path)
                if not is_valid_path(path, db.users):
                    ok = False
                    break
                t = tup(g.relation, *(val(a, th) for a in g.args))
                try:
                    db.schema.check_tuple(t)
                except Exception:
                    ok = False
                    break
                if not world_entails(world_at(levels[len(path)], path), t, g.sign):
                    ok = False
                    break
            if ok and all(compare(val(c.left, th), c.op, val(c.right, th)) for c in q.comparisons):
                out.add(tuple(th[v.name] for v in q.head))
    return out


def random_query(rng, m):
    """A small safe BCQ over SCHEMA: up to two subgoals, at most one negative."""
    from beliefdb.query import Bcq, Comparison, Const, Subgoal, Var, check_safety

    for _ in range(100):
        subgoals = []
        n_goals = rng.randint(1, 2)
        for i in range(n_goals):
            neg = i == n_goals - 1 and n_goals > 1 and rng.random() < 0.6
            rel = rng.choice(["R", "Q"])
            path = []
            for _ in range(rng.randint(0, 2)):
                path.append(Var(rng.choice("pq")) if rng.random() < 0.5 else Const(rng.randint(1, m)))
            k = rng.choice([Const("a"), Const("b"), Var("x"), Var("x")])
            if rel == "R":
                v = rng.choice([Const("x"), Var("y"), Var("z")])
            else:
                v = rng.choice([Const(1), Var("n"), Var("n")])
            if neg and rng.random() < 0.7:
                # negate the first subgoal's tuple somewhere else
                rel, (k, v) = subgoals[0].relation, subgoals[0].args
            subgoals.append(Subgoal(tuple(path), rel, NEG if neg else POS, (k, v)))
        q = Bcq((), tuple(subgoals))
        names = sorted(q.variables())
        if not names:
            continue
        head = tuple(Var(n) for n in rng.sample(names, rng.randint(1, len(names))))
        comps = ()
        if len(names) >= 2 and rng.random() < 0.3:
            a, b = rng.sample(names, 2)
            comps = (Comparison(Var(a), "!=", Var(b)),)
        q = Bcq(head, tuple(subgoals), comps)
        if check_safety(q):
            return q
    raise RuntimeError("no safe query drawn")
