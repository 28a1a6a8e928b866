"""Belief conjunctive queries: model, safety, translation and evaluation.

A BCQ is written ``q(x̄) :- □_{w̄1} R1^{s1}(x̄1), ..., arithmetic`` where
every ``w̄i`` is a pattern of user constants and variables.  ``translate``
produces a Plan with one temp table per subgoal (a walk along ``E`` from
the root into ``V`` joined with ``R*``) and one final condition per
subgoal.  A negative subgoal holds at a world when some row with the
same key is either a stated negative with equal remaining attributes or
a positive that differs in some remaining attribute.

``evaluate`` runs the plan as an index nested-loop join over a Store:
positive temp tables are scanned with already bound values pushed into
the walk and the key index, negative ones are probed by key once every
argument is bound.
"""

from __future__ import annotations

import csv
import io
import operator
import re
from collections.abc import Iterable, Iterator, Mapping, Sequence
from dataclasses import dataclass, field, replace
from typing import Union

from .core import NEG, POS, Schema, Sign, Value
from .errors import BeliefDBError, SchemaError, UnsafeQueryError
from .store import ROOT, Store


@dataclass(frozen=True)
class Var:
    name: str

    @property
    def anonymous(self) -> bool:
        return self.name.startswith("_")

    def __str__(self) -> str:
        return "_" if self.anonymous else self.name


@dataclass(frozen=True)
class Const:
    value: Value

    def __str__(self) -> str:
        return _literal(self.value)


Term = Union[Var, Const]


def _literal(v: Value) -> str:
    if isinstance(v, str):
        return "'" + v.replace("'", "''") + "'"
    return str(v)


def _term(x) -> Term:
    return x if isinstance(x, (Var, Const)) else Const(x)


def format_box(path: Sequence[Term]) -> str:
    if not path:
        return ""
    inner = "·".join(str(t) for t in path)
    return f"□_{inner} " if len(path) == 1 else f"□_{{{inner}}} "


@dataclass(frozen=True)
class Subgoal:
    path: tuple[Term, ...]
    relation: str
    sign: Sign
    args: tuple[Term, ...]

    def __post_init__(self):
        object.__setattr__(self, "path", tuple(_term(t) for t in self.path))
        object.__setattr__(self, "args", tuple(_term(t) for t in self.args))

    def variables(self) -> set[str]:
        return {t.name for t in self.path + self.args if isinstance(t, Var)}

    def __str__(self) -> str:
        args = ",".join(str(a) for a in self.args)
        return f"{format_box(self.path)}{self.relation}{self.sign}({args})"


_OPS = {
    "=": operator.eq,
    "!=": operator.ne,
    "<": operator.lt,
    ">": operator.gt,
    "<=": operator.le,
    ">=": operator.ge,
}
_OP_TEXT = {"=": "=", "!=": "≠", "<": "<", ">": ">", "<=": "≤", ">=": "≥"}
_OP_ALIASES = {"<>": "!=", "≠": "!=", "≤": "<=", "≥": ">=", "==": "="}


def compare(left: Value, op: str, right: Value) -> bool:
    """Typed comparison; ordering across str and int is simply false."""
    if op in ("=", "!="):
        same = type(left) is type(right) and left == right
        return same if op == "=" else not same
    if type(left) is not type(right):
        return False
    return _OPS[op](left, right)


@dataclass(frozen=True)
class Comparison:
    left: Term
    op: str
    right: Term

    def __post_init__(self):
        op = _OP_ALIASES.get(self.op, self.op)
        if op not in _OPS:
            raise SchemaError(f"unknown comparison operator {self.op!r}")
        object.__setattr__(self, "op", op)
        object.__setattr__(self, "left", _term(self.left))
        object.__setattr__(self, "right", _term(self.right))

    def variables(self) -> set[str]:
        return {t.name for t in (self.left, self.right) if isinstance(t, Var)}

    def __str__(self) -> str:
        return f"{self.left} {_OP_TEXT[self.op]} {self.right}"


@dataclass(frozen=True)
class Bcq:
    """A belief conjunctive query.

    ``user_vars`` are variables that range over registered users even
    when no path mentions them; ``name_columns`` are head positions shown
    as user names instead of ids.
    """

    head: tuple[Var, ...]
    subgoals: tuple[Subgoal, ...]
    comparisons: tuple[Comparison, ...] = ()
    name: str = "q"
    user_vars: frozenset[str] = frozenset()
    name_columns: frozenset[int] = frozenset()
    labels: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        object.__setattr__(self, "head", tuple(self.head))
        object.__setattr__(self, "labels", tuple(self.labels))
        if self.labels and len(self.labels) != len(self.head):
            raise SchemaError("one label per head variable")
        object.__setattr__(self, "subgoals", tuple(self.subgoals))
        object.__setattr__(self, "comparisons", tuple(self.comparisons))
        object.__setattr__(self, "user_vars", frozenset(self.user_vars))
        object.__setattr__(self, "name_columns", frozenset(self.name_columns))

    def variables(self) -> set[str]:
        out = {v.name for v in self.head} | set(self.user_vars)
        for g in self.subgoals:
            out |= g.variables()
        for c in self.comparisons:
            out |= c.variables()
        return out

    def path_variables(self) -> set[str]:
        return {t.name for g in self.subgoals for t in g.path if isinstance(t, Var)}

    def __str__(self) -> str:
        body = [str(g) for g in self.subgoals] + [str(c) for c in self.comparisons]
        head = ",".join(str(v) for v in self.head)
        return f"{self.name}({head}) :- " + ", ".join(body)

    def canonical(self) -> Bcq:
        """Alpha-renamed copy: variables become v0, v1, ... by first use."""
        names: dict[str, str] = {}

        def ren(t: Term) -> Term:
            if isinstance(t, Const):
                return t
            if t.name not in names:
                names[t.name] = f"v{len(names)}"
            return Var(names[t.name])

        head = tuple(ren(v) for v in self.head)
        subgoals = tuple(
            Subgoal(tuple(ren(t) for t in g.path), g.relation, g.sign, tuple(ren(t) for t in g.args))
            for g in self.subgoals
        )
        comps = tuple(Comparison(ren(c.left), c.op, ren(c.right)) for c in self.comparisons)
        uv = frozenset(ren(Var(v)).name for v in sorted(self.user_vars))
        return Bcq(head, subgoals, comps, "q", uv, self.name_columns)

    def equivalent(self, other: Bcq) -> bool:
        """Same query up to variable names and display of name columns.

        User variables that already occur in a path are redundant and do
        not count.
        """
        def core(q: Bcq) -> Bcq:
            q = replace(q, user_vars=q.user_vars - q.path_variables(), name_columns=frozenset())
            return q.canonical()

        return core(self) == core(other)


# ----- textual syntax -----

_TOKEN = re.compile(
    r"\s*(?:(?P<str>'(?:[^']|'')*')|(?P<int>-?\d+)|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op>:-|<=|>=|!=|<>|[(),\[\].·+\-−=<>≠≤≥□{}]))"
)


def _tokens(text: str) -> list[tuple[str, str]]:
    out, pos = [], 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise BeliefDBError(f"cannot parse query near {text[pos:pos + 15]!r}")
        kind = m.lastgroup
        out.append((kind, m.group(kind)))
        pos = m.end()
    return out


def parse_bcq(text: str) -> Bcq:
    """Parse ``q(x,y) :- [2.1] S+(x,_,y,_,_), □_z S-(x,'a'), x != 'b'``.

    Paths are written ``[u1.u2]`` or ``□_u`` / ``□_{u1·u2}``; variables are
    identifiers, ``_`` is anonymous, numbers in paths are user ids.
    """
    toks = _tokens(text)
    i = 0
    anon = 0

    def peek(k=0):
        return toks[i + k] if i + k < len(toks) else (None, None)

    def take(value=None):
        nonlocal i
        tok = peek()
        if tok[0] is None or (value is not None and tok[1] != value):
            raise BeliefDBError(f"expected {value or 'token'}, got {tok[1]!r}")
        i += 1
        return tok

    def term():
        nonlocal anon
        kind, val = take()
        if kind == "str":
            return Const(val[1:-1].replace("''", "'"))
        if kind == "int":
            return Const(int(val))
        if val == "_":
            anon += 1
            return Var(f"_{anon}")
        if kind == "ident":
            return Var(val)
        raise BeliefDBError(f"expected a term, got {val!r}")

    def path_items(closing):
        items = []
        if peek()[1] == closing:
            take(closing)
            return items
        while True:
            items.append(term())
            if peek()[1] in (".", "·"):
                take()
                continue
            take(closing)
            return items

    _, name = take()
    take("(")
    head = []
    if peek()[1] != ")":
        while True:
            t = term()
            if not isinstance(t, Var):
                raise BeliefDBError("head must list variables")
            head.append(t)
            if peek()[1] == ",":
                take(",")
                continue
            break
    take(")")
    take(":-")
    subgoals, comps = [], []
    while True:
        path: list[Term] = []
        if peek()[1] == "[":
            take("[")
            path = path_items("]")
        elif peek()[1] == "□":
            take("□")
            _, val = take()
            if val == "_" and peek()[1] == "{":
                take("{")
                path = path_items("}")
            elif val == "_":
                path = [term()]
            elif val.startswith("_"):
                rest = val[1:]
                path = [Const(int(rest)) if rest.isdigit() else Var(rest)]
            else:
                raise BeliefDBError("expected '_' after '□'")
        if peek()[0] == "ident" and peek(1)[1] in ("+", "-", "−"):
            rel = take()[1]
            sign = Sign.parse(take()[1])
            take("(")
            args = []
            if peek()[1] != ")":
                while True:
                    args.append(term())
                    if peek()[1] == ",":
                        take(",")
                        continue
                    break
            take(")")
            subgoals.append(Subgoal(tuple(path), rel, sign, tuple(args)))
        else:
            if path:
                raise BeliefDBError("a belief path must precede a relation")
            left = term()
            op = take()[1]
            right = term()
            comps.append(Comparison(left, op, right))
        if peek()[1] == ",":
            take(",")
            continue
        break
    if peek()[0] is not None:
        raise BeliefDBError(f"unexpected trailing input {peek()[1]!r}")
    return Bcq(tuple(head), tuple(subgoals), tuple(comps), name)


# ----- safety and validation -----

def check_safety(q: Bcq) -> bool:
    """Every variable occurs in some path or in a positive subgoal's arguments."""
    bound = set(q.user_vars)
    for g in q.subgoals:
        bound |= {t.name for t in g.path if isinstance(t, Var)}
        if g.sign is POS:
            bound |= {t.name for t in g.args if isinstance(t, Var)}
    return q.variables() <= bound


def validate(q: Bcq, schema: Schema | None = None) -> None:
    body = set(q.user_vars)
    for g in q.subgoals:
        body |= g.variables()
    for c in q.comparisons:
        body |= c.variables()
    for v in q.head:
        if v.name not in body:
            raise SchemaError(f"head variable {v} does not occur in the body")
    for g in q.subgoals:
        for t in g.path:
            if isinstance(t, Const) and (not isinstance(t.value, int) or isinstance(t.value, bool)):
                raise SchemaError(f"path constants must be user ids, got {t}")
        if schema is not None:
            rel = schema.relation(g.relation)
            if len(g.args) != rel.arity:
                raise SchemaError(f"{g.relation} expects {rel.arity} arguments, got {len(g.args)}")


# ----- plans -----

@dataclass(frozen=True)
class TempTable:
    """``T_i(w̄, x̄, s) :- E*(0, w̄, z), V(z, t, key, s, _), R*(t, _, rest)``."""

    index: int
    subgoal: Subgoal

    def columns(self) -> list[str]:
        g = self.subgoal
        cols = [str(t) for t in g.path]
        for j, a in enumerate(g.args):
            if g.sign is NEG and isinstance(a, Const):
                cols.append(f"c{j + 1}")
            else:
                cols.append(str(a))
        return cols + ["s"]

    def render(self) -> str:
        g = self.subgoal
        body = []
        z = "0"
        for k, t in enumerate(g.path, start=1):
            nz = f"z{k}"
            body.append(f"E({z},{t},{nz})")
            z = nz
        cols = self.columns()
        key = cols[len(g.path)]
        rest = cols[len(g.path) + 1:-1]
        body.append(f"V({z},t,{key},s,_)")
        body.append(f"R*(t,_{''.join(',' + c for c in rest)})")
        return f"T{self.index}({','.join(cols)}) :- " + ", ".join(body)


@dataclass(frozen=True)
class PositiveCondition:
    """``s_i = '+'`` plus equalities on every path and argument term."""

    index: int


@dataclass(frozen=True)
class NegativeCondition:
    index: int
    key: Term
    rest: tuple[Term, ...]

    def refs(self) -> list[str]:
        out = []
        for j, t in enumerate(self.rest, start=2):
            out.append(f"{t.name}{self.index}" if isinstance(t, Var) else f"c{j}_{self.index}")
        return out

    def render(self) -> str:
        s = f"s{self.index}"
        refs = self.refs()
        if not refs:
            return f"{s} = '−'"
        eq = " ∧ ".join(f"{r} = {t}" for r, t in zip(refs, self.rest))
        ne = " ∨ ".join(f"{r} ≠ {t}" for r, t in zip(refs, self.rest))
        if len(refs) > 1:
            ne = f"({ne})"
        return f"({s} = '−' ∧ {eq}) ∨ ({s} = '+' ∧ {ne})"


@dataclass(frozen=True)
class Plan:
    query: Bcq
    temp_tables: tuple[TempTable, ...]
    conditions: tuple[PositiveCondition | NegativeCondition, ...]
    order: tuple[int, ...] = field(default=())

    def final_rule(self) -> str:
        q = self.query
        parts = []
        for tt, cond in zip(self.temp_tables, self.conditions):
            g = tt.subgoal
            cols = [str(t) for t in g.path]
            if isinstance(cond, PositiveCondition):
                cols += [str(a) for a in g.args] + ["'+'"]
            else:
                cols += [str(cond.key)] + cond.refs() + [f"s{cond.index}"]
            parts.append(f"T{tt.index}({','.join(cols)})")
        parts += [c.render() for c in self.conditions if isinstance(c, NegativeCondition)]
        parts += [str(c) for c in q.comparisons]
        head = ",".join(str(v) for v in q.head)
        return f"Q({head}) :- " + ", ".join(parts)

    def render(self) -> str:
        return "\n".join([t.render() for t in self.temp_tables] + [self.final_rule()])


def _order(q: Bcq) -> tuple[int, ...]:
    """Positives first, most-bound next; negatives after all positives."""
    bound: set[str] = set()
    remaining = [i for i, g in enumerate(q.subgoals) if g.sign is POS]
    order = []
    while remaining:
        def score(i):
            g = q.subgoals[i]
            path_bound = all(isinstance(t, Const) or t.name in bound for t in g.path)
            key = g.args[0] if g.args else None
            key_bound = key is not None and (isinstance(key, Const) or key.name in bound)
            return (not path_bound, not key_bound, i)
        best = min(remaining, key=score)
        remaining.remove(best)
        order.append(best)
        bound |= q.subgoals[best].variables()
    order += [i for i, g in enumerate(q.subgoals) if g.sign is NEG]
    return tuple(order)


def translate(q: Bcq, schema: Schema | None = None) -> Plan:
    validate(q, schema)
    if not check_safety(q):
        raise UnsafeQueryError(f"unsafe query: {q}")
    tables, conds = [], []
    for i, g in enumerate(q.subgoals, start=1):
        tables.append(TempTable(i, g))
        if g.sign is POS:
            conds.append(PositiveCondition(i))
        else:
            conds.append(NegativeCondition(i, g.args[0], tuple(g.args[1:])))
    return Plan(q, tuple(tables), tuple(conds), _order(q))


# ----- results -----

@dataclass(frozen=True)
class ResultSet:
    columns: tuple[str, ...]
    rows: frozenset[tuple]

    def __len__(self) -> int:
        return len(self.rows)

    def __iter__(self) -> Iterator[tuple]:
        return iter(self.sorted())

    def __contains__(self, row) -> bool:
        return tuple(row) in self.rows

    def sorted(self) -> list[tuple]:
        return sorted(self.rows, key=lambda r: tuple((isinstance(v, str), v) for v in r))

    def to_table(self) -> str:
        rows = [[str(v) for v in r] for r in self.sorted()]
        widths = [len(c) for c in self.columns]
        for r in rows:
            widths = [max(w, len(v)) for w, v in zip(widths, r)]
        line = "+" + "+".join("-" * (w + 2) for w in widths) + "+"
        fmt = lambda cells: "| " + " | ".join(c.ljust(w) for c, w in zip(cells, widths)) + " |"
        out = [line, fmt(self.columns), line] + [fmt(r) for r in rows] + [line]
        out.append(f"({len(rows)} row{'s' if len(rows) != 1 else ''})")
        return "\n".join(out)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        w.writerows(self.sorted())
        return buf.getvalue()


# ----- evaluation -----

def _walk(store: Store, path: Sequence[Term], theta: dict) -> Iterator[tuple[dict, int]]:
    """Worlds reached by the path pattern, binding path variables on the way."""
    users = store.users

    def rec(k: int, wid: int, last: int | None, th: dict):
        if k == len(path):
            yield th, wid
            return
        t = path[k]
        if isinstance(t, Const) or t.name in th:
            u = t.value if isinstance(t, Const) else th[t.name]
            if u in users and u != last:
                yield from rec(k + 1, store.edges[wid][u], u, th)
            return
        for u in users:
            if u != last:
                th2 = dict(th)
                th2[t.name] = u
                yield from rec(k + 1, store.edges[wid][u], u, th2)

    yield from rec(0, ROOT, None, theta)


def _value(t: Term, theta: Mapping):
    return t.value if isinstance(t, Const) else theta[t.name]


def _match_positive(store: Store, g: Subgoal, theta: dict) -> Iterator[dict]:
    rstar = store.rstar[g.relation]
    key_t = g.args[0]
    for th, wid in _walk(store, g.path, theta):
        fixed = []
        free = []
        for j, a in enumerate(g.args):
            if isinstance(a, Const):
                fixed.append((j, a.value))
            elif a.name in th:
                fixed.append((j, th[a.name]))
            else:
                free.append((j, a.name))
        keyed = store.val[wid].rows[g.relation]
        if isinstance(key_t, Const) or key_t.name in th:
            groups: Iterable = (keyed.get(_value(key_t, th), ()),)
        else:
            groups = keyed.values()
        for entries in groups:
            for tid, s in entries:
                if s is not POS:
                    continue
                vals = rstar[tid]
                if not all(type(v) is type(vals[j]) and v == vals[j] for j, v in fixed):
                    continue
                out = dict(th)
                ok = True
                for j, name in free:
                    v = vals[j]
                    if name in out:
                        # the same variable twice in one subgoal
                        if not (type(out[name]) is type(v) and out[name] == v):
                            ok = False
                            break
                    else:
                        out[name] = v
                if ok:
                    yield out


def negative_witnesses(store: Store, wid: int, relation: str, values: tuple) -> list[tuple[str, int]]:
    """Rows of ``wid`` that make ``relation(values)`` impossible there.

    Each witness is ``('stated', tid)`` for an equal negative row or
    ``('unstated', tid)`` for a positive row sharing the key.
    """
    rstar = store.rstar[relation]
    out = []
    for tid, s in store.val[wid].rows[relation].get(values[0], ()):
        other = rstar[tid]
        if s is NEG and other == values:
            out.append(("stated", tid))
        elif s is POS and other != values:
            out.append(("unstated", tid))
    return out


def _match_negative(store: Store, g: Subgoal, theta: dict) -> Iterator[dict]:
    values = tuple(_value(a, theta) for a in g.args)
    for th, wid in _walk(store, g.path, theta):
        if negative_witnesses(store, wid, g.relation, values):
            yield th


def _check(comps: Sequence[Comparison], theta: Mapping) -> bool:
    return all(compare(_value(c.left, theta), c.op, _value(c.right, theta)) for c in comps)


def evaluate(plan: Plan, store: Store) -> ResultSet:
    q = plan.query
    with store.lock:
        for g in q.subgoals:
            if g.relation not in store.schema:
                raise SchemaError(f"unknown relation {g.relation!r}")
        validate(q, store.schema)
        steps = [q.subgoals[i] for i in plan.order]
        # comparisons are checked right after the step that binds their last variable
        seen: set[str] = set()
        pending = list(q.comparisons)
        checks: list[list[Comparison]] = []
        for g in steps:
            seen |= g.variables()
            ready = [c for c in pending if c.variables() <= seen]
            pending = [c for c in pending if c not in ready]
            checks.append(ready)
        free_users = sorted(set(q.user_vars) - seen)
        users = sorted(store.users)
        rows = set()

        def rec(k: int, theta: dict):
            if k == len(steps):
                yield from bind_users(0, theta)
                return
            g = steps[k]
            gen = _match_positive if g.sign is POS else _match_negative
            for th in gen(store, g, theta):
                if _check(checks[k], th):
                    yield from rec(k + 1, th)

        def bind_users(k: int, theta: dict):
            if k == len(free_users):
                if _check(pending, theta):
                    yield theta
                return
            for u in users:
                th = dict(theta)
                th[free_users[k]] = u
                yield from bind_users(k + 1, th)

        user_bound = [v for v in q.user_vars if v in seen]
        for theta in rec(0, {}):
            if any(theta[v] not in store.users for v in user_bound):
                continue
            rows.add(tuple(
                store.users.get(theta[v.name], theta[v.name]) if i in q.name_columns else theta[v.name]
                for i, v in enumerate(q.head)
            ))
    return ResultSet(q.labels or tuple(str(v) for v in q.head), frozenset(rows))


def query(target, q: Bcq | str) -> ResultSet:
    """Safety check, translate and evaluate against a Store or BeliefDatabase."""
    if isinstance(q, str):
        q = parse_bcq(q)
    if not isinstance(target, Store):
        from .store import materialize

        target = materialize(target)
    return evaluate(translate(q, target.schema), target)
