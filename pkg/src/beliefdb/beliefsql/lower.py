"""Lowering of BeliefSQL syntax trees to BCQs and update operations.

``Users`` is a built-in relation with attributes ``uid`` and ``name``.
Each Users alias becomes one variable whose values are user ids; a
``name`` column is that same variable shown as a user name.  Column
equalities merge variables, column-literal equalities turn into
constants, and every other comparison becomes an arithmetic predicate.
"""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass

from ..core import NEG, POS, GroundTuple, Path, RelationDef, Schema, Sign, Value
from ..errors import SchemaError, SqlError
from ..query import Bcq, Comparison, Const, Subgoal, Var, check_safety, validate
from .ast import (
    ColumnRef,
    Condition,
    Delete,
    FromItem,
    Insert,
    Literal,
    Select,
    SourceSpan,
    Target,
    Update,
)

USERS = "Users"
USER_ATTRS = ("uid", "name")


def _uid(users: Mapping[int, str], name: str, span: SourceSpan | None) -> int:
    for u, n in users.items():
        if n == name:
            return u
    raise SqlError(f"unknown user {name!r}", span)


class _UnionFind:
    def __init__(self):
        self.parent: dict = {}

    def add(self, x):
        self.parent.setdefault(x, x)

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra


@dataclass
class _Column:
    key: tuple  # ('U', alias) for users, (alias, attribute) for content
    is_user: bool
    is_name: bool
    domain: str  # 'int' for uids


def lower_select(ast: Select, schema: Schema, users: Mapping[int, str]) -> Bcq:
    """Translate a select statement into a safe BCQ."""
    items: dict[str, FromItem] = {}
    rels: dict[str, RelationDef] = {}
    for f in ast.from_items:
        if f.name in items:
            raise SqlError(f"duplicate alias {f.name!r}", f.span)
        items[f.name] = f
        if f.target.relation == USERS:
            if f.target.prefix:
                raise SqlError("Users cannot carry a belief prefix", f.target.span)
        else:
            try:
                rels[f.name] = schema.relation(f.target.relation)
            except SchemaError as e:
                raise SqlError(str(e), f.target.span) from None

    uf = _UnionFind()
    order: list[tuple] = []

    def add(key):
        if key not in uf.parent:
            uf.add(key)
            order.append(key)

    for name, f in items.items():
        if name in rels:
            for a in rels[name].attribute_names:
                add((name, a))
        else:
            add(("U", name))

    def resolve(c: ColumnRef) -> _Column:
        if c.alias is None:
            owners = [n for n, r in rels.items() if c.attribute in r.attribute_names]
            owners += [n for n in items if n not in rels and c.attribute in USER_ATTRS]
            if not owners:
                raise SqlError(f"unknown column {c.attribute!r}", c.span)
            if len(owners) > 1:
                raise SqlError(f"ambiguous column {c.attribute!r}", c.span)
            alias = owners[0]
        else:
            alias = c.alias
            if alias not in items:
                raise SqlError(f"unknown alias {alias!r}", c.span)
        if alias in rels:
            rel = rels[alias]
            if c.attribute not in rel.attribute_names:
                raise SqlError(f"{rel.name} has no attribute {c.attribute!r}", c.span)
            return _Column((alias, c.attribute), False, False, rel.domains[rel.index_of(c.attribute)])
        if c.attribute not in USER_ATTRS:
            raise SqlError(f"Users has no attribute {c.attribute!r}", c.span)
        return _Column(("U", alias), True, c.attribute == "name", "int")

    def literal_for(col: _Column, lit: Literal, op: str, span) -> Value:
        if col.is_name:
            if not isinstance(lit.value, str):
                raise SqlError("user names are strings", lit.span)
            if op not in ("=", "<>", "!="):
                raise SqlError("user names only support = and <>", span)
            return _uid(users, lit.value, lit.span)
        return lit.value

    consts: dict[tuple, list[Value]] = {}
    deferred: list[tuple[Condition, object, object]] = []
    for cond in ast.where:
        left = resolve(cond.left) if isinstance(cond.left, ColumnRef) else cond.left
        right = resolve(cond.right) if isinstance(cond.right, ColumnRef) else cond.right
        if isinstance(left, Literal) and isinstance(right, _Column):
            left, right = right, left
            cond = Condition(cond.right, _flip(cond.op), cond.left, cond.span)
        if isinstance(left, _Column) and isinstance(right, _Column):
            if left.is_name != right.is_name and (left.is_name or right.is_name):
                raise SqlError("user names can only be compared with literals or other names", cond.span)
            if cond.op == "=":
                uf.union(left.key, right.key)
                continue
        elif isinstance(left, _Column) and cond.op == "=":
            consts.setdefault(left.key, []).append(literal_for(left, right, "=", cond.span))
            continue
        deferred.append((cond, left, right))

    const_of: dict[tuple, Value] = {}
    comparisons: list[Comparison] = []
    for key, values in consts.items():
        root = uf.find(key)
        for v in values:
            if root not in const_of:
                const_of[root] = v
            elif const_of[root] != v or type(const_of[root]) is not type(v):
                comparisons.append(Comparison(Const(const_of[root]), "=", Const(v)))

    def var_name(root) -> str:
        return root[1] if root[0] == "U" else f"{root[0]}_{root[1]}"

    head_roots = set()
    head: list[Var] = []
    name_columns = set()
    for pos, c in enumerate(ast.items):
        col = resolve(c)
        root = uf.find(col.key)
        head_roots.add(root)
        head.append(Var(var_name(root)))
        if col.is_name:
            name_columns.add(pos)

    def term(key, keep_var: bool = False):
        root = uf.find(key)
        if root in const_of and not (keep_var and root in head_roots):
            return Const(const_of[root])
        return Var(var_name(root))

    subgoals = []
    for name, f in items.items():
        if name not in rels:
            continue
        path = []
        for u in f.target.prefix:
            if u.name is not None:
                path.append(Const(_uid(users, u.name, u.span)))
            else:
                col = resolve(u.column)
                if not col.is_user:
                    raise SqlError("BELIEF columns must refer to a Users alias", u.span)
                path.append(term(col.key))
        sign = NEG if f.target.negated else POS
        args = tuple(term((name, a), keep_var=sign is POS) for a in rels[name].attribute_names)
        subgoals.append(Subgoal(tuple(path), f.target.relation, sign, args))

    user_vars = set()
    for name in items:
        if name not in rels:
            root = uf.find(("U", name))
            if root not in const_of or root in head_roots:
                user_vars.add(var_name(root))
    for root in head_roots:
        if root in const_of:
            comparisons.append(Comparison(Var(var_name(root)), "=", Const(const_of[root])))

    for cond, left, right in deferred:
        def operand(x, other):
            if isinstance(x, _Column):
                return term(x.key)
            if isinstance(other, _Column):
                return Const(literal_for(other, x, cond.op, cond.span))
            return Const(x.value)
        comparisons.append(Comparison(operand(left, right), cond.op, operand(right, left)))

    labels = tuple(f"{c.alias}.{c.attribute}" if c.alias else c.attribute for c in ast.items)
    q = Bcq(tuple(head), tuple(subgoals), tuple(comparisons), "q",
            frozenset(user_vars), frozenset(name_columns), labels)
    try:
        validate(q, schema)
    except SchemaError as e:
        raise SqlError(str(e), ast.span) from None
    if not check_safety(q):
        raise SqlError(f"unsafe query: {q}", ast.span)
    return q


def _flip(op: str) -> str:
    return {"<": ">", ">": "<", "<=": ">=", ">=": "<="}.get(op, op)


# ----- data manipulation -----

@dataclass(frozen=True)
class InsertOp:
    path: Path
    tuple: GroundTuple
    sign: Sign


@dataclass(frozen=True)
class RowFilter:
    """Conjunction of comparisons over one tuple; operands are ``('col', i)`` or ``('lit', v)``."""

    conditions: tuple[tuple[tuple, str, tuple], ...] = ()

    def matches(self, values) -> bool:
        from ..query import compare

        def val(x):
            return values[x[1]] if x[0] == "col" else x[1]

        return all(compare(val(a), op, val(b)) for a, op, b in self.conditions)


@dataclass(frozen=True)
class DeleteOp:
    path: Path
    relation: str
    sign: Sign
    filter: RowFilter


@dataclass(frozen=True)
class UpdateOp:
    path: Path
    relation: str
    sign: Sign
    filter: RowFilter
    assignments: tuple[tuple[int, Value], ...]


def _target_path(t: Target, users: Mapping[int, str]) -> Path:
    path = []
    for u in t.prefix:
        if u.name is None:
            raise SqlError("data manipulation needs user names, not columns, in BELIEF", u.span)
        path.append(_uid(users, u.name, u.span))
    for a, b in zip(path, path[1:]):
        if a == b:
            raise SqlError("a belief path cannot repeat a user consecutively", t.span)
    return tuple(path)


def _relation(t: Target, schema: Schema) -> RelationDef:
    if t.relation == USERS:
        raise SqlError("Users cannot be modified with data statements; use adduser", t.span)
    try:
        return schema.relation(t.relation)
    except SchemaError as e:
        raise SqlError(str(e), t.span) from None


def _typed(rel: RelationDef, index: int, lit: Literal) -> Value:
    attr, dom = rel.attributes[index]
    ok = isinstance(lit.value, int) if dom == "int" else isinstance(lit.value, str)
    if not ok:
        raise SqlError(f"{rel.name}.{attr} expects {dom}, got {lit.value!r}", lit.span)
    return lit.value


def _filter(conds, rel: RelationDef) -> RowFilter:
    out = []
    for c in conds:
        def operand(o):
            if isinstance(o, Literal):
                return ("lit", o.value)
            if o.alias is not None and o.alias != rel.name:
                raise SqlError("conditions may only refer to the target relation", o.span)
            if o.attribute not in rel.attribute_names:
                raise SqlError(f"{rel.name} has no attribute {o.attribute!r}", o.span)
            return ("col", rel.index_of(o.attribute))
        op = {"<>": "!="}.get(c.op, c.op)
        out.append((operand(c.left), op, operand(c.right)))
    return RowFilter(tuple(out))


def lower_dml(ast, schema: Schema, users: Mapping[int, str]):
    """Operations for an insert, delete or update statement."""
    t = ast.target
    rel = _relation(t, schema)
    path = _target_path(t, users)
    sign = NEG if t.negated else POS
    if isinstance(ast, Insert):
        ops = []
        for row in ast.rows:
            if len(row) != rel.arity:
                span = row[0].span if row else ast.span
                raise SqlError(f"{rel.name} expects {rel.arity} values, got {len(row)}", span)
            vals = tuple(_typed(rel, i, lit) for i, lit in enumerate(row))
            ops.append(InsertOp(path, GroundTuple(rel.name, vals), sign))
        return ops
    if isinstance(ast, Delete):
        return [DeleteOp(path, rel.name, sign, _filter(ast.where, rel))]
    if isinstance(ast, Update):
        assigns = []
        for a in ast.assignments:
            if a.attribute not in rel.attribute_names:
                raise SqlError(f"{rel.name} has no attribute {a.attribute!r}", a.span)
            i = rel.index_of(a.attribute)
            assigns.append((i, _typed(rel, i, a.value)))
        return [UpdateOp(path, rel.name, sign, _filter(ast.where, rel), tuple(assigns))]
    raise TypeError(f"not a data statement: {ast!r}")
