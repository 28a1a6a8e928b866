"""Canonical BeliefSQL text for syntax trees."""

from __future__ import annotations

from .ast import (
    AddUser,
    ColumnRef,
    Condition,
    CreateRelation,
    Delete,
    FromItem,
    Insert,
    Literal,
    Select,
    Statement,
    Target,
    Update,
    UserRef,
)


def literal(lit: Literal) -> str:
    if isinstance(lit.value, str):
        return "'" + lit.value.replace("'", "''") + "'"
    return str(lit.value)


def column(c: ColumnRef) -> str:
    return f"{c.alias}.{c.attribute}" if c.alias else c.attribute


def operand(o) -> str:
    return literal(o) if isinstance(o, Literal) else column(o)


def user(u: UserRef) -> str:
    return literal(Literal(u.name)) if u.name is not None else column(u.column)


def target(t: Target) -> str:
    parts = [f"BELIEF {user(u)}" for u in t.prefix]
    if t.negated:
        parts.append("not")
    parts.append(t.relation)
    return " ".join(parts)


def condition(c: Condition) -> str:
    return f"{operand(c.left)} {c.op} {operand(c.right)}"


def where(conds) -> str:
    if not conds:
        return ""
    return " where " + " and ".join(condition(c) for c in conds)


def from_item(f: FromItem) -> str:
    return target(f.target) + (f" as {f.alias}" if f.alias else "")


def to_sql(stmt: Statement) -> str:
    if isinstance(stmt, Select):
        return (
            "select " + ", ".join(column(c) for c in stmt.items)
            + " from " + ", ".join(from_item(f) for f in stmt.from_items)
            + where(stmt.where)
        )
    if isinstance(stmt, Insert):
        rows = ", ".join("(" + ", ".join(literal(v) for v in row) + ")" for row in stmt.rows)
        return f"insert into {target(stmt.target)} values {rows}"
    if isinstance(stmt, Delete):
        return f"delete from {target(stmt.target)}" + where(stmt.where)
    if isinstance(stmt, Update):
        sets = ", ".join(f"{a.attribute} = {literal(a.value)}" for a in stmt.assignments)
        return f"update {target(stmt.target)} set {sets}" + where(stmt.where)
    if isinstance(stmt, CreateRelation):
        attrs = ", ".join(f"{a} {d}" for a, d in stmt.attributes)
        return f"create relation {stmt.name}({attrs})"
    if isinstance(stmt, AddUser):
        return f"adduser {literal(Literal(stmt.name))}"
    raise TypeError(f"not a statement: {stmt!r}")
