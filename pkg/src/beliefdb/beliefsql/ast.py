"""Syntax tree of BeliefSQL statements.

Spans are excluded from equality so a printed and reparsed statement
compares equal to the original.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

from ..core import Value


@dataclass(frozen=True)
class SourceSpan:
    start: int
    end: int
    line: int
    column: int

    def __post_init__(self):
        if self.start > self.end:
            raise ValueError("span start must not exceed its end")


def _span():
    return field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Literal:
    value: Value
    span: SourceSpan | None = _span()


@dataclass(frozen=True)
class ColumnRef:
    alias: str | None
    attribute: str
    span: SourceSpan | None = _span()


Operand = Union[Literal, ColumnRef]


@dataclass(frozen=True)
class UserRef:
    """A user in a belief prefix: a quoted name or a Users column."""

    name: str | None = None
    column: ColumnRef | None = None
    span: SourceSpan | None = _span()


@dataclass(frozen=True)
class Target:
    """``(BELIEF user)+ not? relation``; an empty prefix means the root."""

    prefix: tuple[UserRef, ...]
    negated: bool
    relation: str
    span: SourceSpan | None = _span()


@dataclass(frozen=True)
class FromItem:
    target: Target
    alias: str | None = None
    span: SourceSpan | None = _span()

    @property
    def name(self) -> str:
        return self.alias or self.target.relation


@dataclass(frozen=True)
class Condition:
    left: Operand
    op: str
    right: Operand
    span: SourceSpan | None = _span()


@dataclass(frozen=True)
class Select:
    items: tuple[ColumnRef, ...]
    from_items: tuple[FromItem, ...]
    where: tuple[Condition, ...] = ()
    span: SourceSpan | None = _span()


@dataclass(frozen=True)
class Insert:
    target: Target
    rows: tuple[tuple[Literal, ...], ...]
    span: SourceSpan | None = _span()


@dataclass(frozen=True)
class Delete:
    target: Target
    where: tuple[Condition, ...] = ()
    span: SourceSpan | None = _span()


@dataclass(frozen=True)
class Assignment:
    attribute: str
    value: Literal
    span: SourceSpan | None = _span()


@dataclass(frozen=True)
class Update:
    target: Target
    assignments: tuple[Assignment, ...]
    where: tuple[Condition, ...] = ()
    span: SourceSpan | None = _span()


@dataclass(frozen=True)
class CreateRelation:
    """Extension statement: ``create relation R(a str, b int)``."""

    name: str
    attributes: tuple[tuple[str, str], ...]
    span: SourceSpan | None = _span()


@dataclass(frozen=True)
class AddUser:
    """Extension statement: ``adduser 'name'``."""

    name: str
    span: SourceSpan | None = _span()


Statement = Union[Select, Insert, Delete, Update, CreateRelation, AddUser]
