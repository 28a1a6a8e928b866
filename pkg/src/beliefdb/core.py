"""Domain model: schemas, ground tuples, belief paths, belief worlds.

A belief world is a pair ``(I+, I-)`` of positive and negative instances.
Worlds are plain immutable values; the functions at the bottom of this
module implement consistency, single-world entailment and the override
union used to derive entailed worlds from explicit ones.
"""

from __future__ import annotations

import enum
from collections import defaultdict
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from functools import cached_property
from typing import Union

from .errors import InconsistentError, InvalidPathError, SchemaError

Value = Union[str, int]
Path = tuple[int, ...]

EPSILON: Path = ()

_DOMAINS = {"str": str, "int": int}


class Sign(enum.Enum):
    POS = "+"
    NEG = "-"

    def __str__(self) -> str:
        return "+" if self is Sign.POS else "−"

    def flip(self) -> Sign:
        return Sign.NEG if self is Sign.POS else Sign.POS

    @classmethod
    def parse(cls, text: str) -> Sign:
        if text == "+":
            return cls.POS
        if text in ("-", "−"):
            return cls.NEG
        raise ValueError(f"not a sign: {text!r}")


POS = Sign.POS
NEG = Sign.NEG


@dataclass(frozen=True)
class RelationDef:
    """A content relation; attribute 0 is the external key."""

    name: str
    attributes: tuple[tuple[str, str], ...]

    def __post_init__(self):
        if not self.attributes:
            raise SchemaError(f"relation {self.name} needs at least one attribute")
        names = [a for a, _ in self.attributes]
        if len(set(names)) != len(names):
            raise SchemaError(f"duplicate attribute name in {self.name}")
        for attr, dom in self.attributes:
            if dom not in _DOMAINS:
                raise SchemaError(f"{self.name}.{attr}: unknown domain {dom!r}")

    @property
    def arity(self) -> int:
        return len(self.attributes)

    @property
    def attribute_names(self) -> tuple[str, ...]:
        return tuple(a for a, _ in self.attributes)

    @property
    def domains(self) -> tuple[str, ...]:
        return tuple(d for _, d in self.attributes)

    def index_of(self, attribute: str) -> int:
        try:
            return self.attribute_names.index(attribute)
        except ValueError:
            raise SchemaError(f"relation {self.name} has no attribute {attribute!r}") from None


@dataclass(frozen=True)
class Schema:
    relations: tuple[RelationDef, ...] = ()

    def __post_init__(self):
        names = [r.name for r in self.relations]
        if len(set(names)) != len(names):
            raise SchemaError("relation names must be unique")

    @classmethod
    def of(cls, **relations: Sequence[str]) -> Schema:
        """Shorthand: ``Schema.of(R=["k", "v:int"])``; domain defaults to str."""
        defs = []
        for name, attrs in relations.items():
            pairs = []
            for a in attrs:
                attr, _, dom = a.partition(":")
                pairs.append((attr, dom or "str"))
            defs.append(RelationDef(name, tuple(pairs)))
        return cls(tuple(defs))

    def relation(self, name: str) -> RelationDef:
        for r in self.relations:
            if r.name == name:
                return r
        raise SchemaError(f"unknown relation {name!r}")

    def __contains__(self, name: str) -> bool:
        return any(r.name == name for r in self.relations)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(r.name for r in self.relations)

    def with_relation(self, rel: RelationDef) -> Schema:
        return Schema(self.relations + (rel,))

    def check_tuple(self, t: GroundTuple) -> None:
        rel = self.relation(t.relation)
        if len(t.values) != rel.arity:
            raise SchemaError(
                f"{t.relation} expects {rel.arity} values, got {len(t.values)}"
            )
        for (attr, dom), v in zip(rel.attributes, t.values):
            if isinstance(v, bool) or not isinstance(v, _DOMAINS[dom]):
                raise SchemaError(f"{t.relation}.{attr} expects {dom}, got {v!r}")


@dataclass(frozen=True)
class GroundTuple:
    relation: str
    values: tuple[Value, ...]

    @property
    def key(self) -> Value:
        return self.values[0]

    def sort_key(self):
        return (self.relation, _values_sort_key(self.values))

    def __repr__(self) -> str:
        return f"{self.relation}{self.values!r}"


def _values_sort_key(values: Iterable[Value]):
    return tuple((isinstance(v, str), v) for v in values)


def tup(relation: str, *values: Value) -> GroundTuple:
    return GroundTuple(relation, tuple(values))


def is_valid_path(users: Sequence[int], universe: Iterable[int]) -> bool:
    """True iff every id is in ``universe`` and no id repeats consecutively."""
    universe = set(universe)
    prev = None
    for u in users:
        if u not in universe or u == prev:
            return False
        prev = u
    return True


def check_path(path: Sequence[int], universe: Iterable[int]) -> Path:
    path = tuple(path)
    if not is_valid_path(path, universe):
        raise InvalidPathError(f"invalid belief path {format_path(path)}")
    return path


def format_path(path: Sequence[int], names: Mapping[int, str] | None = None) -> str:
    if not path:
        return "ε"
    return "·".join(names.get(u, str(u)) if names else str(u) for u in path)


@dataclass(frozen=True)
class BeliefStatement:
    """``□_path tuple^sign``."""

    path: Path
    tuple: GroundTuple
    sign: Sign

    def sort_key(self):
        return (len(self.path), self.path, self.tuple.sort_key(), self.sign.value)

    def __repr__(self) -> str:
        return f"□[{format_path(self.path)}] {self.tuple!r}{self.sign}"


def stmt(path: Sequence[int], t: GroundTuple, sign: Sign | str = POS) -> BeliefStatement:
    if isinstance(sign, str):
        sign = Sign.parse(sign)
    return BeliefStatement(tuple(path), t, sign)


@dataclass(frozen=True)
class BeliefWorld:
    positive: frozenset[GroundTuple] = frozenset()
    negative: frozenset[GroundTuple] = frozenset()

    @classmethod
    def of(cls, positive: Iterable[GroundTuple] = (), negative: Iterable[GroundTuple] = ()):
        return cls(frozenset(positive), frozenset(negative))

    def signed(self) -> set[tuple[GroundTuple, Sign]]:
        return {(t, POS) for t in self.positive} | {(t, NEG) for t in self.negative}

    def is_empty(self) -> bool:
        return not self.positive and not self.negative

    def __len__(self) -> int:
        return len(self.positive) + len(self.negative)


EMPTY_WORLD = BeliefWorld()


def world_consistent(w: BeliefWorld) -> bool:
    """Key constraint on ``I+`` and ``I+ ∩ I- = ∅``."""
    if w.positive & w.negative:
        return False
    seen = set()
    for t in w.positive:
        k = (t.relation, t.key)
        if k in seen:
            return False
        seen.add(k)
    return True


def _require_consistent(w: BeliefWorld, what: str = "belief world") -> None:
    if not world_consistent(w):
        raise InconsistentError(f"{what} is inconsistent")


def world_entails(w: BeliefWorld, t: GroundTuple, s: Sign) -> bool:
    """Certain (``+``) or impossible (``-``) tuple in a consistent world.

    A tuple is impossible when stated negative, or when another positive
    tuple of the same relation shares its key.
    """
    _require_consistent(w)
    if s is POS:
        return t in w.positive
    if t in w.negative:
        return True
    return any(
        o.relation == t.relation and o.key == t.key and o != t for o in w.positive
    )


def override_union(child: BeliefWorld, parent: BeliefWorld) -> BeliefWorld:
    """Child plus every parent tuple that does not clash with the child.

    A parent ``t+`` is dropped when the child holds ``t-`` or a positive
    with the same key; a parent ``t-`` is dropped when the child holds
    ``t+``.  Child tuples are kept verbatim.
    """
    _require_consistent(child, "child world")
    _require_consistent(parent, "parent world")
    child_keys = {(t.relation, t.key) for t in child.positive}
    pos = set(child.positive)
    neg = set(child.negative)
    for t in parent.positive:
        if t not in child.negative and (t.relation, t.key) not in child_keys:
            pos.add(t)
    for t in parent.negative:
        if t not in child.positive:
            neg.add(t)
    return BeliefWorld(frozenset(pos), frozenset(neg))


@dataclass(frozen=True)
class BeliefDatabase:
    """A set of belief statements over a schema and a set of users.

    ``users`` maps user id to display name.
    """

    schema: Schema
    users: Mapping[int, str]
    statements: frozenset[BeliefStatement] = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "users", dict(self.users))
        object.__setattr__(self, "statements", frozenset(self.statements))
        if len(set(self.users.values())) != len(self.users):
            raise SchemaError("user names must be unique")
        for s in self.statements:
            check_path(s.path, self.users)
            self.schema.check_tuple(s.tuple)

    @cached_property
    def _by_path(self) -> dict[Path, BeliefWorld]:
        pos: dict[Path, set] = defaultdict(set)
        neg: dict[Path, set] = defaultdict(set)
        for s in self.statements:
            (pos if s.sign is POS else neg)[s.path].add(s.tuple)
        return {
            p: BeliefWorld(frozenset(pos.get(p, ())), frozenset(neg.get(p, ())))
            for p in set(pos) | set(neg)
        }

    @property
    def m(self) -> int:
        return len(self.users)

    @property
    def n(self) -> int:
        return len(self.statements)

    def uid(self, name: str) -> int:
        for u, nm in self.users.items():
            if nm == name:
                return u
        raise InvalidPathError(f"unknown user {name!r}")

    def support(self) -> set[Path]:
        return set(self._by_path)

    def with_statements(self, statements: Iterable[BeliefStatement]) -> BeliefDatabase:
        return BeliefDatabase(self.schema, self.users, frozenset(statements))

    def sorted_statements(self) -> list[BeliefStatement]:
        return sorted(self.statements, key=BeliefStatement.sort_key)


def explicit_world(db: BeliefDatabase, path: Sequence[int]) -> BeliefWorld:
    path = check_path(path, db.users)
    return db._by_path.get(path, EMPTY_WORLD)


def db_consistent(db: BeliefDatabase) -> bool:
    return all(world_consistent(w) for w in db._by_path.values())
