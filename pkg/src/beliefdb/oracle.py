"""Brute-force reference semantics by iterated default lifting.

``closure_step`` lifts every statement ``□_w t^s`` to ``□_{i·w} t^s`` for
each user ``i`` whenever the lifted statement is consistent with the
current level.  Entailment at path depth ``d`` needs ``d`` levels.  This
is exponential in depth and only meant to cross-check the Kripke engine
on small inputs.
"""

from __future__ import annotations

from collections import defaultdict
from collections.abc import Iterable
from dataclasses import dataclass

from .core import (
    NEG,
    POS,
    BeliefDatabase,
    BeliefStatement,
    BeliefWorld,
    Path,
    check_path,
    world_entails,
)
from .errors import InconsistentError


@dataclass(frozen=True)
class ClosureLevel:
    depth: int
    statements: frozenset[BeliefStatement]


def _worlds(statements: Iterable[BeliefStatement]) -> dict[Path, tuple[set, set]]:
    out: dict[Path, tuple[set, set]] = defaultdict(lambda: (set(), set()))
    for s in statements:
        out[s.path][0 if s.sign is POS else 1].add(s.tuple)
    return out


def _consistent_with(world: tuple[set, set], s: BeliefStatement) -> bool:
    pos, neg = world
    t = s.tuple
    if s.sign is POS:
        if t in neg:
            return False
        return not any(o.relation == t.relation and o.key == t.key and o != t for o in pos)
    return t not in pos


def _level_consistent(statements: Iterable[BeliefStatement]) -> bool:
    for pos, neg in _worlds(statements).values():
        if pos & neg:
            return False
        keys = [(t.relation, t.key) for t in pos]
        if len(keys) != len(set(keys)):
            return False
    return True


def closure_step(level: ClosureLevel, users: Iterable[int]) -> ClosureLevel:
    """Next level: add every consistent one-user lifting of a statement.

    Each candidate is checked against the fixed base level only; candidates
    landing in the same world all come from one (consistent) source world.
    """
    if not _level_consistent(level.statements):
        raise InconsistentError("closure level is inconsistent")
    users = sorted(users)
    base = _worlds(level.statements)
    added = set()
    for s in sorted(level.statements, key=BeliefStatement.sort_key):
        for i in users:
            if s.path and s.path[0] == i:
                continue
            cand = BeliefStatement((i,) + s.path, s.tuple, s.sign)
            if cand in level.statements:
                continue
            if _consistent_with(base.get(cand.path, (set(), set())), cand):
                added.add(cand)
    return ClosureLevel(level.depth + 1, level.statements | added)


def closure_levels(db: BeliefDatabase, depth: int) -> list[ClosureLevel]:
    """Levels ``0..depth`` of the lifting sequence."""
    if not _level_consistent(db.statements):
        raise InconsistentError("belief database is inconsistent")
    levels = [ClosureLevel(0, db.statements)]
    for _ in range(depth):
        levels.append(closure_step(levels[-1], db.users))
    return levels


def world_at(level: ClosureLevel, path: Path) -> BeliefWorld:
    pos = frozenset(s.tuple for s in level.statements if s.path == path and s.sign is POS)
    neg = frozenset(s.tuple for s in level.statements if s.path == path and s.sign is NEG)
    return BeliefWorld(pos, neg)


def oracle_entails(db: BeliefDatabase, statement: BeliefStatement) -> bool:
    """Whether ``db`` entails ``statement``.

    The world at the statement's path is read off level ``|path|`` and the
    sign is judged by single-world entailment, so unstated negatives (a
    different positive with the same key) count as entailed.
    """
    path = check_path(statement.path, db.users)
    level = closure_levels(db, len(path))[-1]
    return world_entails(world_at(level, path), statement.tuple, statement.sign)
