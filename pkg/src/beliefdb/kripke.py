"""Canonical Kripke structure of a belief database.

States are the prefix closure of all annotated belief paths (plus the
root ``ε``).  The ``i``-edge of a state ``w`` leads to the deepest state
that is a suffix of ``w·i``; because every edge relation is a function,
evaluating ``□_w φ`` reduces to walking ``w`` from the root.

Entailed worlds are built bottom-up by depth: the world of ``v`` is its
explicit world overridden onto the world of the deepest state suffix of
``v`` minus its first user.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping
from dataclasses import dataclass

from .core import (
    EPSILON,
    BeliefDatabase,
    BeliefStatement,
    BeliefWorld,
    Path,
    check_path,
    db_consistent,
    explicit_world,
    format_path,
    override_union,
    world_entails,
)
from .errors import InconsistentError


def support_states(db: BeliefDatabase) -> set[Path]:
    return db.support()


def states(db: BeliefDatabase) -> set[Path]:
    """Prefix closure of the support states; always contains ``ε``."""
    out = {EPSILON}
    for p in db.support():
        for i in range(1, len(p) + 1):
            out.add(p[:i])
    return out


def dss(path: Path, state_set: Iterable[Path] | set[Path]) -> Path:
    """Longest suffix of ``path`` that is a state."""
    if not isinstance(state_set, (set, frozenset)):
        state_set = set(state_set)
    for i in range(len(path) + 1):
        suffix = path[i:]
        if suffix in state_set:
            return suffix
    raise ValueError("state set must contain ε")


def path_sort_key(p: Path):
    return (len(p), p)


@dataclass(frozen=True)
class CanonicalKripke:
    users: tuple[int, ...]
    states: frozenset[Path]
    worlds: Mapping[Path, BeliefWorld]
    edges: Mapping[tuple[Path, int], Path]
    root: Path = EPSILON

    def successor(self, state: Path, user: int) -> Path:
        return self.edges[(state, user)]

    def ordered_states(self) -> list[Path]:
        return sorted(self.states, key=path_sort_key)

    def describe(self, names: Mapping[int, str] | None = None) -> str:
        """Debug dump of states, worlds and edges."""
        lines = []
        for v in self.ordered_states():
            w = self.worlds[v]
            lines.append(
                f"{format_path(v, names)}: +{sorted(w.positive, key=lambda t: t.sort_key())} "
                f"-{sorted(w.negative, key=lambda t: t.sort_key())}"
            )
            for u in self.users:
                if (v, u) in self.edges:
                    lines.append(f"  --{u}--> {format_path(self.edges[(v, u)], names)}")
        return "\n".join(lines)


def build_canonical(db: BeliefDatabase) -> CanonicalKripke:
    if not db_consistent(db):
        raise InconsistentError("belief database is inconsistent")
    users = tuple(sorted(db.users))
    st = states(db)
    edges: dict[tuple[Path, int], Path] = {}
    for w in st:
        for i in users:
            if w and w[-1] == i:
                continue
            edges[(w, i)] = dss(w + (i,), st)
    worlds: dict[Path, BeliefWorld] = {}
    for v in sorted(st, key=path_sort_key):
        explicit = explicit_world(db, v)
        if not v:
            worlds[v] = explicit
        else:
            worlds[v] = override_union(explicit, worlds[dss(v[1:], st)])
    return CanonicalKripke(users, frozenset(st), worlds, edges)


def resolve_path(k: CanonicalKripke, path: Path) -> Path:
    """State reached from the root by following ``path``'s edges."""
    state = k.root
    for u in check_path(path, k.users):
        state = k.edges[(state, u)]
    return state


def kripke_eval(k: CanonicalKripke, statement: BeliefStatement) -> bool:
    state = resolve_path(k, statement.path)
    return world_entails(k.worlds[state], statement.tuple, statement.sign)
