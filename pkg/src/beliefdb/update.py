"""Incremental maintenance of a Store under inserts, deletes and new users.

Every world's content for a key is ``override(explicit rows, rows of its
suffix parent)``.  An insert or delete changes the explicit rows of one
world for one key, recomputes that key there and then walks the worlds
whose suffix chain passes through it, parents before children, stopping
in any subtree whose rows did not change.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .core import POS, GroundTuple, Path, Sign, check_path
from .errors import InvalidPathError, SchemaError
from .store import ROOT, Entries, Store, VWorld


@dataclass
class UpdateOutcome:
    success: bool
    created_worlds: list[int] = field(default_factory=list)
    touched_worlds: list[int] = field(default_factory=list)
    reason: str = ""

    def __bool__(self) -> bool:
        return self.success


def override_entries(explicit: Entries, parent: Entries) -> Entries:
    """Per-key override union on ``(tid, sign)`` entries."""
    if not explicit:
        return parent
    mine = dict(explicit)
    has_pos = any(s is POS for s in mine.values())
    out = list(explicit)
    for tid, s in parent:
        if tid in mine:
            continue
        if s is POS and has_pos:
            continue
        out.append((tid, s))
    return tuple(out)


def _explicit_entries(vw: VWorld, relation: str, key) -> Entries:
    return tuple(e for e in vw.entries(relation, key) if e[0] in vw.explicit)


def _parent_entries(store: Store, wid: int, relation: str, key) -> Entries:
    if wid == ROOT:
        return ()
    return store.val[store.suffix[wid]].entries(relation, key)


def _propagate(store: Store, start: int, relation: str, key) -> list[int]:
    """Recompute ``key`` in the worlds below ``start``; returns changed wids."""
    touched = []
    frontier = sorted(store.suffix_children(start))
    while frontier:
        nxt = []
        for z in frontier:
            vw = store.val[z]
            old = vw.entries(relation, key)
            new = override_entries(_explicit_entries(vw, relation, key),
                                   store.val[store.suffix[z]].entries(relation, key))
            if set(new) != set(old):
                vw.set_entries(relation, key, new)
                touched.append(z)
                nxt.extend(sorted(store.suffix_children(z)))
        frontier = nxt
    return touched


def dss_store(store: Store, path: Path) -> int:
    """World id of the deepest suffix of ``path`` that is a state."""
    path = tuple(path)
    for p in range(len(path) + 1):
        wid = store.wid_of_path(path[p:])
        if wid is not None:
            return wid
    return ROOT


def id_world(store: Store, path: Path) -> int:
    """World id of ``path``, creating the world (and its prefixes) if needed."""
    with store.lock:
        path = check_path(path, store.users)
        wid = store.wid_of_path(path)
        if wid is not None:
            return wid
        parent = id_world(store, path[:-1])
        d = len(path)
        last = path[-1]
        x = store.next_wid
        store.next_wid += 1
        store.register_world(x, path)
        store.edges[parent][last] = x
        store.edges[x] = {u: dss_store(store, path + (u,)) for u in store.users if u != last}
        # worlds ending in the parent's path now reach x with the last user
        for z in store.dependents(parent):
            target = store.edges[z].get(last)
            if target is None:
                continue
            td = store.depth[target]
            if td < d:
                store.edges[z][last] = x
            elif td == store.depth[z] + 1 and store.depth[store.suffix[target]] < d:
                # an existing deeper world whose deepest proper suffix is now x
                store.set_suffix(target, x)
        src = dss_store(store, path[1:])
        store.set_suffix(x, src)
        store.val[x] = store.val[src].inherit_copy()
        return x


def insert_tuple(store: Store, path: Path, t: GroundTuple, sign: Sign) -> UpdateOutcome:
    """Insert ``t^sign`` explicitly into the existing world of ``path``."""
    with store.lock:
        store.schema.check_tuple(t)
        y = store.wid_of_path(tuple(path))
        if y is None:
            raise InvalidPathError(f"no world for path {path!r}")
        vw = store.val[y]
        rel, key = t.relation, t.key
        tid = store.lookup_tid(t)
        entries = vw.entries(rel, key)
        explicit = _explicit_entries(vw, rel, key)
        if tid is not None and (tid, sign) in explicit:
            return UpdateOutcome(False, reason="already explicit")
        if sign is POS:
            if any(s is POS or e == tid for e, s in explicit):
                return UpdateOutcome(False, reason="conflicts with an explicit tuple")
        elif tid is not None and (tid, POS) in explicit:
            return UpdateOutcome(False, reason="conflicts with an explicit tuple")
        if tid is not None and (tid, sign) in entries:
            vw.explicit.add(tid)
            return UpdateOutcome(True, touched_worlds=[y])
        tid = store.intern(t)
        new = override_entries(explicit + ((tid, sign),), _parent_entries(store, y, rel, key))
        vw.set_entries(rel, key, new)
        vw.explicit.add(tid)
        return UpdateOutcome(True, touched_worlds=[y] + _propagate(store, y, rel, key))


def insert(store: Store, path: Path, t: GroundTuple, sign: Sign = POS) -> UpdateOutcome:
    """Create the world of ``path`` if needed, then insert ``t^sign``.

    Worlds created here are kept even when the insert itself is rejected.
    """
    with store.lock:
        path = check_path(path, store.users)
        store.schema.check_tuple(t)
        before = store.next_wid
        id_world(store, path)
        out = insert_tuple(store, path, t, sign)
        out.created_worlds = list(range(before, store.next_wid))
        return out


def delete_tuple(store: Store, path: Path, t: GroundTuple, sign: Sign) -> UpdateOutcome:
    """Remove the explicit statement ``t^sign`` at ``path`` and restore defaults."""
    with store.lock:
        store.schema.check_tuple(t)
        y = store.wid_of_path(tuple(path))
        tid = store.lookup_tid(t)
        if y is None or tid is None:
            return UpdateOutcome(False, reason="not explicit")
        vw = store.val[y]
        rel, key = t.relation, t.key
        if tid not in vw.explicit or (tid, sign) not in vw.entries(rel, key):
            return UpdateOutcome(False, reason="not explicit")
        vw.explicit.discard(tid)
        new = override_entries(_explicit_entries(vw, rel, key), _parent_entries(store, y, rel, key))
        vw.set_entries(rel, key, new)
        touched = [y] + _propagate(store, y, rel, key)
        if not any(e == tid for w in store.val.values() for e, _ in w.entries(rel, key)):
            store.drop_tid(rel, tid)
        return UpdateOutcome(True, touched_worlds=touched)


def add_user(store: Store, name: str, uid: int | None = None) -> int:
    """Register a user; every world gets a back edge to the root for it."""
    with store.lock:
        if name in store.users.values():
            raise SchemaError(f"user {name!r} already exists")
        if uid is None:
            uid = max(store.users, default=0) + 1
        elif uid in store.users or isinstance(uid, bool) or uid < 1:
            raise SchemaError(f"user id {uid} is taken or invalid")
        store.users[uid] = name
        store.users = dict(sorted(store.users.items()))
        for out in store.edges.values():
            out[uid] = ROOT
        return uid


def replay(store: Store, statements) -> list[UpdateOutcome]:
    """Insert each statement in order."""
    return [insert(store, s.path, s.tuple, s.sign) for s in statements]
