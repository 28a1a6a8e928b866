"""Relational internal representation of a belief database.

The store keeps the six relation families of the canonical Kripke
structure:

* ``R*_i(tid, key, att2..)``  one global dictionary of tuples per relation
* ``V_i(wid, tid, key, s, e)`` signed tuples of each world, explicit or not
* ``E(wid1, uid, wid2)``       per-user accessibility edges
* ``D(wid, d)``                nesting depth of each world
* ``S(wid1, wid2)``            deepest suffix state of each non-root world
* ``U(uid, name)``             registered users

V rows are held per world and indexed by ``(relation, key)`` so conflict
checks during updates touch one key at a time.  Each index entry is an
immutable tuple of ``(tid, sign)`` pairs, which lets a new world share
its parent's entries instead of copying them.

Two derived indexes live next to the relations and are rebuilt on load:
the belief path of every world and the inverse of ``S``.
"""

from __future__ import annotations

import io
import threading
from collections import defaultdict
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass
from typing import TextIO

from .core import (
    EPSILON,
    POS,
    BeliefDatabase,
    BeliefWorld,
    GroundTuple,
    Path,
    RelationDef,
    Schema,
    Sign,
    Value,
    world_consistent,
)
from .errors import InconsistentError, SchemaError, StoreFormatError
from .kripke import CanonicalKripke, build_canonical, dss, path_sort_key

ROOT = 0
FORMAT_TAG = "#beliefdb 1"

Entries = tuple[tuple[int, Sign], ...]


class VWorld:
    """The V rows of one world."""

    __slots__ = ("rows", "explicit")

    def __init__(self, rows: dict[str, dict[Value, Entries]] | None = None,
                 explicit: set[int] | None = None):
        self.rows = rows if rows is not None else {}
        self.explicit = explicit if explicit is not None else set()

    def entries(self, relation: str, key: Value) -> Entries:
        return self.rows[relation].get(key, ())

    def set_entries(self, relation: str, key: Value, entries: Entries) -> None:
        if entries:
            self.rows[relation][key] = entries
        else:
            self.rows[relation].pop(key, None)

    def count(self) -> int:
        return sum(len(e) for keyed in self.rows.values() for e in keyed.values())

    def inherit_copy(self) -> VWorld:
        return VWorld({rel: dict(keyed) for rel, keyed in self.rows.items()}, set())


@dataclass
class SizeReport:
    m: int
    N: int
    counts: dict[str, int]
    total: int
    n: int | None = None

    @property
    def overhead(self) -> float | None:
        if not self.n:
            return None
        return self.total / self.n

    def __str__(self) -> str:
        parts = [f"m={self.m}", f"N={self.N}"]
        parts += [f"|{k}|={v}" for k, v in self.counts.items()]
        parts.append(f"total={self.total}")
        if self.n:
            parts.append(f"n={self.n}")
            parts.append(f"overhead={self.overhead:.4g}")
        return " ".join(parts)


class Store:
    def __init__(self, schema: Schema | None = None, users: Mapping[int, str] | None = None):
        self.schema = schema or Schema()
        self.users: dict[int, str] = dict(sorted((users or {}).items()))
        if len(set(self.users.values())) != len(self.users):
            raise SchemaError("user names must be unique")
        self.rstar: dict[str, dict[int, tuple[Value, ...]]] = {r: {} for r in self.schema.names}
        self.val: dict[int, VWorld] = {ROOT: VWorld({r: {} for r in self.schema.names})}
        self.edges: dict[int, dict[int, int]] = {ROOT: {u: ROOT for u in self.users}}
        self.depth: dict[int, int] = {ROOT: 0}
        self.suffix: dict[int, int] = {}
        self.next_wid = 1
        self.next_tid = 1
        self.lock = threading.RLock()
        self._tid_of: dict[tuple[str, tuple[Value, ...]], int] = {}
        self._path: dict[int, Path] = {ROOT: EPSILON}
        self._wid_of: dict[Path, int] = {EPSILON: ROOT}
        self._children: dict[int, set[int]] = defaultdict(set)

    # ----- basic accessors -----

    @property
    def m(self) -> int:
        return len(self.users)

    @property
    def wids(self) -> list[int]:
        return sorted(self.depth)

    def uid(self, name: str) -> int:
        for u, nm in self.users.items():
            if nm == name:
                return u
        raise KeyError(f"unknown user {name!r}")

    def path_of(self, wid: int) -> Path:
        return self._path[wid]

    def wid_of_path(self, path: Path) -> int | None:
        """World id whose belief path is exactly ``path``, if it exists."""
        return self._wid_of.get(tuple(path))

    def follow(self, start: int, path: Iterable[int]) -> int | None:
        """Walk ``E`` from ``start`` along ``path``; None if an edge is missing."""
        wid = start
        for u in path:
            wid = self.edges[wid].get(u)
            if wid is None:
                return None
        return wid

    def tuple_of(self, relation: str, tid: int) -> GroundTuple:
        return GroundTuple(relation, self.rstar[relation][tid])

    def suffix_children(self, wid: int) -> set[int]:
        return self._children.get(wid, set())

    def dependents(self, wid: int) -> list[int]:
        """Worlds whose suffix chain passes through ``wid``, parents first."""
        out = []
        frontier = sorted(self.suffix_children(wid))
        while frontier:
            nxt = []
            for z in frontier:
                out.append(z)
                nxt.extend(sorted(self.suffix_children(z)))
            frontier = nxt
        return out

    def world(self, wid: int) -> BeliefWorld:
        pos, neg = set(), set()
        for rel, keyed in self.val[wid].rows.items():
            for entries in keyed.values():
                for tid, s in entries:
                    (pos if s is POS else neg).add(self.tuple_of(rel, tid))
        return BeliefWorld(frozenset(pos), frozenset(neg))

    def explicit_world(self, wid: int) -> BeliefWorld:
        vw = self.val[wid]
        pos, neg = set(), set()
        for rel, keyed in vw.rows.items():
            for entries in keyed.values():
                for tid, s in entries:
                    if tid in vw.explicit:
                        (pos if s is POS else neg).add(self.tuple_of(rel, tid))
        return BeliefWorld(frozenset(pos), frozenset(neg))

    # ----- relation views -----

    def rstar_rows(self, relation: str) -> list[tuple]:
        return [(tid,) + vals for tid, vals in sorted(self.rstar[relation].items())]

    def v_rows(self, relation: str) -> list[tuple]:
        rows = []
        for wid in self.wids:
            vw = self.val[wid]
            for key, entries in vw.rows[relation].items():
                for tid, s in entries:
                    rows.append((wid, tid, key, s.value, "y" if tid in vw.explicit else "n"))
        rows.sort(key=lambda r: (r[0], r[1]))
        return rows

    def e_rows(self) -> list[tuple[int, int, int]]:
        return sorted((w, u, t) for w, out in self.edges.items() for u, t in out.items())

    def d_rows(self) -> list[tuple[int, int]]:
        return sorted(self.depth.items())

    def s_rows(self) -> list[tuple[int, int]]:
        return sorted(self.suffix.items())

    def u_rows(self) -> list[tuple[int, str]]:
        return sorted(self.users.items())

    def relations(self) -> Iterator[tuple[str, list[tuple]]]:
        """All internal relations as ``(section name, rows)``."""
        yield "U", self.u_rows()
        for rel in self.schema.names:
            yield f"{rel}*", self.rstar_rows(rel)
            yield f"{rel}_V", self.v_rows(rel)
        yield "E", self.e_rows()
        yield "D", self.d_rows()
        yield "S", self.s_rows()

    def __eq__(self, other):
        if not isinstance(other, Store):
            return NotImplemented
        return (
            self.schema == other.schema
            and self.next_wid == other.next_wid
            and self.next_tid == other.next_tid
            and dict(self.relations()) == dict(other.relations())
        )

    __hash__ = None

    # ----- mutation helpers used by the update engine -----

    def add_relation(self, rel: RelationDef) -> None:
        with self.lock:
            self.schema = self.schema.with_relation(rel)
            self.rstar[rel.name] = {}
            for vw in self.val.values():
                vw.rows[rel.name] = {}

    def intern(self, t: GroundTuple) -> int:
        """Existing or new tid for ``t``."""
        k = (t.relation, t.values)
        tid = self._tid_of.get(k)
        if tid is None:
            tid = self.next_tid
            self.next_tid += 1
            self.rstar[t.relation][tid] = t.values
            self._tid_of[k] = tid
        return tid

    def lookup_tid(self, t: GroundTuple) -> int | None:
        return self._tid_of.get((t.relation, t.values))

    def drop_tid(self, relation: str, tid: int) -> None:
        vals = self.rstar[relation].pop(tid)
        del self._tid_of[(relation, vals)]

    def register_world(self, wid: int, path: Path) -> None:
        self.depth[wid] = len(path)
        self._path[wid] = path
        self._wid_of[path] = wid

    def set_suffix(self, wid: int, target: int) -> None:
        old = self.suffix.get(wid)
        if old is not None:
            self._children[old].discard(wid)
        self.suffix[wid] = target
        self._children[target].add(wid)

    # ----- derived indexes -----

    def rebuild_indexes(self) -> None:
        self._tid_of = {
            (rel, vals): tid for rel, tids in self.rstar.items() for tid, vals in tids.items()
        }
        self._children = defaultdict(set)
        for w, s in self.suffix.items():
            self._children[s].add(w)
        self._path = {ROOT: EPSILON}
        for wid in sorted(self.depth, key=lambda w: self.depth[w]):
            if wid not in self._path:
                continue
            for u, target in self.edges[wid].items():
                if self.depth[target] == self.depth[wid] + 1:
                    if target in self._path:
                        raise StoreFormatError(f"world {target} has two forward edges")
                    self._path[target] = self._path[wid] + (u,)
        self._wid_of = {p: w for w, p in self._path.items()}
        missing = set(self.depth) - set(self._path)
        if missing:
            raise StoreFormatError(f"worlds unreachable by forward edges: {sorted(missing)}")

    # ----- reading back -----

    def to_kripke(self) -> CanonicalKripke:
        users = tuple(sorted(self.users))
        worlds = {self._path[w]: self.world(w) for w in self.depth}
        edges = {
            (self._path[w], u): self._path[t] for w, out in self.edges.items() for u, t in out.items()
        }
        return CanonicalKripke(users, frozenset(worlds), worlds, edges)

    def canonical(self) -> dict:
        """Store contents with world and tuple ids replaced by paths and values."""
        p = self._path
        worlds = {}
        for wid, vw in self.val.items():
            rows = set()
            for rel, keyed in vw.rows.items():
                for entries in keyed.values():
                    for tid, s in entries:
                        rows.add((rel, self.rstar[rel][tid], s.value, tid in vw.explicit))
            worlds[p[wid]] = frozenset(rows)
        return {
            "schema": self.schema,
            "users": tuple(self.u_rows()),
            "rstar": {rel: frozenset(tids.values()) for rel, tids in self.rstar.items()},
            "rstar_sizes": {rel: len(tids) for rel, tids in self.rstar.items()},
            "worlds": worlds,
            "depth": frozenset((p[w], d) for w, d in self.depth.items()),
            "edges": frozenset((p[w], u, p[t]) for w, out in self.edges.items() for u, t in out.items()),
            "suffix": frozenset((p[w], p[s]) for w, s in self.suffix.items()),
        }

    def copy(self) -> Store:
        other = Store(self.schema, self.users)
        other.rstar = {rel: dict(t) for rel, t in self.rstar.items()}
        other.val = {
            w: VWorld({rel: dict(k) for rel, k in vw.rows.items()}, set(vw.explicit))
            for w, vw in self.val.items()
        }
        other.edges = {w: dict(out) for w, out in self.edges.items()}
        other.depth = dict(self.depth)
        other.suffix = dict(self.suffix)
        other.next_wid = self.next_wid
        other.next_tid = self.next_tid
        other.rebuild_indexes()
        return other


def empty_store(schema: Schema, users: Mapping[int, str]) -> Store:
    return Store(schema, users)


def materialize(db: BeliefDatabase) -> Store:
    """Batch-build the store of a consistent belief database.

    World ids follow ``(depth, path)`` order with 0 for the root; tuple ids
    are assigned on first appearance while scanning worlds in that order.
    """
    k = build_canonical(db)
    store = Store(db.schema, db.users)
    order = sorted(k.states, key=path_sort_key)
    wid = {p: i for i, p in enumerate(order)}
    store.val = {}
    for p in order:
        w = wid[p]
        store.depth[w] = len(p)
        store.edges[w] = {u: wid[k.edges[(p, u)]] for u in k.users if (p, u) in k.edges}
        if p:
            store.set_suffix(w, wid[dss(p[1:], k.states)])
        vw = VWorld({r: {} for r in db.schema.names})
        explicit = db._by_path.get(p)
        signed = sorted(k.worlds[p].signed(), key=lambda ts: (ts[0].sort_key(), ts[1].value))
        for t, s in signed:
            tid = store.intern(t)
            keyed = vw.rows[t.relation]
            keyed[t.key] = keyed.get(t.key, ()) + ((tid, s),)
            if explicit is not None and t in (explicit.positive if s is POS else explicit.negative):
                vw.explicit.add(tid)
        store.val[w] = vw
        store._path[w] = p
        store._wid_of[p] = w
    store.next_wid = len(order)
    return store


# ----- statistics -----

def stats(store: Store, n: int | None = None) -> SizeReport:
    counts: dict[str, int] = {"U": store.m}
    for rel in store.schema.names:
        counts[f"{rel}*"] = len(store.rstar[rel])
    for rel in store.schema.names:
        counts[f"{rel}_V"] = sum(
            len(e) for vw in store.val.values() for e in vw.rows[rel].values()
        )
    counts["E"] = sum(len(out) for out in store.edges.values())
    counts["D"] = len(store.depth)
    counts["S"] = len(store.suffix)
    return SizeReport(store.m, len(store.depth), counts, sum(counts.values()), n)


# ----- integrity -----

def check_integrity(store: Store) -> None:
    """Raise StoreFormatError if any structural invariant is violated."""
    users = set(store.users)
    if store.depth.get(ROOT) != 0:
        raise StoreFormatError("world 0 must exist with depth 0")
    if set(store.edges) != set(store.depth) or set(store.val) != set(store.depth):
        raise StoreFormatError("E, V and D disagree on the set of worlds")
    if set(store.suffix) != set(store.depth) - {ROOT}:
        raise StoreFormatError("S must have exactly one row per non-root world")
    paths = store._path
    states = set(paths.values())
    wid_of = {p: w for w, p in paths.items()}
    for w, out in store.edges.items():
        p = paths[w]
        expected = users - ({p[-1]} if p else set())
        if set(out) != expected:
            raise StoreFormatError(f"world {w} has edges for users {sorted(out)}, expected {sorted(expected)}")
        for u, t in out.items():
            if t not in store.depth:
                raise StoreFormatError(f"edge ({w},{u}) points to unknown world {t}")
            if t != wid_of[dss(p + (u,), states)]:
                raise StoreFormatError(f"edge ({w},{u}) does not lead to the deepest suffix state")
    for w, s in store.suffix.items():
        if s != wid_of[dss(paths[w][1:], states)]:
            raise StoreFormatError(f"S row ({w},{s}) is not the deepest suffix state")
    if store.depth and max(store.depth) >= store.next_wid:
        raise StoreFormatError("wid counter is behind existing world ids")
    all_tids: dict[int, str] = {}
    for rel, tids in store.rstar.items():
        for tid in tids:
            if tid in all_tids:
                raise StoreFormatError(f"tid {tid} used in {all_tids[tid]}* and {rel}*")
            all_tids[tid] = rel
    if all_tids and max(all_tids) >= store.next_tid:
        raise StoreFormatError("tid counter is behind existing tuple ids")
    for w, vw in store.val.items():
        seen: set[int] = set()
        for rel, keyed in vw.rows.items():
            for key, entries in keyed.items():
                for tid, _ in entries:
                    if tid not in store.rstar[rel]:
                        raise StoreFormatError(f"dangling tid {tid} in {rel}_V world {w}")
                    if store.rstar[rel][tid][0] != key:
                        raise StoreFormatError(f"tid {tid} in {rel}_V world {w} has key {key!r}, R* says {store.rstar[rel][tid][0]!r}")
                    if tid in seen:
                        raise StoreFormatError(f"tid {tid} appears twice in world {w}")
                    seen.add(tid)
        if not vw.explicit <= seen:
            raise StoreFormatError(f"world {w} flags absent tuples as explicit")
        if not world_consistent(store.world(w)):
            raise InconsistentError(f"world {w} is inconsistent")


# ----- dump / load -----

_ESC = {"\\": "\\\\", "\t": "\\t", "\n": "\\n", "\r": "\\r"}
_UNESC = {"\\": "\\", "t": "\t", "n": "\n", "r": "\r"}


def _enc(v) -> str:
    if isinstance(v, int):
        return str(v)
    return "".join(_ESC.get(c, c) for c in v)


def _dec(text: str) -> str:
    if "\\" not in text:
        return text
    out, i = [], 0
    while i < len(text):
        c = text[i]
        if c == "\\":
            if i + 1 >= len(text) or text[i + 1] not in _UNESC:
                raise ValueError(f"bad escape in {text!r}")
            out.append(_UNESC[text[i + 1]])
            i += 2
        else:
            out.append(c)
            i += 1
    return "".join(out)


def dump(store: Store, sink: TextIO | None = None) -> str | None:
    """Write the store as sectioned TSV; returns the text when ``sink`` is None."""
    buf = sink if sink is not None else io.StringIO()
    buf.write(FORMAT_TAG + "\n")
    for rel in store.schema.relations:
        attrs = " ".join(f"{a}:{d}" for a, d in rel.attributes)
        buf.write(f"#relation {rel.name} {attrs}\n")
    buf.write(f"#counters wid={store.next_wid} tid={store.next_tid}\n")
    for name, rows in store.relations():
        buf.write(f"## {name}\n")
        for row in rows:
            buf.write("\t".join(_enc(v) for v in row) + "\n")
    if sink is None:
        return buf.getvalue()
    return None


def dumps(store: Store) -> str:
    return dump(store)


def load(source: TextIO | str) -> Store:
    """Parse a dump; reports the offending line for malformed input."""
    text = source if isinstance(source, str) else source.read()
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines or lines[0] != FORMAT_TAG:
        raise StoreFormatError(f"missing {FORMAT_TAG!r} header", 1)
    rels: list[RelationDef] = []
    counters: dict[str, int] = {}
    section: str | None = None
    rows: dict[str, list[tuple[int, list[str]]]] = defaultdict(list)
    for no, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        if line.startswith("## "):
            section = line[3:]
            if section in rows:
                raise StoreFormatError(f"duplicate section {section!r}", no)
            rows[section] = []
            continue
        if section is None:
            if line.startswith("#relation "):
                parts = line.split()[1:]
                try:
                    attrs = tuple(tuple(p.split(":", 1)) for p in parts[1:])
                    if any(len(a) != 2 for a in attrs):
                        raise SchemaError("attribute needs name:domain")
                    rels.append(RelationDef(parts[0], attrs))
                except (SchemaError, IndexError) as e:
                    raise StoreFormatError(f"bad relation declaration: {e}", no) from None
            elif line.startswith("#counters "):
                for part in line.split()[1:]:
                    k, _, v = part.partition("=")
                    try:
                        counters[k] = int(v)
                    except ValueError:
                        raise StoreFormatError(f"bad counter {part!r}", no) from None
            else:
                raise StoreFormatError(f"unexpected preamble line {line!r}", no)
            continue
        rows[section].append((no, line.split("\t")))
    try:
        schema = Schema(tuple(rels))
    except SchemaError as e:
        raise StoreFormatError(str(e)) from None
    if set(counters) != {"wid", "tid"}:
        raise StoreFormatError("counters line must declare wid and tid", 1)
    expected = {"U", "E", "D", "S"} | {f"{r}*" for r in schema.names} | {f"{r}_V" for r in schema.names}
    if set(rows) != expected:
        raise StoreFormatError(f"sections {sorted(rows)} do not match schema; expected {sorted(expected)}")

    def ints(no, cells, n):
        if len(cells) != n:
            raise StoreFormatError(f"expected {n} columns, got {len(cells)}", no)
        try:
            return [int(c) for c in cells]
        except ValueError:
            raise StoreFormatError(f"expected integers, got {cells}", no) from None

    def typed(no, cell, dom):
        try:
            return int(cell) if dom == "int" else _dec(cell)
        except ValueError as e:
            raise StoreFormatError(f"bad {dom} value {cell!r}: {e}", no) from None

    users = {}
    for no, cells in rows["U"]:
        if len(cells) != 2:
            raise StoreFormatError("U rows need uid and name", no)
        uid = ints(no, cells[:1], 1)[0]
        if uid in users:
            raise StoreFormatError(f"duplicate uid {uid}", no)
        users[uid] = _dec(cells[1])
    try:
        store = Store(schema, users)
    except SchemaError as e:
        raise StoreFormatError(str(e)) from None
    store.val = {}
    store.edges = {}
    store.depth = {}
    for no, cells in rows["D"]:
        w, d = ints(no, cells, 2)
        if w in store.depth:
            raise StoreFormatError(f"duplicate world {w} in D", no)
        store.depth[w] = d
        store.edges[w] = {}
        store.val[w] = VWorld({r: {} for r in schema.names})
    for no, cells in rows["E"]:
        w, u, t = ints(no, cells, 3)
        if w not in store.depth or t not in store.depth:
            raise StoreFormatError(f"edge ({w},{u},{t}) references an unknown world", no)
        if u not in users:
            raise StoreFormatError(f"edge ({w},{u},{t}) references unknown user {u}", no)
        if u in store.edges[w]:
            raise StoreFormatError(f"duplicate edge ({w},{u})", no)
        store.edges[w][u] = t
    for no, cells in rows["S"]:
        w, s = ints(no, cells, 2)
        if w not in store.depth or s not in store.depth:
            raise StoreFormatError(f"S row ({w},{s}) references an unknown world", no)
        if w in store.suffix:
            raise StoreFormatError(f"duplicate S row for world {w}", no)
        store.suffix[w] = s
    for rel in schema.relations:
        for no, cells in rows[f"{rel.name}*"]:
            if len(cells) != rel.arity + 1:
                raise StoreFormatError(f"{rel.name}* rows need {rel.arity + 1} columns", no)
            tid = ints(no, cells[:1], 1)[0]
            if tid in store.rstar[rel.name]:
                raise StoreFormatError(f"duplicate tid {tid} in {rel.name}*", no)
            store.rstar[rel.name][tid] = tuple(typed(no, c, d) for c, d in zip(cells[1:], rel.domains))
        key_dom = rel.domains[0]
        for no, cells in rows[f"{rel.name}_V"]:
            if len(cells) != 5:
                raise StoreFormatError(f"{rel.name}_V rows need 5 columns", no)
            w, tid = ints(no, cells[:2], 2)
            key = typed(no, cells[2], key_dom)
            try:
                sign = Sign.parse(cells[3])
            except ValueError:
                raise StoreFormatError(f"bad sign {cells[3]!r}", no) from None
            if cells[4] not in ("y", "n"):
                raise StoreFormatError(f"explicit flag must be y or n, got {cells[4]!r}", no)
            if w not in store.val:
                raise StoreFormatError(f"V row references unknown world {w}", no)
            if tid not in store.rstar[rel.name]:
                raise StoreFormatError(f"dangling tid {tid} in {rel.name}_V", no)
            if store.rstar[rel.name][tid][0] != key:
                raise StoreFormatError(f"key {key!r} of tid {tid} disagrees with {rel.name}*", no)
            vw = store.val[w]
            keyed = vw.rows[rel.name]
            if any(t == tid for t, _ in keyed.get(key, ())):
                raise StoreFormatError(f"duplicate V row for world {w}, tid {tid}", no)
            keyed[key] = keyed.get(key, ()) + ((tid, sign),)
            if cells[4] == "y":
                vw.explicit.add(tid)
    store.next_wid = counters["wid"]
    store.next_tid = counters["tid"]
    store.rebuild_indexes()
    try:
        check_integrity(store)
    except InconsistentError as e:
        raise StoreFormatError(str(e)) from None
    return store


def save(store: Store, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        dump(store, fh)


def open_store(path) -> Store:
    with open(path, encoding="utf-8") as fh:
        return load(fh)
