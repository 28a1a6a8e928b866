"""Executes BeliefSQL statements against a Store."""

from __future__ import annotations

from dataclasses import dataclass, field

from .beliefsql import (
    AddUser,
    CreateRelation,
    Delete,
    Insert,
    Select,
    Statement,
    Update,
    lower_dml,
    lower_select,
    parse_script,
)
from .beliefsql.lower import DeleteOp, InsertOp, UpdateOp
from .core import GroundTuple, RelationDef
from .errors import BeliefDBError, SchemaError, SqlError
from .query import ResultSet, evaluate, translate
from .store import ROOT, Store
from .update import UpdateOutcome, add_user, delete_tuple, insert


@dataclass
class StatementResult:
    statement: Statement
    kind: str
    rows: ResultSet | None = None
    outcomes: list[UpdateOutcome] = field(default_factory=list)

    @property
    def count(self) -> int:
        """Rows returned or statements that took effect."""
        if self.rows is not None:
            return len(self.rows)
        return sum(1 for o in self.outcomes if o.success)

    @property
    def rejected(self) -> int:
        return sum(1 for o in self.outcomes if not o.success)

    @property
    def mutates(self) -> bool:
        return self.kind != "select"

    def message(self) -> str:
        if self.kind == "select":
            return self.rows.to_table()
        if self.kind in ("create", "adduser"):
            return self.kind.upper()
        text = f"{self.kind.upper()} {self.count}"
        reasons = sorted({o.reason for o in self.outcomes if not o.success and o.reason})
        if self.rejected:
            text += f" ({self.rejected} rejected: {'; '.join(reasons)})"
        return text


class Session:
    def __init__(self, store: Store | None = None):
        self.store = store if store is not None else Store()

    def execute(self, text: str) -> list[StatementResult]:
        """Parse and run a script; stops at the first error."""
        return [self.run(s) for s in parse_script(text)]

    def query(self, text: str) -> ResultSet:
        results = self.execute(text)
        if len(results) != 1 or results[0].rows is None:
            raise SqlError("expected exactly one select statement")
        return results[0].rows

    def run(self, stmt: Statement) -> StatementResult:
        store = self.store
        with store.lock:
            if isinstance(stmt, Select):
                q = lower_select(stmt, store.schema, store.users)
                return StatementResult(stmt, "select", rows=evaluate(translate(q, store.schema), store))
            if isinstance(stmt, CreateRelation):
                try:
                    store.add_relation(RelationDef(stmt.name, stmt.attributes))
                except SchemaError as e:
                    raise SqlError(str(e), stmt.span) from None
                return StatementResult(stmt, "create")
            if isinstance(stmt, AddUser):
                try:
                    add_user(store, stmt.name)
                except SchemaError as e:
                    raise SqlError(str(e), stmt.span) from None
                return StatementResult(stmt, "adduser")
            ops = lower_dml(stmt, store.schema, store.users)
            outcomes = []
            try:
                for op in ops:
                    outcomes.extend(self._apply(op))
            except BeliefDBError as e:
                if isinstance(e, SqlError):
                    raise
                raise SqlError(str(e), stmt.span) from None
            kind = {Insert: "insert", Delete: "delete", Update: "update"}[type(stmt)]
            return StatementResult(stmt, kind, outcomes=outcomes)

    def _matches(self, path, relation, sign, flt, explicit_only: bool):
        store = self.store
        wid = store.follow(ROOT, path)
        exact = store.wid_of_path(path) == wid
        if wid is None or (explicit_only and not exact):
            return []
        vw = store.val[wid]
        out = []
        for entries in vw.rows[relation].values():
            for tid, s in entries:
                if s is not sign:
                    continue
                if explicit_only and tid not in vw.explicit:
                    continue
                vals = store.rstar[relation][tid]
                if flt.matches(vals):
                    out.append((GroundTuple(relation, vals), exact and tid in vw.explicit))
        return sorted(out, key=lambda x: x[0].sort_key())

    def _apply(self, op) -> list[UpdateOutcome]:
        store = self.store
        if isinstance(op, InsertOp):
            return [insert(store, op.path, op.tuple, op.sign)]
        if isinstance(op, DeleteOp):
            found = self._matches(op.path, op.relation, op.sign, op.filter, True)
            return [delete_tuple(store, op.path, t, op.sign) for t, _ in found]
        if isinstance(op, UpdateOp):
            found = self._matches(op.path, op.relation, op.sign, op.filter, False)
            out = []
            new_tuples = []
            for t, explicit in found:
                vals = list(t.values)
                for i, v in op.assignments:
                    vals[i] = v
                new_tuples.append(GroundTuple(op.relation, tuple(vals)))
                if explicit:
                    delete_tuple(store, op.path, t, op.sign)
            for nt in new_tuples:
                out.append(insert(store, op.path, nt, op.sign))
            return out
        raise TypeError(op)
