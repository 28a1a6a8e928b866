"""Belief databases: annotations about what users believe, stored and queried
through a canonical Kripke structure kept in ordinary relations."""

from .core import (
    EPSILON,
    NEG,
    POS,
    BeliefDatabase,
    BeliefStatement,
    BeliefWorld,
    GroundTuple,
    RelationDef,
    Schema,
    Sign,
    db_consistent,
    explicit_world,
    override_union,
    stmt,
    tup,
    world_consistent,
    world_entails,
)
from .errors import (
    BeliefDBError,
    InconsistentError,
    InvalidPathError,
    SchemaError,
    SqlError,
    StoreFormatError,
    UnsafeQueryError,
)
from .kripke import CanonicalKripke, build_canonical, dss, kripke_eval, resolve_path
from .oracle import closure_levels, oracle_entails
from .query import Bcq, Comparison, Const, Plan, ResultSet, Subgoal, Var, check_safety, evaluate, parse_bcq, query, translate
from .session import Session
from .store import SizeReport, Store, check_integrity, dump, dumps, load, materialize, open_store, save, stats
from .update import UpdateOutcome, add_user, delete_tuple, dss_store, id_world, insert, insert_tuple

__all__ = [
    "EPSILON",
    "NEG",
    "POS",
    "BeliefDatabase",
    "BeliefStatement",
    "BeliefWorld",
    "GroundTuple",
    "RelationDef",
    "Schema",
    "Sign",
    "db_consistent",
    "explicit_world",
    "override_union",
    "stmt",
    "tup",
    "world_consistent",
    "world_entails",
    "BeliefDBError",
    "InconsistentError",
    "InvalidPathError",
    "SchemaError",
    "SqlError",
    "StoreFormatError",
    "UnsafeQueryError",
    "CanonicalKripke",
    "build_canonical",
    "dss",
    "kripke_eval",
    "resolve_path",
    "closure_levels",
    "oracle_entails",
    "Bcq",
    "Comparison",
    "Const",
    "Plan",
    "ResultSet",
    "Subgoal",
    "Var",
    "check_safety",
    "evaluate",
    "parse_bcq",
    "query",
    "translate",
    "Session",
    "SizeReport",
    "Store",
    "check_integrity",
    "dump",
    "dumps",
    "load",
    "materialize",
    "open_store",
    "save",
    "stats",
    "UpdateOutcome",
    "add_user",
    "delete_tuple",
    "dss_store",
    "id_world",
    "insert",
    "insert_tuple",
]

__version__ = "0.1.0"
