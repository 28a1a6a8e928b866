"""BeliefSQL: lexer, parser, printer and lowering."""

from .ast import (
    AddUser,
    Assignment,
    ColumnRef,
    Condition,
    CreateRelation,
    Delete,
    FromItem,
    Insert,
    Literal,
    Select,
    SourceSpan,
    Statement,
    Target,
    Update,
    UserRef,
)
from .lexer import Token, tokenize
from .lower import DeleteOp, InsertOp, RowFilter, UpdateOp, lower_dml, lower_select
from .parser import parse, parse_script
from .printer import to_sql

__all__ = [
    "AddUser", "Assignment", "ColumnRef", "Condition", "CreateRelation", "Delete",
    "DeleteOp", "FromItem", "Insert", "InsertOp", "Literal", "RowFilter", "Select",
    "SourceSpan", "Statement", "Target", "Token", "Update", "UpdateOp", "UserRef",
    "lower_dml", "lower_select", "parse", "parse_script", "to_sql", "tokenize",
]
