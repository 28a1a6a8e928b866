"""Recursive-descent parser for BeliefSQL.

Grammar (keywords case-insensitive)::

    select  := SELECT colref {, colref} FROM item {[,] item} [,] [WHERE conds]
    item    := target [[AS] ident]
    target  := [(BELIEF user)+ [NOT]] ident
    user    := 'name' | colref
    insert  := INSERT INTO target VALUES row {, row}
    delete  := DELETE FROM target [WHERE conds]
    update  := UPDATE target SET attr = literal {, attr = literal} [WHERE conds]
    conds   := operand op operand {AND operand op operand}
    create  := CREATE RELATION ident ( attr domain {, attr domain} )
    adduser := ADDUSER 'name'

Commas between from-items may be left out before a BELIEF prefix, and a
trailing comma before WHERE is accepted.
"""

from __future__ import annotations

from ..errors import SqlError
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

COMPARISON_OPS = ("=", "<>", "!=", "<", ">", "<=", ">=")
_STATEMENT_START = frozenset({"SELECT", "INSERT", "DELETE", "UPDATE", "CREATE", "ADDUSER"})


def _join(a: SourceSpan, b: SourceSpan) -> SourceSpan:
    return SourceSpan(a.start, b.end, a.line, a.column)


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    @property
    def prev(self) -> Token:
        return self.toks[self.i - 1]

    def at_kw(self, *words: str) -> bool:
        return self.tok.kind == "kw" and self.tok.value in words

    def at_op(self, *ops: str) -> bool:
        return self.tok.kind == "op" and self.tok.text in ops

    def fail(self, expected) -> SqlError:
        return SqlError(f"unexpected {self.tok.describe()}", self.tok.span, frozenset(expected))

    def advance(self) -> Token:
        t = self.tok
        self.i += 1
        return t

    def kw(self, word: str) -> Token:
        if not self.at_kw(word):
            raise self.fail({word.upper()})
        return self.advance()

    def op(self, text: str) -> Token:
        if not self.at_op(text):
            raise self.fail({repr(text)})
        return self.advance()

    def ident(self, what: str = "identifier") -> Token:
        if self.tok.kind != "ident":
            raise self.fail({what})
        return self.advance()

    # ----- pieces -----

    def literal(self) -> Literal:
        start = self.tok.span
        if self.tok.kind == "str":
            t = self.advance()
            return Literal(t.value, t.span)
        if self.at_op("-"):
            self.advance()
            if self.tok.kind != "int":
                raise self.fail({"integer"})
            t = self.advance()
            return Literal(-t.value, _join(start, t.span))
        if self.tok.kind == "int":
            t = self.advance()
            return Literal(t.value, t.span)
        raise self.fail({"string literal", "integer"})

    def colref(self) -> ColumnRef:
        first = self.ident("column")
        if self.at_op("."):
            self.advance()
            attr = self.ident("attribute")
            return ColumnRef(first.text, attr.text, _join(first.span, attr.span))
        return ColumnRef(None, first.text, first.span)

    def operand(self):
        if self.tok.kind == "ident":
            return self.colref()
        if self.tok.kind in ("str", "int") or self.at_op("-"):
            return self.literal()
        raise self.fail({"column", "string literal", "integer"})

    def conditions(self) -> tuple[Condition, ...]:
        out = [self.condition()]
        while self.at_kw("and"):
            self.advance()
            out.append(self.condition())
        return tuple(out)

    def condition(self) -> Condition:
        left = self.operand()
        if not self.at_op(*COMPARISON_OPS):
            raise self.fail(COMPARISON_OPS)
        op = self.advance().text
        right = self.operand()
        return Condition(left, op, right, _join(left.span, right.span))

    def target(self) -> Target:
        start = self.tok.span
        prefix = []
        while self.at_kw("belief"):
            b = self.advance()
            if self.tok.kind == "str":
                t = self.advance()
                prefix.append(UserRef(name=t.value, span=_join(b.span, t.span)))
            elif self.tok.kind == "ident":
                c = self.colref()
                prefix.append(UserRef(column=c, span=_join(b.span, c.span)))
            else:
                raise self.fail({"user name", "column"})
        negated = False
        if prefix and self.at_kw("not"):
            self.advance()
            negated = True
        if not prefix and self.at_kw("not"):
            raise SqlError("NOT must follow at least one BELIEF user", self.tok.span,
                           frozenset({"BELIEF", "relation name"}))
        rel = self.ident("relation name")
        return Target(tuple(prefix), negated, rel.text, _join(start, rel.span))

    def from_item(self) -> FromItem:
        t = self.target()
        alias = None
        end = t.span
        if self.at_kw("as"):
            self.advance()
            a = self.ident("alias")
            alias, end = a.text, a.span
        elif self.tok.kind == "ident":
            a = self.advance()
            alias, end = a.text, a.span
        return FromItem(t, alias, _join(t.span, end))

    # ----- statements -----

    def select(self) -> Select:
        start = self.kw("select").span
        items = [self.colref()]
        while self.at_op(","):
            self.advance()
            items.append(self.colref())
        self.kw("from")
        from_items = [self.from_item()]
        while True:
            comma = False
            if self.at_op(","):
                self.advance()
                comma = True
            if self.at_kw("where") or self.at_op(";") or self.tok.kind == "eof":
                break
            if not comma and not self.at_kw("belief"):
                raise self.fail({"','", "WHERE", "';'"})
            from_items.append(self.from_item())
        where: tuple[Condition, ...] = ()
        if self.at_kw("where"):
            self.advance()
            where = self.conditions()
        return Select(tuple(items), tuple(from_items), where, _join(start, self.prev.span))

    def insert(self) -> Insert:
        start = self.kw("insert").span
        self.kw("into")
        target = self.target()
        self.kw("values")
        rows = [self.row()]
        while self.at_op(","):
            self.advance()
            rows.append(self.row())
        return Insert(target, tuple(rows), _join(start, self.prev.span))

    def row(self) -> tuple[Literal, ...]:
        self.op("(")
        vals = [self.literal()]
        while self.at_op(","):
            self.advance()
            vals.append(self.literal())
        self.op(")")
        return tuple(vals)

    def delete(self) -> Delete:
        start = self.kw("delete").span
        self.kw("from")
        target = self.target()
        where: tuple[Condition, ...] = ()
        if self.at_kw("where"):
            self.advance()
            where = self.conditions()
        return Delete(target, where, _join(start, self.prev.span))

    def update(self) -> Update:
        start = self.kw("update").span
        target = self.target()
        self.kw("set")
        assigns = [self.assignment()]
        while self.at_op(","):
            self.advance()
            assigns.append(self.assignment())
        where: tuple[Condition, ...] = ()
        if self.at_kw("where"):
            self.advance()
            where = self.conditions()
        return Update(target, tuple(assigns), where, _join(start, self.prev.span))

    def assignment(self) -> Assignment:
        a = self.ident("attribute")
        self.op("=")
        v = self.literal()
        return Assignment(a.text, v, _join(a.span, v.span))

    def create(self) -> CreateRelation:
        start = self.kw("create").span
        self.kw("relation")
        name = self.ident("relation name")
        self.op("(")
        attrs = [self.attribute()]
        while self.at_op(","):
            self.advance()
            attrs.append(self.attribute())
        self.op(")")
        return CreateRelation(name.text, tuple(attrs), _join(start, self.prev.span))

    def attribute(self) -> tuple[str, str]:
        a = self.ident("attribute")
        d = self.ident("domain")
        if d.text.lower() not in ("str", "int"):
            raise SqlError(f"unknown domain {d.text!r}", d.span, frozenset({"str", "int"}))
        return (a.text, d.text.lower())

    def adduser(self) -> AddUser:
        start = self.kw("adduser").span
        if self.tok.kind != "str":
            raise self.fail({"user name"})
        t = self.advance()
        return AddUser(t.value, _join(start, t.span))

    def statement(self) -> Statement:
        dispatch = {
            "select": self.select,
            "insert": self.insert,
            "delete": self.delete,
            "update": self.update,
            "create": self.create,
            "adduser": self.adduser,
        }
        if self.tok.kind == "kw" and self.tok.value in dispatch:
            return dispatch[self.tok.value]()
        raise self.fail(_STATEMENT_START)

    def script(self) -> list[Statement]:
        out = []
        while self.tok.kind != "eof":
            if self.at_op(";"):
                self.advance()
                continue
            out.append(self.statement())
            if self.tok.kind != "eof":
                self.op(";")
        return out


def parse(text: str) -> Statement:
    """Parse one statement; a trailing ``;`` is optional."""
    p = _Parser(text)
    stmt = p.statement()
    if p.at_op(";"):
        p.advance()
    if p.tok.kind != "eof":
        raise p.fail({"';'", "end of input"})
    return stmt


def parse_script(text: str) -> list[Statement]:
    """Parse a ``;``-separated sequence of statements."""
    return _Parser(text).script()
