"""Tokenizer for BeliefSQL."""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..errors import SqlError
from .ast import SourceSpan

KEYWORDS = frozenset({
    "select", "from", "where", "and", "as", "belief", "not", "insert", "into",
    "values", "delete", "update", "set", "create", "relation", "adduser",
})

_PATTERN = re.compile(
    r"(?P<ws>\s+|--[^\n]*)"
    r"|(?P<str>'(?:[^']|'')*')"
    r"|(?P<int>\d+)"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op><>|!=|<=|>=|[=<>(),;.*-])"
)


@dataclass(frozen=True)
class Token:
    kind: str  # 'kw', 'ident', 'str', 'int', 'op', 'eof'
    text: str
    span: SourceSpan

    @property
    def value(self):
        if self.kind == "str":
            return self.text[1:-1].replace("''", "'")
        if self.kind == "int":
            return int(self.text)
        if self.kind == "kw":
            return self.text.lower()
        return self.text

    def describe(self) -> str:
        return "end of input" if self.kind == "eof" else repr(self.text)


def tokenize(text: str) -> list[Token]:
    """Tokens with spans; keywords are matched case-insensitively."""
    out: list[Token] = []
    pos = 0
    line, col = 1, 1
    byte = 0
    while pos < len(text):
        m = _PATTERN.match(text, pos)
        if m is None:
            if text[pos] == "'":
                span = SourceSpan(byte, byte + len(text[pos:].encode()), line, col)
                raise SqlError("unterminated string literal", span)
            span = SourceSpan(byte, byte + len(text[pos].encode()), line, col)
            raise SqlError(f"unexpected character {text[pos]!r}", span)
        chunk = m.group()
        nbytes = len(chunk.encode())
        kind = m.lastgroup
        if kind != "ws":
            if kind == "ident" and chunk.lower() in KEYWORDS:
                kind = "kw"
            out.append(Token(kind, chunk, SourceSpan(byte, byte + nbytes, line, col)))
        nl = chunk.count("\n")
        if nl:
            line += nl
            col = len(chunk) - chunk.rfind("\n")
        else:
            col += len(chunk)
        pos = m.end()
        byte += nbytes
    out.append(Token("eof", "", SourceSpan(byte, byte, line, col)))
    return out
