"""Position-tracking tokenizer shared by every kernel language.

The same token stream feeds the XASM, OpenQASM and Quil statement parsers, so
the lexer is deliberately language-neutral: identifiers, numbers, strings and
punctuation.  ``//`` and ``/* */`` comments are dropped everywhere; ``#`` starts
a line comment (Quil) because ``#include`` lines are already consumed by the
preprocessor.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..errors import KernelSyntaxError

IDENT = "ident"
NUMBER = "number"
STRING = "string"
OP = "op"
EOF = "eof"

_OPERATORS = (
    "<<=", ">>=", "->", "::", "++", "--", "+=", "-=", "*=", "/=", "&&", "||",
    "==", "!=", "<=", ">=", "<<", ">>",
    "+", "-", "*", "/", "%", "<", ">", "=", "!", "(", ")", "[", "]", "{", "}",
    ",", ";", ":", ".", "&", "|", "^", "?", "~",
)
_NUMBER_RE = re.compile(r"(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?[fFlLuU]*")
_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


@dataclass(frozen=True)
class Token:
    kind: str
    value: str
    line: int
    col: int

    def __repr__(self) -> str:
        return f"Token({self.kind}, {self.value!r}, {self.line}:{self.col})"


def tokenize(text: str, filename: str | None = None) -> list[Token]:
    """Split ``text`` into tokens; the result always ends with an EOF token."""
    tokens: list[Token] = []
    i, line, col = 0, 1, 1
    n = len(text)

    def advance(k: int) -> None:
        nonlocal i, line, col
        chunk = text[i:i + k]
        nl = chunk.count("\n")
        if nl:
            line += nl
            col = len(chunk) - chunk.rfind("\n")
        else:
            col += k
        i += k

    while i < n:
        c = text[i]
        if c in " \t\r\n\f\v":
            advance(1)
            continue
        if text.startswith("//", i) or c == "#":
            end = text.find("\n", i)
            advance((n if end < 0 else end) - i)
            continue
        if text.startswith("/*", i):
            end = text.find("*/", i + 2)
            if end < 0:
                raise KernelSyntaxError("unterminated block comment", line, col, filename)
            advance(end + 2 - i)
            continue
        m = _NUMBER_RE.match(text, i)
        if m and (c.isdigit() or (c == "." and i + 1 < n and text[i + 1].isdigit())):
            tokens.append(Token(NUMBER, m.group(0).rstrip("fFlLuU"), line, col))
            advance(m.end() - i)
            continue
        m = _IDENT_RE.match(text, i)
        if m:
            tokens.append(Token(IDENT, m.group(0), line, col))
            advance(m.end() - i)
            continue
        if c == '"':
            end = text.find('"', i + 1)
            if end < 0 or "\n" in text[i:end]:
                raise KernelSyntaxError("unterminated string literal", line, col, filename)
            tokens.append(Token(STRING, text[i + 1:end], line, col))
            advance(end + 1 - i)
            continue
        for op in _OPERATORS:
            if text.startswith(op, i):
                tokens.append(Token(OP, op, line, col))
                advance(len(op))
                break
        else:
            raise KernelSyntaxError(f"unexpected character {c!r}", line, col, filename)
    tokens.append(Token(EOF, "", line, col))
    return tokens
