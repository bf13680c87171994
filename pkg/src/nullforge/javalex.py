"""Tokenizer for Java source text.

Comments and whitespace are dropped, but their extents (together with string,
character and text-block literals) are kept as *mask* regions so callers can
prove that nothing was located inside them.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import List, Tuple

IDENT = "ident"
KEYWORD = "keyword"
NUMBER = "number"
STRING = "string"
CHAR = "char"
OP = "op"

KEYWORDS = frozenset(
    """abstract assert boolean break byte case catch char class const continue
    default do double else enum extends final finally float for goto if
    implements import instanceof int interface long native new package private
    protected public return short static strictfp super switch synchronized this
    throw throws transient try void volatile while true false null""".split()
)

PRIMITIVES = frozenset(
    ["boolean", "byte", "char", "short", "int", "long", "float", "double", "void"]
)

# longest first so that the alternation is maximal munch
_OPERATORS = sorted(
    """>>>= <<= >>= >>> ... -> :: ++ -- && || == != <= >= += -= *= /= %= &= |= ^=
    << >> ( ) { } [ ] ; , . @ = > < ! ~ ? : + - * / & | ^ %""".split(),
    key=len,
    reverse=True,
)

_IDENT_RE = re.compile(r"[A-Za-z_$\u00c0-\uffff][\w$\u00c0-\uffff]*")
_NUMBER_RE = re.compile(
    r"""
    0[xX][0-9a-fA-F_]*(?:\.[0-9a-fA-F_]*)?(?:[pP][+-]?[0-9_]+)?[lLfFdD]?
  | 0[bB][01_]+[lL]?
  | (?:[0-9][0-9_]*(?:\.(?![.\w])|\.[0-9_]+)?|\.[0-9][0-9_]*)(?:[eE][+-]?[0-9_]+)?[lLfFdD]?
    """,
    re.VERBOSE,
)
_OP_RE = re.compile("|".join(re.escape(op) for op in _OPERATORS))
_SPACE_RE = re.compile(r"[ \t\f\r\n\ufeff\u00a0]+")


class LexError(ValueError):
    """Raised for unterminated comments or literals and stray characters."""

    def __init__(self, message: str, offset: int):
        super().__init__(message)
        self.offset = offset


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    start: int
    end: int

    def is_op(self, *ops: str) -> bool:
        return self.kind == OP and self.text in ops

    def is_kw(self, *words: str) -> bool:
        return self.kind == KEYWORD and self.text in words


def _skip_quoted(text: str, pos: int, quote: str) -> int:
    """Return the offset just past a quoted literal starting at ``pos``."""
    i = pos + 1
    n = len(text)
    while i < n:
        c = text[i]
        if c == "\\":
            i += 2
            continue
        if c == quote:
            return i + 1
        if c == "\n":
            break
        i += 1
    raise LexError("unterminated %s literal" % ("string" if quote == '"' else "char"), pos)


def _skip_text_block(text: str, pos: int) -> int:
    i = pos + 3
    n = len(text)
    while i < n:
        if text[i] == "\\":
            i += 2
            continue
        if text.startswith('"""', i):
            return i + 3
        i += 1
    raise LexError("unterminated text block", pos)


def tokenize(text: str) -> Tuple[List[Token], List[Tuple[int, int]]]:
    """Split ``text`` into tokens.

    Returns:
        (tokens, masks) where masks are half-open offset ranges covering every
        comment and every string/char/text-block literal, in source order.
    """
    tokens: List[Token] = []
    masks: List[Tuple[int, int]] = []
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        m = _SPACE_RE.match(text, i)
        if m:
            i = m.end()
            continue
        if text.startswith("//", i):
            end = text.find("\n", i)
            end = n if end < 0 else end
            masks.append((i, end))
            i = end
            continue
        if text.startswith("/*", i):
            end = text.find("*/", i + 2)
            if end < 0:
                raise LexError("unterminated comment", i)
            masks.append((i, end + 2))
            i = end + 2
            continue
        if text.startswith('"""', i):
            end = _skip_text_block(text, i)
            tokens.append(Token(STRING, text[i:end], i, end))
            masks.append((i, end))
            i = end
            continue
        if c == '"' or c == "'":
            end = _skip_quoted(text, i, c)
            tokens.append(Token(STRING if c == '"' else CHAR, text[i:end], i, end))
            masks.append((i, end))
            i = end
            continue
        if c.isdigit() or (c == "." and i + 1 < n and text[i + 1].isdigit()):
            m = _NUMBER_RE.match(text, i)
            tokens.append(Token(NUMBER, m.group(), i, m.end()))
            i = m.end()
            continue
        m = _IDENT_RE.match(text, i)
        if m:
            word = m.group()
            tokens.append(Token(KEYWORD if word in KEYWORDS else IDENT, word, i, m.end()))
            i = m.end()
            continue
        m = _OP_RE.match(text, i)
        if m:
            tokens.append(Token(OP, m.group(), i, m.end()))
            i = m.end()
            continue
        raise LexError("unexpected character %r" % c, i)
    return tokens, masks
