"""Locate mutation sites in Java sources.

This is a restricted parser: it understands type, method, field and
initializer declarations well enough to know which tokens are code, which
method owns them, and what the declared parameter and return types are.
There is no symbol table and no type inference; a declared type is a
reference type when it is not a primitive (arrays count as references).
"""
from __future__ import annotations

import bisect
import logging
import os
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

from .javalex import CHAR, IDENT, KEYWORD, NUMBER, OP, PRIMITIVES, STRING, LexError, Token, tokenize

logger = logging.getLogger(__name__)

DEFAULT_INCLUDE = ("**/*.java",)
DEFAULT_EXCLUDE = ("**/src/test/**", "**/test/**")

SITE_KINDS = (
    "binary-arith",
    "unary-arith",
    "shortcut-arith",
    "logical",
    "shift",
    "relational",
    "conditional",
    "return-stmt",
    "method-param",
    "new-expr",
    "null-check",
)

# which operator consumes each site kind
KIND_OPERATOR = {
    "binary-arith": "ArithmeticOperatorReplacementBinary",
    "unary-arith": "ArithmeticOperatorReplacementUnary",
    "shortcut-arith": "ArithmeticOperatorReplacementShortcut",
    "logical": "LogicalOperatorReplacement",
    "shift": "ShiftOperatorReplacement",
    "relational": "RelationalOperatorReplacement",
    "conditional": "ConditionalOperatorReplacement",
    "return-stmt": "NullifyReturnValue",
    "method-param": "NullifyInputVariable",
    "new-expr": "NullifyObjectInitialization",
    "null-check": "NegateNullCheck",
}

_OP_KIND = {
    "*": "binary-arith",
    "/": "binary-arith",
    "%": "binary-arith",
    "++": "shortcut-arith",
    "--": "shortcut-arith",
    "&": "logical",
    "|": "logical",
    "^": "logical",
    "<<": "shift",
    ">>": "shift",
    ">>>": "shift",
    "<": "relational",
    ">": "relational",
    "<=": "relational",
    ">=": "relational",
    "==": "relational",
    "!=": "relational",
    "&&": "conditional",
    "||": "conditional",
}

_MODIFIERS = frozenset(
    """public protected private static final abstract native synchronized
    transient volatile strictfp default""".split()
)
_OPERAND_END_KW = frozenset(["this", "super", "null", "true", "false", "class"])

# owners of code tokens that are not a declared method
LAMBDA = -1
OTHER_CODE = -2


class JavaParseError(ValueError):
    """A file that the restricted grammar cannot handle."""

    def __init__(self, path: str, line: int, message: str):
        super().__init__("%s:%d: %s" % (path, line, message))
        self.path = path
        self.line = line
        self.message = message


@dataclass(frozen=True)
class SourceFile:
    path: str
    text: str
    line_index: Tuple[int, ...]

    @classmethod
    def from_text(cls, path: str, text: str) -> "SourceFile":
        starts = [0]
        starts.extend(m.end() for m in re.finditer("\n", text))
        if starts[-1] == len(text) and len(starts) > 1:
            starts.pop()
        return cls(path, text, tuple(starts))

    def position(self, offset: int) -> Tuple[int, int]:
        """1-based (line, column) of ``offset``."""
        line = bisect.bisect_right(self.line_index, offset)
        return line, offset - self.line_index[line - 1] + 1

    def lines(self) -> List[str]:
        bounds = list(self.line_index) + [len(self.text)]
        return [self.text[a:b] for a, b in zip(bounds, bounds[1:])]


@dataclass(frozen=True)
class MethodContext:
    path: str
    name: str
    return_type: Optional[str]
    params: Tuple[Tuple[str, str], ...]
    body_span: Optional[Tuple[int, int]]
    is_constructor: bool
    is_abstract_or_interface_stub: bool
    class_name: str = ""
    # where a first statement can be inserted: the body's "{" or an explicit
    # this(...)/super(...) call
    insert_anchor: Optional[Tuple[int, int]] = None
    anchor_text: str = ""
    anchor_position: Optional[Tuple[int, int]] = None
    final_params: Tuple[str, ...] = ()

    def reference_params(self) -> List[Tuple[int, str, str]]:
        return [
            (i, name, type_)
            for i, (name, type_) in enumerate(self.params)
            if is_reference_type(type_)
        ]


@dataclass(frozen=True)
class MutationSite:
    path: str
    operator: str
    start: int
    end: int
    line: int
    column: int
    original: str
    kind: str
    # discriminates sites sharing a span, e.g. the parameter for method-param
    target: str = ""

    @property
    def span(self) -> Tuple[int, int]:
        return self.start, self.end


@dataclass
class ParsedFile:
    source: SourceFile
    methods: List[MethodContext]
    tokens: List[Token]
    masks: List[Tuple[int, int]]
    # per token: index into methods, LAMBDA, OTHER_CODE, or None when not code
    owner: List[Optional[int]]
    type_args: Set[int] = field(default_factory=set)
    declarations: Set[int] = field(default_factory=set)
    match: Dict[int, int] = field(default_factory=dict)
    # "new" token index -> index of the last token of its creator expression
    creators: Dict[int, int] = field(default_factory=dict)

    def is_code(self, i: int) -> bool:
        return (
            self.owner[i] is not None
            and i not in self.type_args
            and i not in self.declarations
        )


def is_reference_type(type_text: Optional[str]) -> bool:
    """Lexical reference-type test used by the null-type operators."""
    if not type_text:
        return False
    t = type_text.strip()
    if t.endswith("[]") or t.endswith("..."):
        return True
    depth = 0
    base = []
    for c in t:
        if c == "<":
            depth += 1
        elif c == ">":
            depth -= 1
        elif depth == 0:
            base.append(c)
    name = "".join(base).strip().rsplit(".", 1)[-1]
    return name not in PRIMITIVES


# ---------------------------------------------------------------- scanning


def _glob_regex(pattern: str) -> "re.Pattern[str]":
    out = []
    i = 0
    while i < len(pattern):
        if pattern.startswith("**/", i):
            out.append("(?:.*/)?")
            i += 3
        elif pattern.startswith("/**", i) and i + 3 == len(pattern):
            out.append("(?:/.*)?")
            i += 3
        elif pattern.startswith("**", i):
            out.append(".*")
            i += 2
        elif pattern[i] == "*":
            out.append("[^/]*")
            i += 1
        elif pattern[i] == "?":
            out.append("[^/]")
            i += 1
        else:
            out.append(re.escape(pattern[i]))
            i += 1
    return re.compile("".join(out) + r"\Z")


def glob_match(path: str, patterns: Iterable[str]) -> bool:
    return any(_glob_regex(p).match(path) for p in patterns)


def scan_project(
    root,
    include_globs: Optional[Sequence[str]] = None,
    exclude_globs: Optional[Sequence[str]] = None,
    skipped: Optional[list] = None,
) -> List[SourceFile]:
    """Collect the production ``.java`` files under ``root``, sorted by path.

    Files that are not valid UTF-8 are logged and appended to ``skipped`` as
    ``(path, reason)`` pairs instead of aborting the scan.
    """
    root = Path(root)
    if not root.exists():
        raise FileNotFoundError("project root does not exist: %s" % root)
    if not root.is_dir():
        raise NotADirectoryError("project root is not a directory: %s" % root)
    os.listdir(root)  # surfaces PermissionError early
    include = tuple(include_globs) if include_globs is not None else DEFAULT_INCLUDE
    exclude = tuple(exclude_globs) if exclude_globs is not None else DEFAULT_EXCLUDE

    files = []
    for p in root.rglob("*.java"):
        if not p.is_file():
            continue
        rel = p.relative_to(root).as_posix()
        if not glob_match(rel, include) or glob_match(rel, exclude):
            continue
        try:
            text = p.read_bytes().decode("utf-8")
        except UnicodeDecodeError as exc:
            logger.warning("skipping %s: not valid UTF-8 (%s)", rel, exc.reason)
            if skipped is not None:
                skipped.append((rel, "invalid UTF-8"))
            continue
        files.append(SourceFile.from_text(rel, text))
    files.sort(key=lambda f: f.path)
    return files


# ----------------------------------------------------------------- parsing


class _Parser:
    def __init__(self, source: SourceFile):
        self.source = source
        try:
            self.tokens, self.masks = tokenize(source.text)
        except LexError as exc:
            raise self._error_at(exc.offset, str(exc)) from None
        self.n = len(self.tokens)
        self.owner: List[Optional[int]] = [None] * self.n
        self.methods: List[MethodContext] = []
        self.declarations: Set[int] = set()
        self.creators: Dict[int, int] = {}
        self.match = self._match_brackets()

    # -- helpers

    def _error_at(self, offset: int, message: str) -> JavaParseError:
        line, _ = self.source.position(min(offset, max(len(self.source.text) - 1, 0)))
        return JavaParseError(self.source.path, line, message)

    def error(self, i: int, message: str) -> JavaParseError:
        if i >= self.n:
            return self._error_at(len(self.source.text), message + " (end of file)")
        return self._error_at(self.tokens[i].start, message)

    def tok(self, i: int) -> Token:
        if i >= self.n:
            raise self.error(i, "unexpected end of file")
        return self.tokens[i]

    def peek_op(self, i: int, *ops: str) -> bool:
        return i < self.n and self.tokens[i].is_op(*ops)

    def peek_kw(self, i: int, *words: str) -> bool:
        """Keyword at ``i``; any keyword when ``words`` is empty."""
        if i >= self.n:
            return False
        t = self.tokens[i]
        return t.is_kw(*words) if words else t.kind == KEYWORD

    def peek_ident(self, i: int, text: Optional[str] = None) -> bool:
        return (
            i < self.n
            and self.tokens[i].kind == IDENT
            and (text is None or self.tokens[i].text == text)
        )

    def _match_brackets(self) -> Dict[int, int]:
        pairs = {"(": ")", "[": "]", "{": "}"}
        closers = {v: k for k, v in pairs.items()}
        stack: List[int] = []
        match: Dict[int, int] = {}
        for i, t in enumerate(self.tokens):
            if t.kind != OP:
                continue
            if t.text in pairs:
                stack.append(i)
            elif t.text in closers:
                if not stack or self.tokens[stack[-1]].text != closers[t.text]:
                    raise self.error(i, "unbalanced %r" % t.text)
                j = stack.pop()
                match[i] = j
                match[j] = i
        if stack:
            raise self.error(stack[-1], "unclosed %r" % self.tokens[stack[-1]].text)
        return match

    def skip_angle(self, i: int) -> int:
        """Skip a declaration-context ``<...>``; returns the index after it."""
        depth = 0
        while True:
            t = self.tok(i)
            if t.kind == OP:
                if t.text == "<":
                    depth += 1
                elif t.text in (">", ">>", ">>>"):
                    depth -= len(t.text)
                    if depth <= 0:
                        return i + 1
                elif t.text in ("(", "["):
                    i = self.match[i]
                elif t.text in (";", "{", "}"):
                    raise self.error(i, "malformed type arguments")
            i += 1

    def skip_annotation(self, i: int) -> int:
        i += 1  # '@'
        if not self.peek_ident(i) and not self.peek_kw(i):
            raise self.error(i, "malformed annotation")
        i += 1
        while self.peek_op(i, ".") and (self.peek_ident(i + 1) or self.peek_kw(i + 1)):
            i += 2
        if self.peek_op(i, "("):
            i = self.match[i] + 1
        return i

    def skip_modifiers(self, i: int) -> Tuple[int, Set[str]]:
        mods: Set[str] = set()
        while i < self.n:
            t = self.tokens[i]
            if t.kind == KEYWORD and t.text in _MODIFIERS:
                mods.add(t.text)
                i += 1
            elif t.is_op("@") and not self.peek_kw(i + 1, "interface"):
                i = self.skip_annotation(i)
            elif t.kind == IDENT and t.text == "sealed" and (
                self.peek_kw(i + 1) or self.peek_ident(i + 1, "record")
            ):
                i += 1
            elif (
                t.kind == IDENT
                and t.text == "non"
                and self.peek_op(i + 1, "-")
                and self.peek_ident(i + 2, "sealed")
            ):
                i += 3
            else:
                break
        return i, mods

    def skip_type(self, i: int) -> int:
        while self.peek_op(i, "@"):
            i = self.skip_annotation(i)
        t = self.tok(i)
        if not (t.kind == IDENT or (t.kind == KEYWORD and t.text in PRIMITIVES)):
            raise self.error(i, "expected a type, found %r" % t.text)
        i += 1
        if self.peek_op(i, "<"):
            i = self.skip_angle(i)
        while self.peek_op(i, ".") and (self.peek_ident(i + 1) or self.peek_op(i + 1, "@")):
            i += 1
            while self.peek_op(i, "@"):
                i = self.skip_annotation(i)
            i += 1
            if self.peek_op(i, "<"):
                i = self.skip_angle(i)
        while self.peek_op(i, "@"):
            i = self.skip_annotation(i)
        while self.peek_op(i, "[") and self.peek_op(i + 1, "]"):
            i += 2
        return i

    def type_text(self, lo: int, hi: int) -> str:
        out = []
        i = lo
        while i < hi:
            if self.tokens[i].is_op("@"):
                i = self.skip_annotation(i)
                continue
            out.append(self.tokens[i].text)
            i += 1
        return "".join(out)

    def is_type_decl(self, i: int) -> bool:
        if self.peek_kw(i, "class", "interface", "enum"):
            return not (i > 0 and self.tokens[i - 1].is_op(".", "::"))
        if self.peek_ident(i, "record") and self.peek_ident(i + 1):
            return self.peek_op(i + 2, "(", "<")
        return self.peek_op(i, "@") and self.peek_kw(i + 1, "interface")

    # -- declarations

    def parse_unit(self) -> None:
        i = 0
        while i < self.n:
            if self.peek_kw(i, "package", "import"):
                while not self.peek_op(i, ";"):
                    self.tok(i)
                    i += 1
                i += 1
            elif self.peek_op(i, ";"):
                i += 1
            else:
                j, _ = self.skip_modifiers(i)
                if not self.is_type_decl(j):
                    raise self.error(j, "expected a type declaration")
                i = self.parse_type_decl(j)

    def parse_type_decl(self, i: int, outer: str = "") -> int:
        if self.tokens[i].is_op("@"):
            i += 1
            kind = "annotation"
        else:
            kind = self.tokens[i].text
        name_tok = self.tok(i + 1)
        if name_tok.kind != IDENT:
            raise self.error(i + 1, "expected a type name")
        name = name_tok.text
        i += 2
        while not self.peek_op(i, "{"):
            t = self.tok(i)
            if t.is_op("(", "["):
                i = self.match[i]
            elif t.is_op(";", "}"):
                raise self.error(i, "expected a class body")
            i += 1
        return self.parse_class_body(i, name, kind)

    def parse_class_body(self, i: int, class_name: str, kind: str) -> int:
        close = self.match[i]
        i += 1
        if kind == "enum":
            i = self.parse_enum_constants(i, close, class_name)
        while i < close:
            i = self.parse_member(i, class_name, kind)
        if i != close:
            raise self.error(i, "member runs past the end of its class body")
        return close + 1

    def parse_enum_constants(self, i: int, close: int, class_name: str) -> int:
        while i < close:
            t = self.tokens[i]
            if t.is_op(";"):
                return i + 1
            if t.is_op(","):
                i += 1
                continue
            if t.is_op("@"):
                i = self.skip_annotation(i)
                continue
            if t.kind != IDENT:
                raise self.error(i, "expected an enum constant")
            i += 1
            if self.peek_op(i, "("):
                end = self.match[i]
                self.scan_code(i + 1, end, OTHER_CODE)
                i = end + 1
            if self.peek_op(i, "{"):
                i = self.parse_class_body(i, class_name, "class")
        return i

    def parse_member(self, i: int, class_name: str, kind: str) -> int:
        if self.peek_op(i, ";"):
            return i + 1
        if self.peek_op(i, "{"):
            return self.parse_code_block(i, OTHER_CODE)
        if self.peek_kw(i, "static") and self.peek_op(i + 1, "{"):
            return self.parse_code_block(i + 1, OTHER_CODE)
        start = i
        i, mods = self.skip_modifiers(i)
        if self.is_type_decl(i):
            return self.parse_type_decl(i)
        if self.peek_op(i, "<"):
            i = self.skip_angle(i)
        if self.peek_ident(i) and self.peek_op(i + 1, "("):
            return self.parse_callable(i, None, mods, class_name, kind)
        if kind == "record" and self.peek_ident(i) and self.peek_op(i + 1, "{"):
            return self.parse_callable(i, None, mods, class_name, kind, compact=True)
        type_start = i
        i = self.skip_type(i)
        return_type = self.type_text(type_start, i)
        if not self.peek_ident(i):
            raise self.error(i, "expected a member name")
        if self.peek_op(i + 1, "("):
            return self.parse_callable(i, return_type, mods, class_name, kind)
        # field: declarators and initializers up to the terminating ';'
        j = i
        while not self.peek_op(j, ";"):
            t = self.tok(j)
            if t.is_op("(", "[", "{"):
                j = self.match[j]
            elif t.is_op("}"):
                raise self.error(start, "field declaration is missing ';'")
            j += 1
        self.scan_code(i, j, OTHER_CODE)
        return j + 1

    def parse_params(self, lo: int, hi: int) -> Tuple[List[Tuple[str, str]], List[str]]:
        params: List[Tuple[str, str]] = []
        finals: List[str] = []
        chunks: List[Tuple[int, int]] = []
        depth = 0
        begin = lo
        i = lo
        while i < hi:
            t = self.tokens[i]
            if t.is_op("(", "["):
                i = self.match[i]
            elif t.is_op("<"):
                depth += 1
            elif t.is_op(">", ">>", ">>>"):
                depth -= len(t.text)
            elif t.is_op(",") and depth <= 0:
                chunks.append((begin, i))
                begin = i + 1
            i += 1
        if begin < hi:
            chunks.append((begin, hi))
        for a, b in chunks:
            j, mods = self.skip_modifiers(a)
            type_start = j
            j = self.skip_type(j)
            if self.peek_op(j, "..."):
                j += 1
            type_ = self.type_text(type_start, j)
            while self.peek_op(j, "@"):
                j = self.skip_annotation(j)
            if self.peek_kw(j, "this") or (
                self.peek_ident(j) and self.peek_op(j + 1, ".") and self.peek_kw(j + 2, "this")
            ):
                continue  # receiver parameter
            if not self.peek_ident(j):
                raise self.error(j, "expected a parameter name")
            name = self.tokens[j].text
            j += 1
            while self.peek_op(j, "[") and self.peek_op(j + 1, "]"):
                type_ += "[]"
                j += 2
            if j != b:
                raise self.error(j, "unexpected token in parameter list")
            params.append((name, type_))
            if "final" in mods:
                finals.append(name)
        names = [p[0] for p in params]
        if len(set(names)) != len(names):
            raise self.error(lo, "duplicate parameter names")
        return params, finals

    def parse_callable(
        self,
        i: int,
        return_type: Optional[str],
        mods: Set[str],
        class_name: str,
        kind: str,
        compact: bool = False,
    ) -> int:
        name = self.tokens[i].text
        is_ctor = return_type is None
        params: List[Tuple[str, str]] = []
        finals: List[str] = []
        i += 1
        if not compact:
            close = self.match[i]
            params, finals = self.parse_params(i + 1, close)
            i = close + 1
        while self.peek_op(i, "[") and self.peek_op(i + 1, "]"):
            return_type = (return_type or "") + "[]"
            i += 2
        if self.peek_kw(i, "throws"):
            while not self.peek_op(i, "{", ";"):
                self.tok(i)
                i += 1
        if self.peek_kw(i, "default"):
            while not self.peek_op(i, ";"):
                t = self.tok(i)
                if t.is_op("(", "[", "{"):
                    i = self.match[i]
                i += 1
        if self.peek_op(i, ";"):
            self.methods.append(
                MethodContext(
                    self.source.path, name, return_type, tuple(params), None,
                    is_ctor, True, class_name, None, "", None, tuple(finals),
                )
            )
            return i + 1
        if not self.peek_op(i, "{"):
            raise self.error(i, "expected a method body")
        close = self.match[i]
        anchor = (self.tokens[i].start, self.tokens[i].end)
        body = i + 1
        if is_ctor and self.peek_kw(body, "this", "super") and self.peek_op(body + 1, "("):
            end = self.match[body + 1] + 1
            if self.peek_op(end, ";"):
                anchor = (self.tokens[body].start, self.tokens[end].end)
        index = len(self.methods)
        self.methods.append(
            MethodContext(
                self.source.path,
                name,
                return_type,
                tuple(params),
                (self.tokens[i].start, self.tokens[close].end),
                is_ctor,
                False,
                class_name,
                anchor,
                self.source.text[anchor[0] : anchor[1]],
                self.source.position(anchor[0]),
                tuple(finals),
            )
        )
        self.owner[i] = index
        self.owner[close] = index
        self.scan_code(i + 1, close, index)
        return close + 1

    def parse_code_block(self, i: int, owner: int) -> int:
        close = self.match[i]
        self.owner[i] = owner
        self.owner[close] = owner
        self.scan_code(i + 1, close, owner)
        return close + 1

    # -- code

    def creator_end(self, i: int) -> Optional[int]:
        """Index of the last token of the ``new`` expression at ``i``."""
        j = i + 1
        while self.peek_op(j, "@"):
            j = self.skip_annotation(j)
        if self.peek_op(j, "<"):
            j = self.skip_angle(j)
        t = self.tok(j)
        if not (t.kind == IDENT or (t.kind == KEYWORD and t.text in PRIMITIVES)):
            return None
        j += 1
        while True:
            if self.peek_op(j, "<"):
                j = self.skip_angle(j)
            elif self.peek_op(j, ".") and self.peek_ident(j + 1):
                j += 2
            elif self.peek_op(j, "@"):
                j = self.skip_annotation(j)
            else:
                break
        if self.peek_op(j, "("):
            end = self.match[j]
            if self.peek_op(end + 1, "{"):
                end = self.match[end + 1]
            return end
        if self.peek_op(j, "["):
            end = j
            while self.peek_op(j, "["):
                end = self.match[j]
                j = end + 1
            if self.peek_op(j, "{"):
                end = self.match[j]
            return end
        return None

    def scan_code(self, lo: int, hi: int, owner: int) -> None:
        i = lo
        while i < hi:
            t = self.tokens[i]
            if t.is_op("@") and not self.peek_kw(i + 1, "interface"):
                i = self.skip_annotation(i)
                continue
            if self.is_type_decl(i):
                i = self.parse_type_decl(i)
                continue
            if t.is_kw("new") and not (i > 0 and self.tokens[i - 1].is_op("::")):
                end = self.creator_end(i)
                if end is not None:
                    self.creators[i] = end
                if end is not None and self.tokens[end].is_op("}") and self.tokens[
                    self.match[end] - 1
                ].is_op(")"):
                    # anonymous class: arguments are code, the body declares members
                    body = self.match[end]
                    self.owner[i] = owner
                    self.scan_code(i + 1, body, owner)
                    self.parse_class_body(body, "", "class")
                    i = end + 1
                    continue
            if t.is_op("->") and self.peek_op(i + 1, "{"):
                self.owner[i] = owner
                i = self.parse_code_block(i + 1, owner if self.is_switch_rule(i) else LAMBDA)
                continue
            if t.is_kw("catch") and self.peek_op(i + 1, "("):
                close = self.match[i + 1]
                for j in range(i, close + 1):
                    self.owner[j] = owner
                    self.declarations.add(j)
                i = close + 1
                continue
            self.owner[i] = owner
            i += 1

    def is_switch_rule(self, i: int) -> bool:
        """Whether the ``->`` at ``i`` ends a switch label rather than lambda parameters."""
        j = i - 1
        while j >= 0:
            t = self.tokens[j]
            if t.is_kw("case", "default"):
                return True
            if t.is_op(")"):
                j = self.match[j] - 1
                continue
            if t.kind == OP and t.text in (";", "{", "}", "(", "=", "->", "?", ":"):
                return False
            if t.is_kw("return"):
                return False
            j -= 1
        return False

    def find_type_args(self) -> Set[int]:
        """Tokens that belong to generic type arguments inside code."""
        flagged: Set[int] = set()
        for i, t in enumerate(self.tokens):
            if not t.is_op("<") or self.owner[i] is None or i in flagged or i == 0:
                continue
            prev = self.tokens[i - 1]
            if prev.is_op("."):
                pass
            elif prev.kind == IDENT and prev.text[0].isupper() and any(
                c.islower() for c in prev.text
            ):
                pass
            else:
                continue
            end = self._match_type_args(i)
            if end is not None:
                flagged.update(range(i, end + 1))
        return flagged

    def _match_type_args(self, i: int) -> Optional[int]:
        depth = 0
        j = i
        while j < self.n:
            t = self.tokens[j]
            if t.kind == IDENT or (t.kind == KEYWORD and t.text in PRIMITIVES):
                pass
            elif t.is_kw("extends", "super"):
                pass
            elif t.is_op("<"):
                depth += 1
            elif t.is_op(">", ">>", ">>>"):
                depth -= len(t.text)
                if depth == 0:
                    return j
                if depth < 0:
                    return None
            elif t.is_op(".", ",", "?", "&", "[", "]"):
                pass
            elif t.is_op("@"):
                j = self.skip_annotation(j)
                continue
            else:
                return None
            j += 1
        return None

    def run(self) -> ParsedFile:
        self.parse_unit()
        return ParsedFile(
            self.source,
            self.methods,
            self.tokens,
            self.masks,
            self.owner,
            self.find_type_args(),
            self.declarations,
            self.match,
            self.creators,
        )


def parse_source(file: SourceFile) -> ParsedFile:
    """Parse ``file`` into method contexts plus a token index of its code.

    Raises:
        JavaParseError: with the path and first offending line.
    """
    return _Parser(file).run()


# ------------------------------------------------------------ site location


def _is_operand_end(parsed: ParsedFile, i: int) -> bool:
    if i < 0:
        return False
    t = parsed.tokens[i]
    if t.kind in (IDENT, NUMBER, STRING, CHAR):
        return True
    if t.kind == KEYWORD:
        return t.text in _OPERAND_END_KW
    if t.is_op("]"):
        return True
    if t.is_op(")"):
        # (int) -x is a cast, not a subtraction
        inner = parsed.tokens[parsed.match[i] + 1 : i]
        texts = [x.text for x in inner]
        while texts[-2:] == ["[", "]"]:
            texts = texts[:-2]
        return not (len(texts) == 1 and texts[0] in PRIMITIVES)
    if t.is_op("++", "--"):
        return _is_operand_end(parsed, i - 1)
    return False


def _statement_end(parsed: ParsedFile, i: int) -> int:
    j = i
    while not parsed.tokens[j].is_op(";"):
        if parsed.tokens[j].is_op("(", "[", "{"):
            j = parsed.match[j]
        j += 1
    return j


def _is_null_literal(tokens: Sequence[Token]) -> bool:
    texts = [t.text for t in tokens]
    while len(texts) >= 2 and texts[0] == "(" and texts[-1] == ")":
        texts = texts[1:-1]
    return texts == ["null"]


def locate_sites(parsed: ParsedFile, operators: Iterable[str]) -> List[MutationSite]:
    """All sites of ``parsed`` consumed by the enabled ``operators``.

    Sorted by (offset, operator id); a span may repeat under other operators.
    """
    enabled = set(operators)
    src = parsed.source
    text = src.text
    toks = parsed.tokens
    out: List[MutationSite] = []

    def add(kind: str, start: int, end: int, target: str = "") -> None:
        op = KIND_OPERATOR[kind]
        if op not in enabled:
            return
        line, col = src.position(start)
        out.append(MutationSite(src.path, op, start, end, line, col, text[start:end], kind, target))

    for i, t in enumerate(toks):
        if not parsed.is_code(i):
            continue
        if t.kind == OP:
            if t.text in ("+", "-"):
                if _is_operand_end(parsed, i - 1):
                    if t.text == "+" and (
                        toks[i - 1].kind == STRING or (i + 1 < len(toks) and toks[i + 1].kind == STRING)
                    ):
                        continue  # string concatenation
                    add("binary-arith", t.start, t.end)
                else:
                    add("unary-arith", t.start, t.end)
                continue
            kind = _OP_KIND.get(t.text)
            if kind is None:
                continue
            if kind == "logical" and not _is_operand_end(parsed, i - 1):
                continue
            add(kind, t.start, t.end)
            if t.text in ("==", "!="):
                if i + 1 < len(toks) and toks[i + 1].is_kw("null"):
                    add("null-check", t.start, toks[i + 1].end)
                elif toks[i - 1].is_kw("null"):
                    add("null-check", toks[i - 1].start, t.end)
        elif t.is_kw("return"):
            owner = parsed.owner[i]
            if owner is None or owner < 0:
                continue
            method = parsed.methods[owner]
            if not is_reference_type(method.return_type):
                continue
            end = _statement_end(parsed, i)
            expr = toks[i + 1 : end]
            if not expr or _is_null_literal(expr):
                continue
            add("return-stmt", t.start, toks[end].end)
        elif t.is_kw("new"):
            if i > 0 and toks[i - 1].is_op("::", "."):
                continue
            end = parsed.creators.get(i)
            if end is not None:
                add("new-expr", t.start, toks[end].end)

    for method in parsed.methods:
        if method.is_abstract_or_interface_stub or method.insert_anchor is None:
            continue
        a, b = method.insert_anchor
        for _, name, _type in method.reference_params():
            add("method-param", a, b, name)

    order = {name: k for k, name in enumerate(SITE_KINDS)}
    out.sort(key=lambda s: (s.start, s.operator, s.end, order[s.kind], s.target))
    return out


def locate_project_sites(
    files: Iterable[SourceFile], operators: Iterable[str]
) -> Tuple[List[MutationSite], List[JavaParseError]]:
    """Sites for every file; a file that fails to parse contributes none."""
    operators = list(operators)
    sites: List[MutationSite] = []
    errors: List[JavaParseError] = []
    for f in files:
        try:
            parsed = parse_source(f)
        except JavaParseError as exc:
            logger.warning("cannot parse %s", exc)
            errors.append(exc)
            continue
        sites.extend(locate_sites(parsed, operators))
    return sites, errors
