"""Operator catalog and mutant generation.

Two families: the seven traditional method-level operators and the four
null-type operators. Every mutant is one contiguous textual replacement.
"""
from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Union

from .source_model import MethodContext, MutationSite, is_reference_type

TRADITIONAL = "traditional"
NULL_TYPE = "null-type"
FAMILIES = (TRADITIONAL, NULL_TYPE)


class ConfigurationError(ValueError):
    """Bad user configuration (unknown operator, missing command, ...)."""


class StaleMutantError(RuntimeError):
    """The file no longer contains the mutant's original snippet."""


AOR_BINARY = {"+": "-", "-": "+", "*": "/", "/": "*", "%": "*"}
AOR_UNARY = {"-": "", "+": ""}
AOR_SHORTCUT = {"++": "--", "--": "++"}
LOR = {"&": "|", "|": "&", "^": "&"}
SOR = {"<<": ">>", ">>": "<<", ">>>": ">>"}
ROR = {"<": ">=", ">=": "<", ">": "<=", "<=": ">", "==": "!=", "!=": "=="}
COR = {"&&": "||", "||": "&&"}


def _table(table: Dict[str, str]) -> Callable[[MutationSite], List[str]]:
    def replace(site: MutationSite) -> List[str]:
        target = table.get(site.original)
        return [] if target is None else [target]

    return replace


def _nullify_return(site: MutationSite) -> List[str]:
    body = site.original[len("return") : -1].strip()
    while body.startswith("(") and body.endswith(")"):
        body = body[1:-1].strip()
    return [] if body == "null" else ["return null;"]


def _nullify_input(site: MutationSite) -> List[str]:
    return ["%s %s = null;" % (site.original, site.target)]


def _nullify_new(site: MutationSite) -> List[str]:
    return ["null"]


def negate_null_check_text(snippet: str) -> str:
    """Swap ``==`` and ``!=`` in a null comparison, leaving operands alone."""
    for i in range(len(snippet) - 1):
        pair = snippet[i : i + 2]
        if pair in ("==", "!="):
            swapped = "!=" if pair == "==" else "=="
            return snippet[:i] + swapped + snippet[i + 2 :]
    raise ValueError("not a null comparison: %r" % snippet)


def _negate_null(site: MutationSite) -> List[str]:
    return [negate_null_check_text(site.original)]


@dataclass(frozen=True)
class MutationOperator:
    identifier: str
    family: str
    description: str
    kinds: tuple
    replace: Callable[[MutationSite], List[str]]


CATALOG: Dict[str, MutationOperator] = {
    op.identifier: op
    for op in [
        MutationOperator(
            "ArithmeticOperatorReplacementBinary",
            TRADITIONAL,
            "Swap + with -, * with /, and turn % into *",
            ("binary-arith",),
            _table(AOR_BINARY),
        ),
        MutationOperator(
            "ArithmeticOperatorReplacementUnary",
            TRADITIONAL,
            "Drop a unary + or -",
            ("unary-arith",),
            _table(AOR_UNARY),
        ),
        MutationOperator(
            "ArithmeticOperatorReplacementShortcut",
            TRADITIONAL,
            "Swap ++ with --",
            ("shortcut-arith",),
            _table(AOR_SHORTCUT),
        ),
        MutationOperator(
            "LogicalOperatorReplacement",
            TRADITIONAL,
            "Swap & with |, and turn ^ into &",
            ("logical",),
            _table(LOR),
        ),
        MutationOperator(
            "ShiftOperatorReplacement",
            TRADITIONAL,
            "Swap << with >>, and turn >>> into >>",
            ("shift",),
            _table(SOR),
        ),
        MutationOperator(
            "RelationalOperatorReplacement",
            TRADITIONAL,
            "Negate a relational operator: < and >=, > and <=, == and !=",
            ("relational",),
            _table(ROR),
        ),
        MutationOperator(
            "ConditionalOperatorReplacement",
            TRADITIONAL,
            "Swap && with ||",
            ("conditional",),
            _table(COR),
        ),
        MutationOperator(
            "NullifyReturnValue",
            NULL_TYPE,
            "If a method returns an object, it is replaced by null",
            ("return-stmt",),
            _nullify_return,
        ),
        MutationOperator(
            "NullifyInputVariable",
            NULL_TYPE,
            "If a method receives an object reference, it is replaced by null",
            ("method-param",),
            _nullify_input,
        ),
        MutationOperator(
            "NullifyObjectInitialization",
            NULL_TYPE,
            "Wherever there is a new statement, it is replaced with null",
            ("new-expr",),
            _nullify_new,
        ),
        MutationOperator(
            "NegateNullCheck",
            NULL_TYPE,
            "Any binary relational statement containing null at one side is negated",
            ("null-check",),
            _negate_null,
        ),
    ]
}

OPERATOR_IDS = tuple(CATALOG)


def family_of(operator_id: str) -> str:
    return CATALOG[operator_id].family


def enumerate_operators(
    selection: Union[str, Iterable[str], None] = "all"
) -> List[MutationOperator]:
    """Resolve an operator selection to catalog entries, in catalog order.

    ``selection`` is ``"all"``, a family name, or operator ids (an iterable
    or a comma separated string; family names may be mixed in).
    """
    if selection is None:
        selection = "all"
    if isinstance(selection, str):
        names = [s.strip() for s in selection.split(",") if s.strip()]
    else:
        names = list(selection)
    wanted = set()
    unknown = []
    for name in names:
        if name == "all":
            wanted.update(OPERATOR_IDS)
        elif name in FAMILIES:
            wanted.update(i for i, op in CATALOG.items() if op.family == name)
        elif name in CATALOG:
            wanted.add(name)
        else:
            unknown.append(name)
    if unknown:
        raise ConfigurationError(
            "unknown mutation operator(s) %s; valid ids: %s (or all, %s)"
            % (", ".join(unknown), ", ".join(OPERATOR_IDS), ", ".join(FAMILIES))
        )
    if not wanted:
        raise ConfigurationError("no mutation operators selected")
    return [op for i, op in CATALOG.items() if i in wanted]


@dataclass(frozen=True)
class Mutant:
    id: str
    operator: str
    path: str
    line: int
    column: int
    start: int
    end: int
    original: str
    replacement: str
    ordinal: int = 0

    @property
    def family(self) -> str:
        return family_of(self.operator)

    def to_dict(self) -> dict:
        data = asdict(self)
        data["family"] = self.family
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "Mutant":
        names = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in data.items() if k in names})


def mutant_id(path: str, operator: str, start: int, end: int, replacement: str) -> str:
    key = "\0".join([path, operator, str(start), str(end), replacement])
    return hashlib.sha256(key.encode("utf-8")).hexdigest()[:16]


def _build(site: MutationSite, replacement: str) -> Mutant:
    return Mutant(
        mutant_id(site.path, site.operator, site.start, site.end, replacement),
        site.operator,
        site.path,
        site.line,
        site.column,
        site.start,
        site.end,
        site.original,
        replacement,
    )


def _expect(site: MutationSite, kind: str) -> None:
    if site.kind != kind:
        raise ValueError("expected a %s site, got %s" % (kind, site.kind))


def mutate_nullify_return_value(site: MutationSite) -> Optional[Mutant]:
    """``return expr;`` becomes ``return null;``; ``return null;`` yields None."""
    _expect(site, "return-stmt")
    out = _nullify_return(site)
    return _build(site, out[0]) if out else None


def mutate_nullify_input_variable(method: MethodContext, param_index: int) -> Mutant:
    """Assign null to a reference parameter as the body's first statement."""
    name, type_ = method.params[param_index]
    if method.body_span is None or method.insert_anchor is None:
        raise ValueError("%s has no body" % method.name)
    if not is_reference_type(type_):
        raise ValueError("parameter %s of %s is primitive" % (name, method.name))
    start, end = method.insert_anchor
    line, column = method.anchor_position
    site = MutationSite(
        method.path, "NullifyInputVariable", start, end, line, column,
        method.anchor_text, "method-param", name,
    )
    return _build(site, _nullify_input(site)[0])


def mutate_nullify_object_initialization(site: MutationSite) -> Mutant:
    _expect(site, "new-expr")
    return _build(site, "null")


def mutate_negate_null_check(site: MutationSite) -> Mutant:
    _expect(site, "null-check")
    return _build(site, negate_null_check_text(site.original))


def mutate_traditional(site: MutationSite) -> List[Mutant]:
    op = CATALOG[site.operator]
    if op.family != TRADITIONAL or site.kind not in op.kinds:
        raise ValueError("%s is not a traditional site" % site.operator)
    return [_build(site, r) for r in op.replace(site) if r != site.original]


def mutate_site(site: MutationSite) -> List[Mutant]:
    """Mutants for any site, dispatching on its operator."""
    op = CATALOG[site.operator]
    return [_build(site, r) for r in op.replace(site) if r != site.original]


def generate_mutants(sites: Iterable[MutationSite]) -> List[Mutant]:
    """Mutants for all sites with run-wide ordinals (1-based, deterministic)."""
    seen = {}
    for site in sites:
        for m in mutate_site(site):
            seen.setdefault(m.id, m)
    ordered = sorted(
        seen.values(), key=lambda m: (m.path, m.start, m.operator, m.end, m.replacement)
    )
    return [
        dataclasses.replace(m, ordinal=k) for k, m in enumerate(ordered, start=1)
    ]


def apply_mutant(text: str, mutant: Mutant) -> str:
    if text[mutant.start : mutant.end] != mutant.original:
        raise StaleMutantError(
            "%s:%d: expected %r, found %r"
            % (mutant.path, mutant.line, mutant.original, text[mutant.start : mutant.end])
        )
    return text[: mutant.start] + mutant.replacement + text[mutant.end :]


def revert_mutant(text: str, mutant: Mutant) -> str:
    end = mutant.start + len(mutant.replacement)
    if text[mutant.start : end] != mutant.replacement:
        raise StaleMutantError("%s: mutant %s is not applied" % (mutant.path, mutant.id))
    return text[: mutant.start] + mutant.original + text[end:]


def write_mutants_jsonl(mutants: Sequence[Mutant], path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for m in mutants:
            fh.write(json.dumps(m.to_dict(), ensure_ascii=False) + "\n")


def read_mutants_jsonl(path) -> List[Mutant]:
    out = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.strip():
            out.append(Mutant.from_dict(json.loads(line)))
    return out
