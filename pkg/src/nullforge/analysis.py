"""Statistics over a finished run: coverage, operator tables, subsumption, SKR.

Everything here is a pure function of the outcome records. Suppressed mutants
(ids the user declared equivalent) are removed before any number is computed.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .harness import KILLED, STALE, STILLBORN, STATUSES, SURVIVED, TIMEOUT, MutantOutcome
from .operators import CATALOG, FAMILIES, NULL_TYPE, TRADITIONAL, Mutant


class UndefinedCoverageError(ValueError):
    """No killed, timed-out or surviving mutant is left to compute coverage on."""


class DataIntegrityError(ValueError):
    pass


class InsufficientDataError(ValueError):
    pass


# ------------------------------------------------------------------ counting


@dataclass(frozen=True)
class Counts:
    killed: int = 0
    survived: int = 0
    stillborn: int = 0
    timeout: int = 0
    stale: int = 0

    @property
    def total(self) -> int:
        return self.killed + self.survived + self.stillborn + self.timeout + self.stale

    @property
    def detected(self) -> int:
        return self.killed + self.timeout

    def coverage(self) -> Optional[float]:
        denom = self.killed + self.timeout + self.survived
        return None if denom == 0 else self.detected / denom

    def skr(self) -> Optional[float]:
        return skr(self.survived, self.killed)

    def __add__(self, other: "Counts") -> "Counts":
        return Counts(
            self.killed + other.killed,
            self.survived + other.survived,
            self.stillborn + other.stillborn,
            self.timeout + other.timeout,
            self.stale + other.stale,
        )

    def to_dict(self) -> dict:
        return {
            "killed": self.killed,
            "survived": self.survived,
            "stillborn": self.stillborn,
            "timeout": self.timeout,
            "stale": self.stale,
            "total": self.total,
        }


def count_statuses(statuses: Iterable[str]) -> Counts:
    c = Counter(statuses)
    unknown = set(c) - set(STATUSES)
    if unknown:
        raise DataIntegrityError("unknown outcome status(es): %s" % ", ".join(sorted(unknown)))
    return Counts(c[KILLED], c[SURVIVED], c[STILLBORN], c[TIMEOUT], c[STALE])


def _active(outcomes: Iterable[MutantOutcome], suppressed: Iterable[str]) -> List[MutantOutcome]:
    drop = set(suppressed or ())
    return [o for o in outcomes if o.mutant_id not in drop]


def skr(survived: int, killed: int) -> Optional[float]:
    """Survived-to-killed ratio; None when nothing was killed."""
    return None if killed <= 0 else survived / killed


def mutation_coverage(outcomes: Iterable[MutantOutcome], suppressed: Iterable[str] = ()) -> float:
    """(killed + timeout) / (killed + timeout + survived) over unsuppressed mutants.

    Stillborn and stale mutants are left out of both numerator and denominator.
    """
    value = count_statuses(o.status for o in _active(outcomes, suppressed)).coverage()
    if value is None:
        raise UndefinedCoverageError("coverage is undefined: no killed, timed-out or surviving mutants")
    return value


# ---------------------------------------------------------------- subsumption


@dataclass(frozen=True)
class KillMatrix:
    """Rows are mutants, columns are tests; ``kills[i, j]`` is True when test j kills mutant i."""

    mutants: Tuple[str, ...]
    tests: Tuple[str, ...]
    kills: np.ndarray

    def __post_init__(self) -> None:
        shape = (len(self.mutants), len(self.tests))
        if self.kills.shape != shape:
            raise ValueError("kill matrix shape %s does not match %s" % (self.kills.shape, shape))
        if len(self.mutants) and not self.kills.any(axis=1).all():
            raise ValueError("every row of a kill matrix needs at least one killing test")

    def killset(self, mutant: str) -> FrozenSet[str]:
        row = self.kills[self.mutants.index(mutant)]
        return frozenset(t for t, k in zip(self.tests, row) if k)

    @classmethod
    def from_killsets(cls, killsets: Mapping[str, Iterable[str]], tests: Sequence[str]) -> "KillMatrix":
        tests = tuple(tests)
        col = {t: j for j, t in enumerate(tests)}
        ids = tuple(killsets)
        kills = np.zeros((len(ids), len(tests)), dtype=bool)
        for i, m in enumerate(ids):
            for t in killsets[m]:
                kills[i, col[t]] = True
        return cls(ids, tests, kills)


def build_kill_matrix(
    outcomes: Iterable[MutantOutcome],
    tests: Sequence[str],
    order: Optional[Mapping[str, int]] = None,
    suppressed: Iterable[str] = (),
) -> KillMatrix:
    """Kill matrix over killed mutants whose kill sets were read from reports.

    Rows follow ``order`` (mutant id to ordinal) when given, else mutant id;
    columns are the sorted baseline inventory. Timeouts, unresolved kills and
    suppressed mutants are left out.
    """
    tests = tuple(sorted(tests))
    inventory = set(tests)
    rows = []
    for o in _active(outcomes, suppressed):
        if o.status != KILLED or not o.resolved or not o.killing_tests:
            continue
        for t in o.killing_tests:
            if t not in inventory:
                raise DataIntegrityError(
                    "mutant %s was killed by %r, which is not in the baseline inventory"
                    % (o.mutant_id, t)
                )
        rows.append(o)
    if order is not None:
        rows.sort(key=lambda o: (order.get(o.mutant_id, math.inf), o.mutant_id))
    else:
        rows.sort(key=lambda o: o.mutant_id)
    return KillMatrix.from_killsets({o.mutant_id: o.killing_tests for o in rows}, tests)


@dataclass(frozen=True)
class SubsumptionGraph:
    nodes: Tuple[str, ...]
    # (a, b) with a != b: a dynamically subsumes b
    edges: FrozenSet[Tuple[str, str]]
    classes: Tuple[Tuple[str, ...], ...]
    representative: Mapping[str, str] = field(hash=False)
    # (a, b) over class representatives: class a strictly subsumes class b
    strict: FrozenSet[Tuple[str, str]] = frozenset()

    def subsumes(self, a: str, b: str) -> bool:
        if a == b:
            return a in self.representative
        return (a, b) in self.edges


def dynamic_subsumption(matrix: KillMatrix) -> SubsumptionGraph:
    """A subsumes B iff A is killed and every test that kills A also kills B."""
    ids = matrix.mutants
    m = matrix.kills.astype(np.int64)
    sizes = m.sum(axis=1)
    inter = m @ m.T
    # subset[i, j]: killset(i) is contained in killset(j)
    subset = (inter == sizes[:, None]) & (sizes[:, None] > 0)
    n = len(ids)
    edges = frozenset(
        (ids[i], ids[j]) for i, j in zip(*np.nonzero(subset)) if i != j
    )

    groups: Dict[bytes, List[int]] = {}
    for i in range(n):
        groups.setdefault(np.packbits(matrix.kills[i]).tobytes(), []).append(i)
    classes = sorted(tuple(sorted(ids[i] for i in members)) for members in groups.values())
    rep = {mid: cls[0] for cls in classes for mid in cls}

    index = {mid: i for i, mid in enumerate(ids)}
    strict = frozenset(
        (a[0], b[0])
        for a in classes
        for b in classes
        if a is not b and subset[index[a[0]], index[b[0]]]
    )
    return SubsumptionGraph(ids, edges, tuple(classes), rep, strict)


def subsuming_set(graph: SubsumptionGraph) -> Tuple[str, ...]:
    """One representative per class that no other class strictly subsumes, sorted."""
    dominated = {b for _, b in graph.strict}
    return tuple(sorted(c[0] for c in graph.classes if c[0] not in dominated))


# ------------------------------------------------------------------- tables


@dataclass(frozen=True)
class BreakdownRow:
    name: str
    family: str
    counts: Counts
    suppressed: int = 0

    def to_dict(self) -> dict:
        d = {"name": self.name, "family": self.family}
        d.update(self.counts.to_dict())
        d["suppressed"] = self.suppressed
        return d


def operator_breakdown(
    mutants: Sequence[Mutant],
    outcomes: Iterable[MutantOutcome],
    operators: Optional[Sequence[str]] = None,
    suppressed: Iterable[str] = (),
) -> Tuple[List[BreakdownRow], List[BreakdownRow]]:
    """Per-operator rows (catalog order, zero-filled) and per-family subtotals."""
    by_id = {m.id: m for m in mutants}
    drop = set(suppressed or ())
    enabled = list(operators) if operators is not None else list(CATALOG)
    enabled = [op for op in CATALOG if op in set(enabled)]
    statuses: Dict[str, List[str]] = {op: [] for op in enabled}
    hidden: Counter = Counter()
    for o in outcomes:
        m = by_id.get(o.mutant_id)
        if m is None:
            raise DataIntegrityError("outcome for unknown mutant %s" % o.mutant_id)
        if m.operator not in statuses:
            statuses[m.operator] = []
            enabled.append(m.operator)
        if o.mutant_id in drop:
            hidden[m.operator] += 1
        else:
            statuses[m.operator].append(o.status)
    rows = [
        BreakdownRow(op, CATALOG[op].family, count_statuses(statuses[op]), hidden[op])
        for op in enabled
    ]
    families = []
    for fam in FAMILIES:
        members = [r for r in rows if r.family == fam]
        total = Counts()
        for r in members:
            total = total + r.counts
        families.append(BreakdownRow(fam, fam, total, sum(r.suppressed for r in members)))
    return rows, families


@dataclass(frozen=True)
class Distribution:
    """Shares of one mutant population by family and by operator."""

    base: str
    size: int
    empty: bool
    family_counts: Mapping[str, int]
    operator_counts: Mapping[str, int]

    def family_shares(self) -> Dict[str, float]:
        return _shares(self.family_counts, self.size)

    def operator_shares(self) -> Dict[str, float]:
        return _shares(self.operator_counts, self.size)

    def to_dict(self) -> dict:
        return {
            "base": self.base,
            "size": self.size,
            "empty": self.empty,
            "family_counts": dict(self.family_counts),
            "family_shares": self.family_shares(),
            "operator_counts": dict(self.operator_counts),
            "operator_shares": self.operator_shares(),
        }


def _shares(counts: Mapping[str, int], size: int) -> Dict[str, float]:
    return {k: (v / size if size else 0.0) for k, v in counts.items()}


def _distribution(base: str, ops: Sequence[str], operators: Sequence[str]) -> Distribution:
    per_op = Counter(ops)
    fam = Counter(CATALOG[o].family for o in ops)
    return Distribution(
        base,
        len(ops),
        len(ops) == 0,
        {f: fam[f] for f in FAMILIES},
        {o: per_op[o] for o in operators},
    )


def subsumption_distribution(
    mutants: Sequence[Mutant],
    outcomes: Iterable[MutantOutcome],
    subsuming: Iterable[str],
    operators: Optional[Sequence[str]] = None,
    suppressed: Iterable[str] = (),
) -> Dict[str, Distribution]:
    """Family and operator make-up of the all, killed and subsuming populations.

    ``all`` holds every unsuppressed mutant that ran to a verdict (killed,
    timeout or survived); ``killed`` counts timeouts as detected.
    """
    by_id = {m.id: m for m in mutants}
    active = _active(outcomes, suppressed)
    ops = [op for op in CATALOG if operators is None or op in set(operators)]
    all_ops = [by_id[o.mutant_id].operator for o in active if o.status in (KILLED, SURVIVED, TIMEOUT)]
    killed_ops = [by_id[o.mutant_id].operator for o in active if o.status in (KILLED, TIMEOUT)]
    sub_ops = [by_id[m].operator for m in subsuming]
    return {
        "all": _distribution("all", all_ops, ops),
        "killed": _distribution("killed", killed_ops, ops),
        "subsuming": _distribution("subsuming", sub_ops, ops),
    }


# ---------------------------------------------------------------- summaries


@dataclass(frozen=True)
class ProjectSummary:
    name: str
    families: Mapping[str, Counts]
    operators: Mapping[str, Counts] = field(default_factory=dict)
    subsuming: Mapping[str, int] = field(default_factory=dict)

    @classmethod
    def from_counts(
        cls,
        name: str,
        traditional: Tuple[int, int],
        null_type: Tuple[int, int],
    ) -> "ProjectSummary":
        """Summary from (survived, killed) pairs, the shape of a published table row."""
        return cls(
            name,
            {
                TRADITIONAL: Counts(killed=traditional[1], survived=traditional[0]),
                NULL_TYPE: Counts(killed=null_type[1], survived=null_type[0]),
            },
        )

    def skr(self, family: str) -> Optional[float]:
        return self.families[family].skr()

    def coverage(self, family: Optional[str] = None) -> Optional[float]:
        if family is not None:
            return self.families[family].coverage()
        total = Counts()
        for c in self.families.values():
            total = total + c
        return total.coverage()

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "families": {f: c.to_dict() for f, c in self.families.items()},
            "operators": {o: c.to_dict() for o, c in self.operators.items()},
            "coverage": {f: self.coverage(f) for f in self.families},
            "coverage_overall": self.coverage(),
            "skr": {f: self.skr(f) for f in self.families},
            "subsuming": dict(self.subsuming),
        }


@dataclass(frozen=True)
class Correlation:
    r: Optional[float]
    r_squared: Optional[float]
    n: int
    excluded: int
    degenerate: bool


def skr_correlation(summaries: Iterable[ProjectSummary]) -> Correlation:
    """Pearson r between traditional and null-type SKR across projects.

    Computed on the raw ratios. Projects where either family killed nothing are
    skipped and counted in ``excluded``. A constant side gives ``degenerate``.
    """
    xs, ys, excluded = [], [], 0
    for s in summaries:
        a, b = s.skr(TRADITIONAL), s.skr(NULL_TYPE)
        if a is None or b is None:
            excluded += 1
            continue
        xs.append(a)
        ys.append(b)
    if len(xs) < 3:
        raise InsufficientDataError(
            "SKR correlation needs at least 3 projects with defined SKR in both families, got %d"
            % len(xs)
        )
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if np.ptp(x) == 0 or np.ptp(y) == 0:
        return Correlation(None, None, len(xs), excluded, True)
    r = float(np.corrcoef(x, y)[0, 1])
    r = max(-1.0, min(1.0, r))
    return Correlation(r, r * r, len(xs), excluded, False)


# ------------------------------------------------------------------ a run


def analyze_run(
    mutants: Sequence[Mutant],
    outcomes: Sequence[MutantOutcome],
    tests: Sequence[str],
    operators: Optional[Sequence[str]] = None,
    suppressed: Iterable[str] = (),
    name: str = "project",
) -> dict:
    """Everything the reports need, as a JSON-ready dict with no timing data."""
    suppressed = sorted(set(suppressed or ()))
    by_id = {m.id: m for m in mutants}
    if len(outcomes) != len(mutants) or set(o.mutant_id for o in outcomes) != set(by_id):
        raise DataIntegrityError("outcomes do not match the generated mutants one to one")
    drop = set(suppressed)
    active = _active(outcomes, drop)
    order = {m.id: m.ordinal for m in mutants}

    op_rows, fam_rows = operator_breakdown(mutants, outcomes, operators, drop)
    overall = Counts()
    for r in fam_rows:
        overall = overall + r.counts

    matrix = build_kill_matrix(active, tests, order)
    graph = dynamic_subsumption(matrix)
    subsuming = subsuming_set(graph)
    dist = subsumption_distribution(mutants, outcomes, subsuming, [r.name for r in op_rows], drop)
    unresolved = sorted(
        o.mutant_id for o in active if o.status == KILLED and (not o.resolved or not o.killing_tests)
    )

    summary = ProjectSummary(
        name,
        {r.name: r.counts for r in fam_rows},
        {r.name: r.counts for r in op_rows},
        dict(dist["subsuming"].family_counts),
    )

    def record(m: Mutant, o: MutantOutcome) -> dict:
        d = {
            "id": m.id,
            "ordinal": m.ordinal,
            "operator": m.operator,
            "family": m.family,
            "path": m.path,
            "line": m.line,
            "column": m.column,
            "original": m.original,
            "replacement": m.replacement,
            "status": o.status,
            "suppressed": m.id in drop,
        }
        if o.status == KILLED:
            d["killing_tests"] = list(o.killing_tests)
        if o.note and o.status != KILLED:
            d["note"] = o.note
        return d

    ordered = sorted(outcomes, key=lambda o: order[o.mutant_id])
    return {
        "schema": 1,
        "project": name,
        "operators": [r.name for r in op_rows],
        "totals": {
            "generated": len(mutants),
            "suppressed": len(drop & set(by_id)),
            **overall.to_dict(),
        },
        "coverage": {
            "overall": overall.coverage(),
            **{r.name: r.counts.coverage() for r in fam_rows},
        },
        "skr": {r.name: r.counts.skr() for r in fam_rows},
        "families": [r.to_dict() for r in fam_rows],
        "operator_table": [r.to_dict() for r in op_rows],
        "subsumption": {
            "tests": len(matrix.tests),
            "matrix_mutants": len(matrix.mutants),
            "classes": len(graph.classes),
            "edges": len(graph.edges),
            "subsuming": list(subsuming),
            "subsuming_count": len(subsuming),
            "subsumed_count": len(matrix.mutants) - len(subsuming),
            "excluded_unresolved": unresolved,
            "excluded_timeout": sum(1 for o in active if o.status == TIMEOUT),
        },
        "distribution": {k: v.to_dict() for k, v in dist.items()},
        "summary": summary.to_dict(),
        "suppressed_ids": [i for i in suppressed if i in by_id],
        "unknown_suppressed_ids": [i for i in suppressed if i not in by_id],
        "mutants": [record(by_id[o.mutant_id], o) for o in ordered],
    }
