import itertools
import math
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nullforge.analysis import (
    Counts,
    DataIntegrityError,
    InsufficientDataError,
    KillMatrix,
    ProjectSummary,
    UndefinedCoverageError,
    analyze_run,
    build_kill_matrix,
    count_statuses,
    dynamic_subsumption,
    mutation_coverage,
    operator_breakdown,
    skr,
    skr_correlation,
    subsuming_set,
    subsumption_distribution,
)
from nullforge.harness import KILLED, STALE, STILLBORN, SURVIVED, TIMEOUT, MutantOutcome
from nullforge.operators import CATALOG, NULL_TYPE, TRADITIONAL, Mutant


def outcomes(**counts):
    out = []
    for status, n in counts.items():
        out += [MutantOutcome("%s%03d" % (status, i), status, ("T#a",) if status == KILLED else ()) for i in range(n)]
    return out


# ---------------------------------------------------------------- coverage


def test_coverage_22_of_24():
    assert mutation_coverage(outcomes(killed=22, survived=2, stillborn=5)) == pytest.approx(22 / 24, abs=1e-12)


def test_coverage_counts_timeouts_as_detected():
    assert mutation_coverage(outcomes(killed=20, timeout=2, survived=3, stale=4)) == pytest.approx(22 / 25, abs=1e-12)


def test_coverage_nothing_killed():
    assert mutation_coverage(outcomes(survived=3)) == 0.0


def test_coverage_table_row():
    # one published row: 318 killed and 24 surviving traditional mutants
    c = Counts(killed=318, survived=24)
    assert c.coverage() == pytest.approx(318 / 342, abs=1e-12)


def test_coverage_undefined():
    with pytest.raises(UndefinedCoverageError):
        mutation_coverage(outcomes(stillborn=3, stale=1))
    with pytest.raises(UndefinedCoverageError):
        mutation_coverage([])


def test_coverage_ignores_suppressed():
    outs = outcomes(killed=2, survived=2)
    assert mutation_coverage(outs, suppressed=["survived000", "survived001"]) == 1.0


def test_skr_and_unknown_status():
    assert skr(3, 4) == 0.75
    assert skr(3, 0) is None
    with pytest.raises(ValueError):
        count_statuses(["killed", "exploded"])


# ---------------------------------------------------------------- kill matrix


def test_kill_matrix_layout_and_exclusions():
    outs = [
        MutantOutcome("m2", KILLED, ("T#b",)),
        MutantOutcome("m1", KILLED, ("T#a", "T#b")),
        MutantOutcome("m3", TIMEOUT),
        MutantOutcome("m4", KILLED, (), resolved=False),
        MutantOutcome("m5", SURVIVED),
        MutantOutcome("m6", KILLED, ("T#a",)),
    ]
    km = build_kill_matrix(outs, ["T#b", "T#a", "T#c"], suppressed=["m6"])
    assert km.mutants == ("m1", "m2")
    assert km.tests == ("T#a", "T#b", "T#c")
    assert km.kills.tolist() == [[True, True, False], [False, True, False]]
    ordered = build_kill_matrix(outs, ["T#a", "T#b"], order={"m1": 9, "m2": 1, "m6": 5})
    assert ordered.mutants == ("m2", "m6", "m1")


def test_kill_matrix_rejects_unknown_test():
    with pytest.raises(DataIntegrityError):
        build_kill_matrix([MutantOutcome("m", KILLED, ("X#z",))], ["T#a"])


def test_kill_matrix_rows_need_a_kill():
    with pytest.raises(ValueError):
        KillMatrix(("m",), ("t",), np.zeros((1, 1), dtype=bool))


# ---------------------------------------------------------------- subsumption


def test_subsumption_example():
    # A={t1}, B={t1,t2}, C={t1,t2} (duplicate of B), D={t3}
    km = KillMatrix.from_killsets({"A": ["t1"], "B": ["t1", "t2"], "C": ["t2", "t1"], "D": ["t3"]}, ["t1", "t2", "t3"])
    g = dynamic_subsumption(km)
    assert g.edges == {("A", "B"), ("A", "C"), ("B", "C"), ("C", "B")}
    assert g.classes == (("A",), ("B", "C"), ("D",))
    assert g.subsumes("A", "A") and not g.subsumes("B", "A")
    assert subsuming_set(g) == ("A", "D")


def test_empty_graph():
    g = dynamic_subsumption(KillMatrix((), ("t",), np.zeros((0, 1), dtype=bool)))
    assert subsuming_set(g) == ()


def oracle(killsets):
    """Direct reading of the definitions with Python sets."""
    ids = list(killsets)
    edges = {(a, b) for a in ids for b in ids if a != b and killsets[a] <= killsets[b]}
    minimal = [a for a in ids if not any(killsets[b] < killsets[a] for b in ids)]
    reps = set()
    for a in minimal:
        twins = [b for b in minimal if killsets[b] == killsets[a]]
        reps.add(min(twins))
    return edges, tuple(sorted(reps))


def _check(killsets, tests):
    g = dynamic_subsumption(KillMatrix.from_killsets(killsets, tests))
    edges, subsuming = oracle({k: frozenset(v) for k, v in killsets.items()})
    assert g.edges == edges
    assert subsuming_set(g) == subsuming
    return subsuming


def random_killsets(rng, max_m=10, max_t=10):
    n_t = rng.randint(1, max_t)
    tests = ["t%d" % j for j in range(n_t)]
    ks = {}
    for i in range(rng.randint(0, max_m)):
        s = {t for t in tests if rng.random() < rng.choice([0.2, 0.5, 0.8])}
        ks["m%02d" % i] = s or {rng.choice(tests)}
    return ks, tests


def test_subsumption_random_against_oracle():
    rng = random.Random(20240601)
    for _ in range(1000):
        _check(*random_killsets(rng))


def test_subsumption_exhaustive_small():
    # every matrix with up to 4 mutants and 3 tests whose rows are non-empty
    tests = ["t0", "t1", "t2"]
    rows = [frozenset(t for j, t in enumerate(tests) if mask >> j & 1) for mask in range(1, 8)]
    n = 0
    for m in range(0, 5):
        for combo in itertools.product(rows, repeat=m):
            _check({"m%d" % i: s for i, s in enumerate(combo)}, tests)
            n += 1
    assert n == sum(7 ** m for m in range(5))


@settings(max_examples=200, deadline=None)
@given(st.lists(st.sets(st.integers(0, 5), min_size=1), max_size=8), st.data())
def test_duplicating_a_mutant_keeps_the_subsuming_count(sets, data):
    tests = ["t%d" % j for j in range(6)]
    ks = {"m%d" % i: {"t%d" % j for j in s} for i, s in enumerate(sets)}
    before = _check(ks, tests)
    if ks:
        src = data.draw(st.sampled_from(sorted(ks)))
        ks["z" + src] = set(ks[src])
        assert len(_check(ks, tests)) == len(before)


# ---------------------------------------------------------------- tables


def _mutant(mid, op):
    return Mutant(mid, op, "A.java", 1, 1, 0, 1, "+", "-", ord(mid[0]))


def test_breakdown_zero_fill_and_identity():
    ms = [_mutant("a", "NegateNullCheck"), _mutant("b", "NegateNullCheck"), _mutant("c", "ConditionalOperatorReplacement")]
    outs = [MutantOutcome("a", KILLED, ("T#x",)), MutantOutcome("b", SURVIVED), MutantOutcome("c", STILLBORN)]
    rows, fams = operator_breakdown(ms, outs, suppressed=["b"])
    assert [r.name for r in rows] == list(CATALOG)
    by = {r.name: r for r in rows}
    assert by["NegateNullCheck"].counts == Counts(killed=1) and by["NegateNullCheck"].suppressed == 1
    assert by["NullifyReturnValue"].counts.total == 0
    fam = {r.name: r for r in fams}
    assert fam[NULL_TYPE].counts.total + fam[NULL_TYPE].suppressed == 2
    assert fam[TRADITIONAL].counts == Counts(stillborn=1)


def test_breakdown_rejects_orphan_outcome():
    with pytest.raises(DataIntegrityError):
        operator_breakdown([], [MutantOutcome("a", KILLED)])


def test_distribution_half_and_half():
    ms = [_mutant("a", "NegateNullCheck"), _mutant("b", "RelationalOperatorReplacement"), _mutant("c", "NegateNullCheck")]
    outs = [MutantOutcome("a", KILLED, ("T#x",)), MutantOutcome("b", TIMEOUT), MutantOutcome("c", STALE)]
    d = subsumption_distribution(ms, outs, ["a", "b"])
    for base in ("all", "killed", "subsuming"):
        assert d[base].family_shares() == {TRADITIONAL: 0.5, NULL_TYPE: 0.5}
        assert sum(d[base].operator_shares().values()) == pytest.approx(1.0)
    empty = subsumption_distribution(ms, [MutantOutcome("c", STALE)], [])
    assert empty["subsuming"].empty and empty["subsuming"].family_shares() == {TRADITIONAL: 0.0, NULL_TYPE: 0.0}


# ---------------------------------------------------------------- correlation


def _summary(name, a, b):
    return ProjectSummary(name, {TRADITIONAL: Counts(killed=a[1], survived=a[0]), NULL_TYPE: Counts(killed=b[1], survived=b[0])})


def test_correlation_linear():
    c = skr_correlation([_summary("p%d" % k, (k, 10), (2 * k, 10)) for k in range(1, 6)])
    assert c.r == pytest.approx(1.0) and c.r_squared == pytest.approx(1.0)
    assert (c.n, c.excluded, c.degenerate) == (5, 0, False)


def test_correlation_excludes_undefined_and_flags_constant():
    rows = [_summary("a", (1, 2), (1, 5)), _summary("b", (2, 2), (1, 5)), _summary("c", (3, 2), (1, 5)), _summary("d", (1, 0), (1, 1))]
    c = skr_correlation(rows)
    assert c.degenerate and c.r is None and c.excluded == 1


def test_correlation_needs_three():
    with pytest.raises(InsufficientDataError):
        skr_correlation([_summary("a", (1, 2), (1, 3)), _summary("b", (2, 2), (1, 5))])


def test_correlation_matches_textbook_formula():
    rng = random.Random(7)
    rows = [_summary(str(i), (rng.randint(0, 50), rng.randint(1, 50)), (rng.randint(0, 50), rng.randint(1, 50))) for i in range(12)]
    xs = [r.skr(TRADITIONAL) for r in rows]
    ys = [r.skr(NULL_TYPE) for r in rows]
    mx, my = sum(xs) / len(xs), sum(ys) / len(ys)
    num = sum((x - mx) * (y - my) for x, y in zip(xs, ys))
    den = math.sqrt(sum((x - mx) ** 2 for x in xs) * sum((y - my) ** 2 for y in ys))
    assert skr_correlation(rows).r == pytest.approx(num / den, abs=1e-12)


# ---------------------------------------------------------------- whole run


def test_analyze_run_requires_matching_outcomes():
    with pytest.raises(DataIntegrityError):
        analyze_run([_mutant("a", "NegateNullCheck")], [], ["T#x"])


def test_analyze_run_conservation():
    ms = [_mutant("a", "NegateNullCheck"), _mutant("b", "NegateNullCheck"), _mutant("c", "ConditionalOperatorReplacement")]
    outs = [MutantOutcome("a", KILLED, ("T#x",)), MutantOutcome("b", SURVIVED), MutantOutcome("c", KILLED, ("T#x", "T#y"))]
    res = analyze_run(ms, outs, ["T#x", "T#y"], suppressed=["b", "nope"])
    t = res["totals"]
    assert (t["generated"], t["suppressed"], t["total"]) == (3, 1, 2)
    assert res["unknown_suppressed_ids"] == ["nope"]
    assert res["subsumption"]["subsuming"] == ["a"]
    for row in res["operator_table"]:
        assert row["killed"] + row["survived"] + row["stillborn"] + row["timeout"] + row["stale"] == row["total"]
