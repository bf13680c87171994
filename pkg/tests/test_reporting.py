import csv
import io
import json

import pytest

from nullforge.analysis import analyze_run
from nullforge.harness import execute_all, load_suppressions
from nullforge.operators import OPERATOR_IDS
from nullforge.reporting import COUNT_COLUMNS, RunManifest, emit_report, families_csv, markdown, render

from conftest import SUPPRESS, fake_config, fake_mutants, needs_java


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


@pytest.fixture
def fake_analysis(fake_project):
    mutants = [m for m in fake_mutants(fake_project) if m.original != "-"]
    baseline, outcomes = execute_all(fake_config(fake_project), mutants)
    return analyze_run(mutants, outcomes, baseline.tests, OPERATOR_IDS, (), "fake")


def test_csv_family_sums_match_json(fake_analysis):
    fams = {r["family"]: r for r in rows(families_csv(fake_analysis))}
    for col in COUNT_COLUMNS:
        if col == "suppressed":
            continue
        assert sum(int(r[col]) for r in fams.values()) == fake_analysis["totals"][col]
    ops = rows(render(fake_analysis, "csv")["operators.csv"])
    assert len(ops) == len(OPERATOR_IDS)
    assert sum(int(r["total"]) for r in ops) == fake_analysis["totals"]["total"]


def test_distribution_csv_shares_sum_to_one(fake_analysis):
    dist = rows(render(fake_analysis, "csv")["distribution.csv"])
    for base in ("all", "killed", "subsuming"):
        fam = [float(r[base]) for r in dist if r["level"] == "family"]
        assert sum(fam) == pytest.approx(1.0, abs=1e-5)


def test_markdown_lists_survivor_with_location(fake_analysis):
    md = markdown(fake_analysis)
    assert "## Surviving mutants" in md
    (surv,) = [m for m in fake_analysis["mutants"] if m["status"] == "survived"]
    assert "%s:%d:%d" % (surv["path"], surv["line"], surv["column"]) in md
    assert "## Killed mutants" not in md
    assert "demo.CalcTest#testAdd" in markdown(fake_analysis, show_killing=True)


def test_emit_is_deterministic(fake_analysis, tmp_path):
    a = emit_report(fake_analysis, "json,csv,md", tmp_path / "a")
    b = emit_report(fake_analysis, ["json", "csv", "md"], tmp_path / "b")
    assert [p.name for p in a] == ["analysis.json", "distribution.csv", "families.csv", "operators.csv", "report.md"]
    for pa, pb in zip(a, b):
        assert pa.read_bytes() == pb.read_bytes()
    with pytest.raises(ValueError):
        render(fake_analysis, "pdf")


def test_empty_run_renders():
    res = analyze_run([], [], ["T#a"], OPERATOR_IDS, (), "empty")
    assert res["coverage"]["overall"] is None
    md = markdown(res)
    assert "n/a" in md and "None." in md
    assert all(int(r["total"]) == 0 for r in rows(families_csv(res)))


def test_manifest_round_trip(tmp_path):
    m = RunManifest.create({"k": 1}, ["NegateNullCheck"], {"tests": []}, {"seconds": 1.0}, {"total": 0})
    m.write(tmp_path / "manifest.json")
    assert RunManifest.read(tmp_path / "manifest.json") == m
    assert json.loads((tmp_path / "manifest.json").read_text())["tool_version"]


@needs_java
def test_markdown_names_noi_survivors(tadq_run):
    res = analyze_run(
        tadq_run.mutants, tadq_run.outcomes, tadq_run.baseline.tests, OPERATOR_IDS,
        load_suppressions(SUPPRESS), "videostore",
    )
    md = markdown(res)
    survivors = md.split("## Surviving mutants")[1].split("##")[0]
    for mid in ("6517338311201da4", "6138d17fe179f762", "f1c8c996ef8324f0"):
        assert mid in survivors
    # the hand-marked equivalent appears only in its own section
    assert "3e7029b429f6ee17" not in survivors
    assert "3e7029b429f6ee17" in md.split("## Suppressed as equivalent")[1]
