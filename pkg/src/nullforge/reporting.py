"""Render an analysis dict as JSON, CSV tables and a Markdown summary.

Output depends only on the analysis content, so identical runs give
byte-identical files. Timestamps live in the run manifest alone.
"""
from __future__ import annotations

import csv
import io
import json
import platform
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from . import __version__

FORMATS = ("json", "csv", "md")
COUNT_COLUMNS = ("killed", "survived", "stillborn", "timeout", "stale", "total", "suppressed")


@dataclass
class RunManifest:
    tool_version: str
    config: dict
    operators: List[str]
    baseline: dict
    timing: dict
    counts: dict
    python: str = field(default_factory=platform.python_version)

    @classmethod
    def create(cls, config: dict, operators, baseline: dict, timing: dict, counts: dict) -> "RunManifest":
        return cls(__version__, config, list(operators), baseline, timing, counts)

    def write(self, path) -> None:
        Path(path).write_text(dump_json(asdict(self)), encoding="utf-8")

    @classmethod
    def read(cls, path) -> "RunManifest":
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        return cls(**data)


def dump_json(data) -> str:
    return json.dumps(data, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def _csv(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow(["" if v is None else _fmt(v) for v in r])
    return buf.getvalue()


def _fmt(v):
    if isinstance(v, float):
        return "%.6f" % v
    return v


def operators_csv(analysis: dict) -> str:
    header = ("operator", "family") + COUNT_COLUMNS
    rows = [
        [r["name"], r["family"]] + [r[c] for c in COUNT_COLUMNS]
        for r in analysis["operator_table"]
    ]
    return _csv(header, rows)


def families_csv(analysis: dict) -> str:
    header = ("family",) + COUNT_COLUMNS + ("coverage", "skr", "subsuming")
    sub = analysis["distribution"]["subsuming"]["family_counts"]
    rows = [
        [r["name"]]
        + [r[c] for c in COUNT_COLUMNS]
        + [analysis["coverage"].get(r["name"]), analysis["skr"].get(r["name"]), sub.get(r["name"], 0)]
        for r in analysis["families"]
    ]
    return _csv(header, rows)


def distribution_csv(analysis: dict) -> str:
    header = ("level", "name", "all", "killed", "subsuming")
    dist = analysis["distribution"]
    rows = []
    for level, key in (("family", "family_shares"), ("operator", "operator_shares")):
        for name in dist["all"][key]:
            rows.append([level, name] + [dist[b][key][name] for b in ("all", "killed", "subsuming")])
    return _csv(header, rows)


def _pct(v: Optional[float]) -> str:
    return "n/a" if v is None else "%.1f%%" % (100 * v)


def _ratio(v: Optional[float]) -> str:
    return "n/a" if v is None else "%.3f" % v


def _code(s: str) -> str:
    s = " ".join(s.split())
    return "`` %s ``" % s if "`" in s else "`%s`" % s


def markdown(analysis: dict, show_killing: bool = False) -> str:
    t = analysis["totals"]
    out = ["# Mutation report: %s" % analysis["project"], ""]
    out.append(
        "%d mutants generated, %d suppressed as equivalent. "
        "Killed %d, survived %d, timeout %d, stillborn %d, stale %d."
        % (t["generated"], t["suppressed"], t["killed"], t["survived"], t["timeout"], t["stillborn"], t["stale"])
    )
    out.append("")
    out.append("| family | killed | survived | timeout | stillborn | coverage | SKR |")
    out.append("|---|---:|---:|---:|---:|---:|---:|")
    for r in analysis["families"]:
        out.append(
            "| %s | %d | %d | %d | %d | %s | %s |"
            % (r["name"], r["killed"], r["survived"], r["timeout"], r["stillborn"],
               _pct(analysis["coverage"][r["name"]]), _ratio(analysis["skr"][r["name"]]))
        )
    out.append("| overall | %d | %d | %d | %d | %s | |" % (
        t["killed"], t["survived"], t["timeout"], t["stillborn"], _pct(analysis["coverage"]["overall"])))
    out += ["", "## Operators", ""]
    out.append("| operator | family | killed | survived | timeout | stillborn | suppressed |")
    out.append("|---|---|---:|---:|---:|---:|---:|")
    for r in analysis["operator_table"]:
        out.append("| %s | %s | %d | %d | %d | %d | %d |" % (
            r["name"], r["family"], r["killed"], r["survived"], r["timeout"], r["stillborn"], r["suppressed"]))

    s = analysis["subsumption"]
    out += ["", "## Subsumption", ""]
    out.append(
        "%d killed mutants have per-test kill sets over %d tests. They fall into %d "
        "kill-set classes; %d mutants are subsuming and %d are subsumed."
        % (s["matrix_mutants"], s["tests"], s["classes"], s["subsuming_count"], s["subsumed_count"])
    )
    if s["excluded_unresolved"]:
        out.append("%d killed mutants had no readable kill set and were left out." % len(s["excluded_unresolved"]))
    out.append("")
    out.append("| population | size | traditional | null-type |")
    out.append("|---|---:|---:|---:|")
    for base in ("all", "killed", "subsuming"):
        d = analysis["distribution"][base]
        sh = d["family_shares"]
        out.append("| %s | %d | %s | %s |" % (
            base, d["size"],
            "n/a" if d["empty"] else _pct(sh["traditional"]),
            "n/a" if d["empty"] else _pct(sh["null-type"])))

    live = [m for m in analysis["mutants"] if not m.get("suppressed")]
    survivors = [m for m in live if m["status"] == "survived"]
    out += ["", "## Surviving mutants", ""]
    if not survivors:
        out.append("None.")
    for m in survivors:
        out.append("- `%s` %s at %s:%d:%d  " % (m["id"], m["operator"], m["path"], m["line"], m["column"]))
        out.append("  %s -> %s" % (_code(m["original"]), _code(m["replacement"])))

    other = [m for m in live if m["status"] in ("timeout", "stale", "stillborn")]
    if other:
        out += ["", "## Not killed by a test", ""]
        for m in other:
            out.append("- `%s` %s %s at %s:%d" % (m["id"], m["status"], m["operator"], m["path"], m["line"]))

    if show_killing:
        out += ["", "## Killed mutants", ""]
        for m in live:
            if m["status"] == "killed":
                tests = ", ".join(m.get("killing_tests", [])) or "(kill set unavailable)"
                out.append("- `%s` %s at %s:%d, killed by %s" % (
                    m["id"], m["operator"], m["path"], m["line"], tests))

    hidden = [m for m in analysis["mutants"] if m.get("suppressed")]
    if hidden:
        out += ["", "## Suppressed as equivalent", ""]
        for m in hidden:
            out.append("- `%s` %s at %s:%d (%s), %s -> %s" % (
                m["id"], m["operator"], m["path"], m["line"], m["status"],
                _code(m["original"]), _code(m["replacement"])))
    if analysis.get("unknown_suppressed_ids"):
        out += ["", "Suppression ids that match no mutant: %s" % ", ".join(analysis["unknown_suppressed_ids"])]
    return "\n".join(out) + "\n"


def render(analysis: dict, fmt: str, show_killing: bool = False) -> Dict[str, str]:
    """File name to content for one format."""
    if fmt == "json":
        return {"analysis.json": dump_json(analysis)}
    if fmt == "csv":
        return {
            "operators.csv": operators_csv(analysis),
            "families.csv": families_csv(analysis),
            "distribution.csv": distribution_csv(analysis),
        }
    if fmt == "md":
        return {"report.md": markdown(analysis, show_killing)}
    raise ValueError("unknown report format %r (choose from %s)" % (fmt, ", ".join(FORMATS)))


def emit_report(analysis: dict, formats, destination, show_killing: bool = False) -> List[Path]:
    """Write the requested formats into ``destination``; returns the written paths."""
    if isinstance(formats, str):
        formats = [f.strip() for f in formats.split(",") if f.strip()]
    files: Dict[str, str] = {}
    for fmt in formats:
        files.update(render(analysis, fmt, show_killing))
    dest = Path(destination)
    dest.mkdir(parents=True, exist_ok=True)
    written = []
    for name in sorted(files):
        p = dest / name
        with open(p, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(files[name])
        written.append(p)
    return written
