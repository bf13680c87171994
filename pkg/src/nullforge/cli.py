"""Command line: ``nullforge scan|run|analyze|report``.

Exit status is 0 on success, 1 for configuration or baseline problems (and
usage errors), 2 for anything unexpected.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import shlex
import sys
import time
import traceback
from datetime import datetime, timezone
from pathlib import Path
from typing import List, Optional, Sequence

from . import __version__
from .analysis import DataIntegrityError, analyze_run
from .config import CONFIG_NAME, FileConfig, load_config
from .harness import (
    DEFAULT_REPORT_GLOB,
    BaselineError,
    RunConfig,
    execute_all,
    load_suppressions,
    read_outcomes_jsonl,
    write_outcomes_jsonl,
)
from .operators import (
    ConfigurationError,
    enumerate_operators,
    generate_mutants,
    read_mutants_jsonl,
    write_mutants_jsonl,
)
from .reporting import FORMATS, RunManifest, dump_json, emit_report
from .source_model import locate_project_sites, scan_project

logger = logging.getLogger("nullforge")

EXIT_OK = 0
EXIT_FATAL = 1
EXIT_INTERNAL = 2

DEFAULT_OUT = "nullforge-out"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError("%s: error: %s" % (self.prog, message))


def _formats(text: str) -> List[str]:
    out = [f.strip() for f in text.split(",") if f.strip()]
    bad = [f for f in out if f not in FORMATS]
    if bad:
        raise argparse.ArgumentTypeError(
            "unknown format %s (choose from %s)" % (", ".join(bad), ", ".join(FORMATS))
        )
    return out


def _number(text: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError("not a number: %r" % text) from None


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="nullforge", description="Mutation testing for Java with null-type operators.")
    p.add_argument("--version", action="version", version="nullforge " + __version__)
    p.add_argument("-v", "--verbose", action="count", default=0, help="more logging (repeatable)")
    sub = p.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    def project_args(sp):
        sp.add_argument("--project", type=Path, help="project root (default: config dir or cwd)")
        sp.add_argument("--config", type=Path, help="config file (default: <project>/%s if present)" % CONFIG_NAME)
        sp.add_argument("--operators", help="'all', a family name, or comma separated operator ids")
        sp.add_argument("--include", action="append", metavar="GLOB", help="source glob to mutate (repeatable)")
        sp.add_argument("--exclude", action="append", metavar="GLOB", help="source glob to skip (repeatable)")

    sp = sub.add_parser("scan", help="list mutants without running anything")
    project_args(sp)
    sp.add_argument("--output", type=Path, help="write mutants as JSON lines here instead of stdout")

    sp = sub.add_parser("run", help="generate mutants, run the build for each, analyze and report")
    project_args(sp)
    sp.add_argument("--build-cmd", help="build/test command, split like a shell would")
    sp.add_argument("--compile-cmd", help="optional compile-only command used to detect stillborn mutants")
    sp.add_argument("--report-glob", help="JUnit XML reports, relative to the project (default %s)" % DEFAULT_REPORT_GLOB)
    sp.add_argument("--jobs", type=int, help="parallel workers (default 1)")
    sp.add_argument("--timeout-factor", type=_number, help="multiple of baseline time (default 10)")
    sp.add_argument("--timeout-floor", type=_number, help="minimum timeout in seconds (default 30)")
    sp.add_argument("--suppress", type=Path, help="file of equivalent mutant ids")
    sp.add_argument("--format", type=_formats, help="comma separated: json,csv,md (default all)")
    sp.add_argument("--out", type=Path, help="run directory (default $NULLFORGE_OUT or ./%s)" % DEFAULT_OUT)
    sp.add_argument("--show-killing", action="store_true", help="list killing tests in the Markdown report")

    sp = sub.add_parser("analyze", help="recompute analysis.json from a run directory")
    sp.add_argument("run_dir", type=Path, nargs="?", help="run directory (default $NULLFORGE_OUT)")
    sp.add_argument("--suppress", type=Path, help="replace the run's suppression list")

    sp = sub.add_parser("report", help="render reports from a run directory's analysis.json")
    sp.add_argument("run_dir", type=Path, nargs="?", help="run directory (default $NULLFORGE_OUT)")
    sp.add_argument("--format", type=_formats, help="comma separated: json,csv,md (default all)")
    sp.add_argument("--dest", type=Path, help="output directory (default <run_dir>/reports)")
    sp.add_argument("--show-killing", action="store_true", help="list killing tests in the Markdown report")
    return p


# ---------------------------------------------------------------- helpers


def _file_config(args) -> FileConfig:
    if args.config is not None:
        return load_config(args.config)
    root = args.project or Path.cwd()
    candidate = root / CONFIG_NAME
    if candidate.is_file():
        return load_config(candidate)
    return FileConfig()


def _project_root(args, fc: FileConfig) -> Path:
    root = args.project or fc.root or Path.cwd()
    root = Path(root).resolve()
    if not root.is_dir():
        raise ConfigurationError("project root is not a directory: %s" % root)
    return root


def _rel(path: Path, root: Path) -> str:
    try:
        return Path(path).resolve().relative_to(root).as_posix()
    except ValueError:
        return str(path)


def _pick(*values):
    for v in values:
        if v is not None:
            return v
    return None


def _default_run_dir(arg: Optional[Path]) -> Path:
    if arg is not None:
        return arg
    env = os.environ.get("NULLFORGE_OUT")
    return Path(env) if env else Path(DEFAULT_OUT)


def _generate(root: Path, operators, include, exclude):
    op_ids = [op.identifier for op in enumerate_operators(operators)]
    skipped: list = []
    files = scan_project(root, include, exclude, skipped)
    sites, errors = locate_project_sites(files, op_ids)
    return op_ids, files, generate_mutants(sites), errors, skipped


# ---------------------------------------------------------------- commands


def cmd_scan(args) -> int:
    fc = _file_config(args)
    root = _project_root(args, fc)
    op_ids, files, mutants, errors, skipped = _generate(
        root, _pick(args.operators, fc.operators, "all"), args.include or fc.include, args.exclude or fc.exclude
    )
    if args.output:
        write_mutants_jsonl(mutants, args.output)
    else:
        for m in mutants:
            sys.stdout.write(json.dumps(m.to_dict(), ensure_ascii=False) + "\n")
    for e in errors:
        print("warning: %s" % e, file=sys.stderr)
    for path, why in skipped:
        print("warning: skipped %s (%s)" % (path, why), file=sys.stderr)
    print("%d files, %d mutants" % (len(files), len(mutants)), file=sys.stderr)
    return EXIT_OK


def cmd_run(args) -> int:
    fc = _file_config(args)
    root = _project_root(args, fc)
    build = shlex.split(args.build_cmd) if args.build_cmd else fc.build
    if not build:
        raise ConfigurationError("no build command: pass --build-cmd or set project.build in %s" % CONFIG_NAME)
    compile_cmd = shlex.split(args.compile_cmd) if args.compile_cmd else fc.compile
    out = Path(_pick(args.out, os.environ.get("NULLFORGE_OUT"), fc.out, DEFAULT_OUT)).resolve()
    suppress = _pick(args.suppress, fc.suppress)
    formats = _pick(args.format, fc.format, list(FORMATS))
    operators = _pick(args.operators, fc.operators, "all")

    extra = {}
    if fc.compile_error_pattern:
        extra["compile_error_pattern"] = fc.compile_error_pattern
    config = RunConfig(
        project_root=root,
        build_command=build,
        report_glob=_pick(args.report_glob, fc.report_glob, DEFAULT_REPORT_GLOB),
        timeout_factor=_pick(args.timeout_factor, fc.timeout_factor, 10.0),
        timeout_floor=_pick(args.timeout_floor, fc.timeout_floor, 30.0),
        jobs=_pick(args.jobs, fc.jobs, 1),
        operators=operators,
        suppress_path=suppress,
        include_globs=args.include or fc.include,
        exclude_globs=args.exclude or fc.exclude,
        compile_command=compile_cmd,
        skip_paths=[out],
        **extra,
    )
    if suppress and not Path(suppress).is_file():
        raise ConfigurationError("suppression file not found: %s" % suppress)
    suppressed = load_suppressions(suppress) if suppress else {}

    started = datetime.now(timezone.utc)
    t0 = time.monotonic()
    op_ids, files, mutants, errors, skipped = _generate(
        root, operators, config.include_globs, config.exclude_globs
    )
    for e in errors:
        print("warning: %s" % e, file=sys.stderr)
    print("%d files, %d mutants" % (len(files), len(mutants)))

    out.mkdir(parents=True, exist_ok=True)
    write_mutants_jsonl(mutants, out / "mutants.jsonl")
    partial = out / "outcomes.partial.jsonl"
    baseline, outcomes = execute_all(config, mutants, progress_path=partial)
    write_outcomes_jsonl(outcomes, out / "outcomes.jsonl")
    partial.unlink()

    analysis = analyze_run(mutants, outcomes, baseline.tests, op_ids, suppressed, root.name)
    (out / "analysis.json").write_text(dump_json(analysis), encoding="utf-8")
    emit_report(analysis, formats, out / "reports", args.show_killing)

    snapshot = {
        "project": root.name,
        "project_root": str(root),
        "build_command": list(config.build_command),
        "compile_command": list(config.compile_command) if config.compile_command else None,
        "report_glob": config.report_glob,
        "timeout_factor": config.timeout_factor,
        "timeout_floor": config.timeout_floor,
        "jobs": config.jobs,
        "operators": operators if isinstance(operators, str) else list(operators),
        "include": list(config.include_globs) if config.include_globs else None,
        "exclude": list(config.exclude_globs) if config.exclude_globs else None,
        "suppress": _rel(suppress, root) if suppress else None,
        "suppressed_ids": sorted(suppressed),
        "formats": list(formats),
        "parse_errors": [str(e) for e in errors],
        "skipped_files": [p for p, _ in skipped],
    }
    RunManifest.create(
        snapshot,
        op_ids,
        {"tests": list(baseline.tests), "wall_time": baseline.wall_time, "timeout": baseline.timeout},
        {
            "started": started.isoformat(),
            "finished": datetime.now(timezone.utc).isoformat(),
            "seconds": round(time.monotonic() - t0, 3),
        },
        analysis["totals"],
    ).write(out / "manifest.json")

    t = analysis["totals"]
    cov = analysis["coverage"]
    print(
        "killed %d, survived %d, timeout %d, stillborn %d, stale %d, suppressed %d"
        % (t["killed"], t["survived"], t["timeout"], t["stillborn"], t["stale"], t["suppressed"])
    )
    for key in ("traditional", "null-type", "overall"):
        value = cov.get(key)
        print("coverage %-12s %s" % (key, "n/a" if value is None else "%.1f%%" % (100 * value)))
    print("run directory: %s" % _rel(out, root))
    return EXIT_OK


def _load_run(run_dir: Path):
    run_dir = Path(run_dir)
    for name in ("manifest.json", "mutants.jsonl", "outcomes.jsonl"):
        if not (run_dir / name).is_file():
            raise ConfigurationError("%s is not a run directory (missing %s)" % (run_dir, name))
    manifest = RunManifest.read(run_dir / "manifest.json")
    return manifest, read_mutants_jsonl(run_dir / "mutants.jsonl"), read_outcomes_jsonl(run_dir / "outcomes.jsonl")


def cmd_analyze(args) -> int:
    run_dir = _default_run_dir(args.run_dir)
    manifest, mutants, outcomes = _load_run(run_dir)
    if args.suppress:
        suppressed = load_suppressions(args.suppress)
    else:
        suppressed = manifest.config.get("suppressed_ids", [])
    analysis = analyze_run(
        mutants, outcomes, manifest.baseline["tests"], manifest.operators,
        suppressed, manifest.config.get("project", "project"),
    )
    (Path(run_dir) / "analysis.json").write_text(dump_json(analysis), encoding="utf-8")
    print("wrote %s" % (Path(run_dir) / "analysis.json"))
    return EXIT_OK


def cmd_report(args) -> int:
    run_dir = Path(_default_run_dir(args.run_dir))
    path = run_dir / "analysis.json"
    if not path.is_file():
        raise ConfigurationError("no analysis.json in %s; run `nullforge analyze` first" % run_dir)
    analysis = json.loads(path.read_text(encoding="utf-8"))
    written = emit_report(analysis, args.format or list(FORMATS), args.dest or run_dir / "reports", args.show_killing)
    for p in written:
        print(p)
    return EXIT_OK


COMMANDS = {"scan": cmd_scan, "run": cmd_run, "analyze": cmd_analyze, "report": cmd_report}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_FATAL
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2),
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return COMMANDS[args.command](args)
    except (ConfigurationError, BaselineError, DataIntegrityError, FileNotFoundError, NotADirectoryError) as exc:
        print("nullforge: %s" % exc, file=sys.stderr)
        return EXIT_FATAL
    except OSError as exc:
        print("nullforge: I/O error: %s" % exc, file=sys.stderr)
        return EXIT_FATAL
    except Exception:  # noqa: BLE001
        traceback.print_exc()
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
