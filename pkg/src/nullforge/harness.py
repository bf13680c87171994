"""Run the project's build once per mutant and classify the result.

Every mutant executes in a private copy of the project tree, so the user's
checkout is never touched and parallel workers never share files. A worker
patches one file, runs the build, reads the JUnit XML reports and then puts
the pristine file back before taking the next mutant.
"""
from __future__ import annotations

import json
import logging
import os
import queue
import re
import shutil
import signal
import subprocess
import tempfile
import time
import xml.etree.ElementTree as ET
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .operators import ConfigurationError, Mutant, StaleMutantError, apply_mutant
from .source_model import glob_match

logger = logging.getLogger(__name__)

KILLED = "killed"
SURVIVED = "survived"
STILLBORN = "stillborn"
TIMEOUT = "timeout"
STALE = "stale"
STATUSES = (KILLED, SURVIVED, STILLBORN, TIMEOUT, STALE)

PASS = "pass"
FAIL = "fail"
ERROR = "error"
SKIPPED = "skipped"

DEFAULT_REPORT_GLOB = "**/TEST-*.xml"
DEFAULT_COMPILE_ERROR_PATTERN = (
    r"COMPILATION ERROR|Compilation failure|error: cannot find symbol"
    r"|compileJava FAILED|CompileException"
)
# never copied into worker workspaces
_IGNORED_DIRS = (".git", ".hg", ".svn", ".nullforge")


class BaselineError(RuntimeError):
    """The unmutated project does not build, or its tests are not green."""


class ReportParseError(ValueError):
    pass


@dataclass
class RunConfig:
    project_root: Path
    build_command: Sequence[str]
    report_glob: str = DEFAULT_REPORT_GLOB
    timeout_factor: float = 10.0
    timeout_floor: float = 30.0
    jobs: int = 1
    operators: object = "all"
    suppress_path: Optional[Path] = None
    include_globs: Optional[Sequence[str]] = None
    exclude_globs: Optional[Sequence[str]] = None
    compile_command: Optional[Sequence[str]] = None
    compile_error_pattern: str = DEFAULT_COMPILE_ERROR_PATTERN
    env: Dict[str, str] = field(default_factory=dict)
    # directories inside the project that workers must not copy (e.g. the run dir)
    skip_paths: Sequence[Path] = ()

    def __post_init__(self) -> None:
        self.project_root = Path(self.project_root)
        self.skip_paths = tuple(Path(p).resolve() for p in self.skip_paths)
        if isinstance(self.build_command, str) or not self.build_command:
            raise ConfigurationError("build command must be a non-empty argument list")
        self.build_command = [str(a) for a in self.build_command]
        if self.compile_command is not None:
            self.compile_command = [str(a) for a in self.compile_command]
        if self.timeout_factor < 1:
            raise ConfigurationError("timeout factor must be at least 1")
        if self.timeout_floor <= 0:
            raise ConfigurationError("timeout floor must be positive")
        if int(self.jobs) < 1:
            raise ConfigurationError("jobs must be at least 1")
        self.jobs = int(self.jobs)
        try:
            re.compile(self.compile_error_pattern)
        except re.error as exc:
            raise ConfigurationError("bad compile error pattern: %s" % exc) from None

    def timeout_for(self, baseline_seconds: float) -> float:
        return max(self.timeout_floor, self.timeout_factor * baseline_seconds)


@dataclass(frozen=True)
class TestResult:
    __test__ = False  # not a pytest class

    test_id: str
    verdict: str


@dataclass(frozen=True)
class MutantOutcome:
    mutant_id: str
    status: str
    killing_tests: Tuple[str, ...] = ()
    wall_time: float = 0.0
    # False when the kill set could not be read from reports
    resolved: bool = True
    note: str = ""

    def to_dict(self) -> dict:
        data = asdict(self)
        data["killing_tests"] = list(self.killing_tests)
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "MutantOutcome":
        return cls(
            data["mutant_id"],
            data["status"],
            tuple(data.get("killing_tests", ())),
            float(data.get("wall_time", 0.0)),
            bool(data.get("resolved", True)),
            data.get("note", ""),
        )


@dataclass(frozen=True)
class Baseline:
    tests: Tuple[str, ...]
    wall_time: float
    timeout: float


# ------------------------------------------------------------------ reports

_SEVERITY = {SKIPPED: 0, PASS: 1, FAIL: 2, ERROR: 3}


def parse_test_report(data) -> List[TestResult]:
    """Parse one JUnit XML document (``<testsuite>`` or ``<testsuites>``)."""
    try:
        root = ET.fromstring(data)
    except ET.ParseError as exc:
        raise ReportParseError(str(exc)) from None
    if root.tag not in ("testsuite", "testsuites"):
        raise ReportParseError("not a JUnit report: <%s>" % root.tag)
    results: Dict[str, str] = {}
    suites = [root] if root.tag == "testsuite" else list(root.iter("testsuite"))
    for suite in suites:
        for case in suite.findall("testcase"):
            name = case.get("name")
            if name is None:
                raise ReportParseError("<testcase> without a name")
            cls = case.get("classname") or suite.get("name") or ""
            if case.find("error") is not None:
                verdict = ERROR
            elif case.find("failure") is not None:
                verdict = FAIL
            elif case.find("skipped") is not None:
                verdict = SKIPPED
            else:
                verdict = PASS
            tid = "%s#%s" % (cls, name)
            old = results.get(tid)
            if old is None or _SEVERITY[verdict] > _SEVERITY[old]:
                results[tid] = verdict
    return [TestResult(t, v) for t, v in sorted(results.items())]


def find_reports(root: Path, pattern: str) -> List[Path]:
    out = []
    for dirpath, dirnames, filenames in os.walk(root):
        dirnames[:] = [d for d in dirnames if d not in _IGNORED_DIRS]
        for name in filenames:
            p = Path(dirpath) / name
            if glob_match(p.relative_to(root).as_posix(), [pattern]):
                out.append(p)
    return sorted(out)


def collect_reports(root: Path, pattern: str) -> Tuple[Dict[str, str], int, int]:
    """Merge every report under ``root``.

    Returns (verdict per test id, files found, files that failed to parse).
    """
    results: Dict[str, str] = {}
    files = find_reports(root, pattern)
    bad = 0
    for path in files:
        try:
            parsed = parse_test_report(path.read_bytes())
        except (ReportParseError, OSError) as exc:
            logger.warning("unreadable test report %s: %s", path, exc)
            bad += 1
            continue
        for r in parsed:
            old = results.get(r.test_id)
            if old is None or _SEVERITY[r.verdict] > _SEVERITY[old]:
                results[r.test_id] = r.verdict
    return results, len(files), bad


# ---------------------------------------------------------------- processes


@dataclass(frozen=True)
class _Completed:
    returncode: Optional[int]
    output: str
    seconds: float
    timed_out: bool


def _run(argv: Sequence[str], cwd: Path, env: Dict[str, str], timeout: Optional[float]) -> _Completed:
    """Run a command in its own process group so a timeout kills the whole tree."""
    start = time.monotonic()
    try:
        proc = subprocess.Popen(
            list(argv),
            cwd=str(cwd),
            env=env,
            stdout=subprocess.PIPE,
            stderr=subprocess.STDOUT,
            start_new_session=True,
        )
    except OSError as exc:
        raise ConfigurationError("cannot run %r: %s" % (argv[0], exc)) from None
    try:
        out, _ = proc.communicate(timeout=timeout)
        timed_out = False
    except subprocess.TimeoutExpired:
        _kill_group(proc)
        out, _ = proc.communicate()
        timed_out = True
    return _Completed(
        None if timed_out else proc.returncode,
        out.decode("utf-8", "replace"),
        time.monotonic() - start,
        timed_out,
    )


def _kill_group(proc: subprocess.Popen) -> None:
    try:
        os.killpg(proc.pid, signal.SIGKILL)
    except (ProcessLookupError, PermissionError):
        proc.kill()


# --------------------------------------------------------------- workspaces


class Workspace:
    """A private copy of the project that one worker uses at a time."""

    def __init__(self, config: RunConfig, root: Path):
        self.config = config
        self.root = Path(root)
        skip = set(config.skip_paths)

        def ignore(directory, names):
            here = Path(directory).resolve()
            return [n for n in names if n in _IGNORED_DIRS or here / n in skip]

        shutil.copytree(config.project_root, self.root, symlinks=True, ignore=ignore)

    def _env(self, mutant_id: str) -> Dict[str, str]:
        env = dict(os.environ)
        env.update(self.config.env)
        env["MUTANT_ID"] = mutant_id
        return env

    def clear_reports(self) -> None:
        for p in find_reports(self.root, self.config.report_glob):
            p.unlink()

    def build(self, mutant_id: str, timeout: Optional[float]) -> _Completed:
        self.clear_reports()
        return _run(self.config.build_command, self.root, self._env(mutant_id), timeout)

    def compile(self, mutant_id: str, timeout: Optional[float]) -> Optional[_Completed]:
        if not self.config.compile_command:
            return None
        return _run(self.config.compile_command, self.root, self._env(mutant_id), timeout)

    def restore(self, rel: str) -> None:
        shutil.copy2(self.config.project_root / rel, self.root / rel)


def _looks_like_compile_error(config: RunConfig, result: _Completed) -> bool:
    return result.returncode != 0 and re.search(config.compile_error_pattern, result.output) is not None


def _tail(text: str, lines: int = 30) -> str:
    return "\n".join(text.rstrip().splitlines()[-lines:])


def run_baseline(config: RunConfig, workspace: Workspace) -> Baseline:
    """Build the unmutated project; any failure here aborts the run."""
    logger.info("running baseline build: %s", " ".join(config.build_command))
    if config.compile_command:
        comp = workspace.compile("baseline", None)
        if comp.returncode != 0:
            raise BaselineError(
                "baseline compile command failed (exit %s):\n%s" % (comp.returncode, _tail(comp.output))
            )
    result = workspace.build("baseline", None)
    results, found, bad = collect_reports(workspace.root, config.report_glob)
    if _looks_like_compile_error(config, result):
        raise BaselineError("baseline build does not compile:\n%s" % _tail(result.output))
    if found == 0:
        if result.returncode != 0:
            raise BaselineError(
                "baseline build failed (exit %s):\n%s" % (result.returncode, _tail(result.output))
            )
        raise ConfigurationError(
            "baseline build produced no test reports matching %r" % config.report_glob
        )
    if bad:
        raise BaselineError("%d baseline test report(s) could not be parsed" % bad)
    failing = sorted(t for t, v in results.items() if v in (FAIL, ERROR))
    if failing:
        raise BaselineError(
            "baseline has %d failing test(s): %s" % (len(failing), ", ".join(failing))
        )
    if result.returncode != 0:
        raise BaselineError(
            "baseline build exited %s although all tests passed:\n%s"
            % (result.returncode, _tail(result.output))
        )
    tests = tuple(sorted(t for t, v in results.items() if v == PASS))
    if not tests:
        raise BaselineError("baseline ran no tests")
    timeout = config.timeout_for(result.seconds)
    logger.info(
        "baseline green: %d tests in %.2fs, per-mutant timeout %.1fs",
        len(tests), result.seconds, timeout,
    )
    return Baseline(tests, result.seconds, timeout)


def execute_mutant(
    config: RunConfig, workspace: Workspace, mutant: Mutant, timeout: float
) -> MutantOutcome:
    """Apply ``mutant`` in ``workspace``, build, classify, and restore."""
    target = workspace.root / mutant.path
    try:
        text = (config.project_root / mutant.path).read_bytes().decode("utf-8")
        mutated = apply_mutant(text, mutant)
    except (StaleMutantError, OSError, UnicodeDecodeError) as exc:
        return MutantOutcome(mutant.id, STALE, note=str(exc))
    began = time.monotonic()
    try:
        target.write_bytes(mutated.encode("utf-8"))
        return _classify(config, workspace, mutant, timeout, began)
    finally:
        workspace.restore(mutant.path)


def _classify(
    config: RunConfig, workspace: Workspace, mutant: Mutant, timeout: float, began: float
) -> MutantOutcome:
    def done(status, killing=(), resolved=True, note=""):
        return MutantOutcome(
            mutant.id, status, tuple(sorted(killing)),
            round(time.monotonic() - began, 3), resolved, note,
        )

    comp = workspace.compile(mutant.id, timeout)
    if comp is not None:
        if comp.timed_out:
            return done(TIMEOUT, note="compile step timed out")
        if comp.returncode != 0:
            return done(STILLBORN, note=_tail(comp.output, 5))

    result = workspace.build(mutant.id, timeout)
    if result.timed_out:
        return done(TIMEOUT, note="exceeded %.1fs" % timeout)
    if _looks_like_compile_error(config, result):
        return done(STILLBORN, note=_tail(result.output, 5))

    results, found, bad = collect_reports(workspace.root, config.report_glob)
    failing = [t for t, v in results.items() if v in (FAIL, ERROR)]
    if failing:
        return done(KILLED, failing, resolved=bad == 0)
    if result.returncode == 0:
        if found == 0:
            return done(SURVIVED, resolved=False, note="build passed without test reports")
        return done(SURVIVED, resolved=bad == 0)
    note = "build exited %s without a failing test in the reports" % result.returncode
    logger.warning("mutant %s: %s", mutant.id, note)
    return done(KILLED, resolved=False, note=note)


def execute_all(
    config: RunConfig,
    mutants: Sequence[Mutant],
    workspace_dir: Optional[Path] = None,
    progress_path: Optional[Path] = None,
) -> Tuple[Baseline, List[MutantOutcome]]:
    """Baseline plus every mutant, ``config.jobs`` at a time.

    Outcomes come back in mutant order regardless of completion order. When
    ``progress_path`` is given, each outcome is appended there as it finishes.
    """
    tmp = tempfile.mkdtemp(prefix="nullforge-", dir=workspace_dir)
    try:
        pool: "queue.Queue[Workspace]" = queue.Queue()
        first = Workspace(config, Path(tmp) / "w0")
        baseline = run_baseline(config, first)
        pool.put(first)
        for k in range(1, min(config.jobs, max(len(mutants), 1))):
            pool.put(Workspace(config, Path(tmp) / ("w%d" % k)))

        def work(m: Mutant) -> MutantOutcome:
            ws = pool.get()
            try:
                return execute_mutant(config, ws, m, baseline.timeout)
            finally:
                pool.put(ws)

        outcomes: Dict[str, MutantOutcome] = {}
        progress = open(progress_path, "w", encoding="utf-8") if progress_path else None
        try:
            with ThreadPoolExecutor(max_workers=config.jobs) as ex:
                futures = {ex.submit(work, m): m for m in mutants}
                for n, fut in enumerate(as_completed(futures), start=1):
                    m = futures[fut]
                    out = fut.result()
                    outcomes[m.id] = out
                    logger.info(
                        "[%d/%d] %s %s %s:%d -> %s",
                        n, len(mutants), m.id, m.operator, m.path, m.line, out.status,
                    )
                    if progress:
                        progress.write(json.dumps(out.to_dict()) + "\n")
                        progress.flush()
        finally:
            if progress:
                progress.close()
        return baseline, [outcomes[m.id] for m in mutants]
    finally:
        shutil.rmtree(tmp, ignore_errors=True)


def write_outcomes_jsonl(outcomes: Iterable[MutantOutcome], path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for o in outcomes:
            fh.write(json.dumps(o.to_dict()) + "\n")


def read_outcomes_jsonl(path) -> List[MutantOutcome]:
    out = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.strip():
            out.append(MutantOutcome.from_dict(json.loads(line)))
    return out


def load_suppressions(path) -> Dict[str, str]:
    """Read a suppression file: one mutant id per line, ``#`` starts a comment.

    Returns {mutant id: comment text}.
    """
    out: Dict[str, str] = {}
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        body, _, comment = raw.partition("#")
        body = body.strip()
        if body:
            out[body.split()[0]] = comment.strip()
    return out
