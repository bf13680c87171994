import shutil
import sys
import textwrap
import time
from pathlib import Path

import pytest

import nullforge
from nullforge.harness import RunConfig, execute_all
from nullforge.operators import OPERATOR_IDS, generate_mutants
from nullforge.source_model import locate_project_sites, scan_project

VIDEOSTORE = Path(nullforge.__file__).parent / "fixtures" / "videostore"
SUPPRESS = VIDEOSTORE / "equivalent.txt"
REPORT_GLOB = "build/test-reports/TEST-*.xml"


def _have_java() -> bool:
    if shutil.which("java"):
        return True
    try:
        import jdk4py  # noqa: F401
    except ImportError:
        return False
    return True


needs_java = pytest.mark.skipif(not _have_java(), reason="no Java runtime (pip install jdk4py)")


def videostore_config(root=VIDEOSTORE, suite="nadq", **kw) -> RunConfig:
    return RunConfig(root, [sys.executable, "build.py", "--suite", suite], REPORT_GLOB, **kw)


def videostore_mutants(root=VIDEOSTORE, operators=OPERATOR_IDS):
    sites, errors = locate_project_sites(scan_project(root), operators)
    assert errors == []
    return generate_mutants(sites)


class FixtureRun:
    def __init__(self, suite):
        self.suite = suite
        self.mutants = videostore_mutants()
        start = time.monotonic()
        self.baseline, self.outcomes = execute_all(videostore_config(suite=suite), self.mutants)
        self.seconds = time.monotonic() - start
        self.by_id = {o.mutant_id: o for o in self.outcomes}

    def find(self, path_suffix, operator, original_prefix):
        hits = [
            m for m in self.mutants
            if m.path.endswith(path_suffix) and m.operator == operator and m.original.startswith(original_prefix)
        ]
        return hits


@pytest.fixture(scope="session")
def tadq_run():
    return FixtureRun("tadq")


@pytest.fixture(scope="session")
def nadq_run():
    return FixtureRun("nadq")


def write_java_project(root: Path, main: dict, tests: dict) -> Path:
    """A tiny Janino-built project sharing the VideoStore build script and runner."""
    root = Path(root)
    (root / "src" / "test" / "java").mkdir(parents=True)
    shutil.copy(VIDEOSTORE / "build.py", root / "build.py")
    shutil.copytree(VIDEOSTORE / "lib", root / "lib")
    shutil.copytree(VIDEOSTORE / "src" / "test" / "java" / "junitlite", root / "src" / "test" / "java" / "junitlite")
    for rel, text in main.items():
        p = root / "src" / "main" / "java" / rel
        p.parent.mkdir(parents=True, exist_ok=True)
        p.write_text(textwrap.dedent(text))
    for rel, text in tests.items():
        p = root / "src" / "test" / "java" / rel
        p.parent.mkdir(parents=True, exist_ok=True)
        p.write_text(textwrap.dedent(text))
    return root


# A fake project whose "build" is a Python script that judges the Java source
# by string matching, so harness logic runs in milliseconds without a JVM:
#   "return null;" anywhere       -> compile error (exit 3)
#   "a + b" twice (sub mutated)   -> hangs
#   testAdd/testSub/testLess pass while their expression is intact
#   testName always passes, so mutants of name() that compile survive
FAKE_BUILD = r'''
import os, sys, time
from pathlib import Path
src = Path("src/main/java/demo/Calc.java").read_text()
with open("mutant_ids.log", "a") as log:
    log.write(os.environ.get("MUTANT_ID", "") + "\n")
if "return null;" in src:
    print("COMPILATION ERROR in demo.Calc")
    sys.exit(3)
if src.count("a + b") == 2:
    time.sleep(60)
checks = {
    "testAdd": "a + b" in src,
    "testSub": "a - b" in src,
    "testLess": "x < y" in src,
    "testName": True,
}
if os.environ.get("FAKE_RED"):
    checks["testSub"] = False
out = Path("reports")
out.mkdir(exist_ok=True)
cases = "".join(
    '<testcase classname="demo.CalcTest" name="%s">%s</testcase>'
    % (name, "" if ok else '<failure message="boom"/>')
    for name, ok in sorted(checks.items())
)
(out / "TEST-demo.CalcTest.xml").write_text("<testsuite name='demo.CalcTest'>%s</testsuite>" % cases)
sys.exit(0 if all(checks.values()) else 1)
'''

FAKE_CALC = """\
package demo;

public class Calc {
    public int add(int a, int b) {
        return a + b;
    }

    public int sub(int a, int b) {
        return a - b;
    }

    public boolean less(int x, int y) {
        return x < y;
    }

    public String name(String s) {
        return new String(s);
    }
}
"""


@pytest.fixture
def fake_project(tmp_path):
    root = tmp_path / "fake"
    (root / "src" / "main" / "java" / "demo").mkdir(parents=True)
    (root / "build.py").write_text(FAKE_BUILD)
    (root / "src" / "main" / "java" / "demo" / "Calc.java").write_text(FAKE_CALC)
    return root


def fake_config(root, **kw) -> RunConfig:
    kw.setdefault("report_glob", "reports/TEST-*.xml")
    return RunConfig(root, [sys.executable, "build.py"], **kw)


def fake_mutants(root):
    sites, errors = locate_project_sites(scan_project(root), OPERATOR_IDS)
    assert errors == []
    return generate_mutants(sites)


# ---------------------------------------------------------------- acceptance summary

_CRITERIA = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    entry = _CRITERIA.setdefault(number, [title, "PASS"])
    if report.failed or (report.skipped and report.when != "teardown"):
        entry[1] = "SKIP" if report.skipped and entry[1] == "PASS" else "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, verdict = _CRITERIA[number]
        terminalreporter.write_line("criterion %d: %s ... %s" % (number, title, verdict))
