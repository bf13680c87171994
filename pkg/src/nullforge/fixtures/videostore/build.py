"""Compile and test the VideoStore project using only a Java runtime.

Sources are compiled in memory by the bundled Janino compiler, so no JDK is
needed. Reports land in build/test-reports/TEST-<class>.xml.

    python build.py [--suite orig|tadq|nadq] [--tests CLASS ...]

Exit status: 0 green, 1 test failures, 3 compilation error.
"""
import argparse
import os
import shutil
import subprocess
import sys
from pathlib import Path

HERE = Path(__file__).resolve().parent
MAIN = HERE / "src" / "main" / "java"
TEST = HERE / "src" / "test" / "java"
REPORTS = HERE / "build" / "test-reports"
LIB = HERE / "lib"

SUITES = {
    "orig": ["videostore.VideoStoreTest"],
    "tadq": ["videostore.VideoStoreTest", "videostore.TraditionalAdequacyTest"],
    "nadq": [
        "videostore.VideoStoreTest",
        "videostore.TraditionalAdequacyTest",
        "videostore.NullAdequacyTest",
    ],
}


def find_java():
    if os.environ.get("JAVA"):
        return os.environ["JAVA"]
    if os.environ.get("JAVA_HOME"):
        candidate = Path(os.environ["JAVA_HOME"]) / "bin" / "java"
        if candidate.exists():
            return str(candidate)
    on_path = shutil.which("java")
    if on_path:
        return on_path
    try:
        import jdk4py
    except ImportError:
        sys.exit("build.py: no java runtime found (set JAVA_HOME or pip install jdk4py)")
    return str(jdk4py.JAVA)


def production_classes():
    return sorted(
        ".".join(p.relative_to(MAIN).with_suffix("").parts) for p in MAIN.rglob("*.java")
    )


def main(argv=None):
    parser = argparse.ArgumentParser()
    parser.add_argument("--suite", choices=sorted(SUITES), default="nadq")
    parser.add_argument("--tests", nargs="+", metavar="CLASS", help="test classes to run instead of a suite")
    args = parser.parse_args(argv)
    tests = args.tests or SUITES[args.suite]

    shutil.rmtree(REPORTS, ignore_errors=True)
    classpath = os.pathsep.join(str(j) for j in sorted(LIB.glob("*.jar")))
    cmd = [
        find_java(),
        "-XX:TieredStopAtLevel=1",
        "-XX:+UseSerialGC",
        "-cp",
        classpath,
        "org.codehaus.janino.JavaSourceClassLoader",
        "-sourcepath",
        os.pathsep.join([str(MAIN), str(TEST)]),
        "junitlite.Runner",
        str(REPORTS),
        "--load",
        *production_classes(),
        "--tests",
        *tests,
    ]
    return subprocess.call(cmd, cwd=HERE)


if __name__ == "__main__":
    sys.exit(main())
