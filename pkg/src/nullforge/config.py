"""Project configuration file (``nullforge.toml``).

Example::

    [project]
    root = "."                        # relative to this file
    build = ["{python}", "build.py"]  # argv; "{python}" is the running interpreter
    compile = ["mvn", "-q", "compile"]  # optional, separates stillborn mutants
    report_glob = "target/surefire-reports/TEST-*.xml"
    include = ["src/main/java/**/*.java"]
    exclude = ["**/generated/**"]

    [run]
    operators = "all"                 # or a family, or a list of operator ids
    jobs = 2
    timeout_factor = 10
    timeout_floor = 30
    suppress = "equivalent.txt"
    out = "nullforge-out"
    format = ["json", "csv", "md"]

Every key is optional and every one can be overridden on the command line.
"""
from __future__ import annotations

import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover - exercised on 3.10
    import tomli as tomllib

from .operators import ConfigurationError

CONFIG_NAME = "nullforge.toml"

_PROJECT_KEYS = {"root", "build", "compile", "report_glob", "include", "exclude", "compile_error_pattern"}
_RUN_KEYS = {"operators", "jobs", "timeout_factor", "timeout_floor", "suppress", "out", "format"}


@dataclass
class FileConfig:
    path: Optional[Path] = None
    root: Optional[Path] = None
    build: Optional[List[str]] = None
    compile: Optional[List[str]] = None
    report_glob: Optional[str] = None
    include: Optional[List[str]] = None
    exclude: Optional[List[str]] = None
    compile_error_pattern: Optional[str] = None
    operators: object = None
    jobs: Optional[int] = None
    timeout_factor: Optional[float] = None
    timeout_floor: Optional[float] = None
    suppress: Optional[Path] = None
    out: Optional[Path] = None
    format: Optional[List[str]] = field(default=None)


def expand_argv(argv: List[str]) -> List[str]:
    return [sys.executable if a == "{python}" else a for a in argv]


def _argv(value, key: str) -> List[str]:
    if not isinstance(value, list) or not value or not all(isinstance(v, str) for v in value):
        raise ConfigurationError("%s must be a non-empty list of strings" % key)
    return expand_argv(value)


def _strings(value, key: str) -> List[str]:
    if isinstance(value, str):
        return [value]
    if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
        raise ConfigurationError("%s must be a string or a list of strings" % key)
    return list(value)


def load_config(path) -> FileConfig:
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except FileNotFoundError:
        raise ConfigurationError("config file not found: %s" % path) from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigurationError("%s: %s" % (path, exc)) from None

    unknown = set(data) - {"project", "run"}
    project = data.get("project", {})
    run = data.get("run", {})
    unknown |= {"project." + k for k in set(project) - _PROJECT_KEYS}
    unknown |= {"run." + k for k in set(run) - _RUN_KEYS}
    if unknown:
        raise ConfigurationError("%s: unknown key(s) %s" % (path, ", ".join(sorted(unknown))))

    base = path.resolve().parent
    cfg = FileConfig(path=path)
    cfg.root = (base / project.get("root", ".")).resolve()
    if "build" in project:
        cfg.build = _argv(project["build"], "project.build")
    if "compile" in project:
        cfg.compile = _argv(project["compile"], "project.compile")
    if "report_glob" in project:
        cfg.report_glob = str(project["report_glob"])
    if "include" in project:
        cfg.include = _strings(project["include"], "project.include")
    if "exclude" in project:
        cfg.exclude = _strings(project["exclude"], "project.exclude")
    if "compile_error_pattern" in project:
        cfg.compile_error_pattern = str(project["compile_error_pattern"])

    if "operators" in run:
        cfg.operators = run["operators"]
    for key, conv in (("jobs", int), ("timeout_factor", float), ("timeout_floor", float)):
        if key in run:
            try:
                setattr(cfg, key, conv(run[key]))
            except (TypeError, ValueError):
                raise ConfigurationError("run.%s must be a number" % key) from None
    if "suppress" in run:
        cfg.suppress = base / run["suppress"]
    if "out" in run:
        cfg.out = base / run["out"]
    if "format" in run:
        cfg.format = _strings(run["format"], "run.format")
    return cfg
