import sys

import pytest

from nullforge.config import load_config
from nullforge.operators import ConfigurationError

from conftest import VIDEOSTORE


def write(tmp_path, text):
    p = tmp_path / "nullforge.toml"
    p.write_text(text)
    return p


def test_full_config(tmp_path):
    cfg = load_config(write(tmp_path, """
[project]
root = "proj"
build = ["{python}", "build.py"]
report_glob = "out/TEST-*.xml"
include = "src/**/*.java"
exclude = ["**/gen/**"]

[run]
operators = ["NegateNullCheck"]
jobs = 3
timeout_factor = 4
suppress = "eq.txt"
format = "md"
"""))
    assert cfg.root == (tmp_path / "proj").resolve()
    assert cfg.build == [sys.executable, "build.py"]
    assert cfg.include == ["src/**/*.java"] and cfg.exclude == ["**/gen/**"]
    assert (cfg.jobs, cfg.timeout_factor, cfg.timeout_floor) == (3, 4.0, None)
    assert cfg.suppress == tmp_path.resolve() / "eq.txt"
    assert cfg.format == ["md"]
    assert cfg.operators == ["NegateNullCheck"]


def test_empty_config_defaults_root_to_file_dir(tmp_path):
    cfg = load_config(write(tmp_path, ""))
    assert cfg.root == tmp_path.resolve() and cfg.build is None


@pytest.mark.parametrize(
    "text, needle",
    [
        ("[project]\nbiuld = ['x']\n", "project.biuld"),
        ("[extra]\n", "extra"),
        ("[project]\nbuild = 'make test'\n", "project.build"),
        ("[run]\njobs = 'many'\n", "run.jobs"),
        ("[project\n", "nullforge.toml"),
    ],
)
def test_bad_configs(tmp_path, text, needle):
    with pytest.raises(ConfigurationError, match=needle.replace(".", r"\.")):
        load_config(write(tmp_path, text))


def test_missing_file(tmp_path):
    with pytest.raises(ConfigurationError, match="not found"):
        load_config(tmp_path / "nope.toml")


def test_fixture_config_loads():
    cfg = load_config(VIDEOSTORE / "nullforge.toml")
    assert cfg.root == VIDEOSTORE.resolve()
    assert cfg.suppress.name == "equivalent.txt" and cfg.suppress.is_file()
