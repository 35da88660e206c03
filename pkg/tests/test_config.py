from __future__ import annotations

import pytest

from config import build_suite_config, load_config_file, parse_bool, parse_region
from core.exact_field import ExactScalar
from core.exceptions import ConfigError


def test_defaults_validate():
    config = build_suite_config({"out": None})
    assert config.mode in ("numeric", "exact", "both")
    assert config.workers >= 1


def test_flags_override_the_file(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("t=4\nseed=3\nmode=numeric\n", encoding="utf-8")
    config = build_suite_config({"seed": 11}, path)
    assert config.t == ExactScalar(4)
    assert config.seed == 11
    assert config.mode == "numeric"


@pytest.mark.parametrize("t", ["1+0i", "0", "1"])
def test_singular_t_is_a_config_error(t):
    with pytest.raises(ConfigError):
        build_suite_config({"t": t})


def test_unknown_config_key(tmp_path):
    path = tmp_path / "bad.cfg"
    path.write_text("samples=4\ncolour=blue\n", encoding="utf-8")
    with pytest.raises(ConfigError, match="colour"):
        load_config_file(path)


def test_missing_config_file(tmp_path):
    with pytest.raises(ConfigError):
        build_suite_config({}, tmp_path / "absent.cfg")


@pytest.mark.parametrize(
    "overrides",
    [{"samples": "0"}, {"mode": "fast"}, {"region": "1,0,0,1"}, {"tol": "-1"}, {"plots": "leaves,maps"}],
)
def test_invalid_values(overrides):
    with pytest.raises(ConfigError):
        build_suite_config(overrides)


def test_value_parsers():
    assert parse_region("-1,2,-3,4") == (-1.0, 2.0, -3.0, 4.0)
    assert parse_bool("yes") is True
    assert parse_bool("off") is False
    with pytest.raises(ConfigError):
        parse_region("1,2,3")
    with pytest.raises(ConfigError):
        parse_bool("maybe")


def test_loops_are_pipe_separated(tmp_path):
    path = tmp_path / "loops.cfg"
    path.write_text("loops=1+3i; lasso(0); lasso(t)|1+3i; lasso(1); lasso(1)\n", encoding="utf-8")
    config = build_suite_config({}, path)
    assert len(config.loops) == 2
