"""End-to-end runs of `verify` through main.main()."""
from __future__ import annotations

import json

import pytest

import main


def _run(tmp_path, small_config, *flags, name="report.json"):
    out = tmp_path / name
    code = main.main(["verify", "--config", str(small_config), "--out", str(out), *flags])
    return code, out


def _checks(report: dict) -> dict:
    return {c["name"]: c for c in report["checks"]}


def test_singular_t_exits_with_usage_error(tmp_path, small_config):
    code, out = _run(tmp_path, small_config, "--t", "1+0i")
    assert code == 2
    assert not out.exists()


def test_bad_flag_exits_with_usage_error():
    assert main.main(["verify", "--mode", "fast"]) == 2


def test_help_exits_cleanly():
    assert main.main(["--help"]) == 0


def test_exact_run_passes(tmp_path, small_config):
    code, out = _run(tmp_path, small_config, "--mode", "exact")
    report = json.loads(out.read_text(encoding="utf-8"))
    assert code == 0
    assert report["summary"]["verdict"] == "pass"
    checks = _checks(report)
    for name in ("identity.I1", "identity.I2", "group_law.t4_chain", "sections.exact", "riccati.singularities"):
        assert checks[name]["status"] == "pass"
    assert checks["typo_probe.T1"]["status"] == "pass"


def test_runs_are_deterministic(tmp_path, small_config):
    _, first = _run(tmp_path, small_config, "--mode", "exact", "--seed", "5", name="a.json")
    _, second = _run(tmp_path, small_config, "--mode", "exact", "--seed", "5", name="b.json")
    a = json.loads(first.read_text(encoding="utf-8"))
    b = json.loads(second.read_text(encoding="utf-8"))
    a.pop("created_at")
    b.pop("created_at")
    assert a == b


def test_report_schema(tmp_path, small_config):
    _, out = _run(tmp_path, small_config, "--mode", "exact", "--seed", "3")
    report = json.loads(out.read_text(encoding="utf-8"))
    assert {"schema_version", "version", "seed", "config", "summary", "checks", "created_at"} <= set(report)
    assert report["seed"] == 3
    assert report["config"]["mode"] == "exact"
    for check in report["checks"]:
        assert check["status"] in ("pass", "fail", "error")
        assert isinstance(check["mandatory"], bool)


@pytest.mark.slow
def test_numeric_run_passes(tmp_path, small_config):
    code, out = _run(tmp_path, small_config, "--mode", "numeric")
    report = json.loads(out.read_text(encoding="utf-8"))
    checks = _checks(report)
    failing = {name: c["status"] for name, c in checks.items() if c["status"] != "pass" and c["mandatory"]}
    assert failing == {}
    assert report["summary"]["verdict"] == "pass"
    assert code == 0
    for name in ("monodromy.battery", "monodromy.composition", "monodromy.orbits", "transport.drift"):
        assert checks[name]["status"] == "pass"
    for name in ("harmonic.sweep", "curvature.calibration", "pullback.integral"):
        assert name in checks


@pytest.mark.slow
def test_control_web_fails_the_run(tmp_path, small_config):
    code, out = _run(tmp_path, small_config, "--mode", "numeric", "--control-web")
    report = json.loads(out.read_text(encoding="utf-8"))
    assert code == 1
    assert _checks(report)["curvature.control"]["status"] == "fail"


def test_plots_are_written(tmp_path, small_config):
    plot_dir = tmp_path / "figures"
    code, out = _run(tmp_path, small_config, "--mode", "exact", "--plot", "orbits",
                     "--plot", "discriminant", "--plot-dir", str(plot_dir))
    assert code == 0
    for kind in ("orbits", "discriminant"):
        assert (plot_dir / f"{kind}.csv").is_file()
        assert (plot_dir / f"{kind}.svg").is_file()
