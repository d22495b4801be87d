import numpy as np
import pytest

from dampwave.cli import EXIT_CONFIG, EXIT_FAIL, EXIT_OK, main, write_atomic
from dampwave.config import ConfigError, ScenarioConfig, build_config, parse_config_text, parse_q
from dampwave.core import INF, GridFunction
from dampwave.scenarios import SCENARIOS, jobs_for


def test_parse_config_text():
    text = """
    # comment line
    p = 2.5   # trailing comment
    q = 1, inf
    dx = auto
    checks = ode_residuals
    nonlinear = yes
    t0-sweep = 10, 20
    """
    vals = parse_config_text(text)
    assert vals["p"] == 2.5
    assert vals["q"] == (1.0, INF)
    assert vals["dx"] is None
    assert vals["checks"] == ("ode_residuals",)
    assert vals["nonlinear"] is True
    assert vals["t0_sweep"] == (10.0, 20.0)


@pytest.mark.parametrize("text", ["nonsense", "colour = red", "p = two", "q = 0.5", "nonlinear = maybe"])
def test_bad_config_lines(text):
    with pytest.raises(ConfigError):
        parse_config_text(text)


def test_config_round_trip():
    cfg = build_config("rho = 1.25\nq = 2, inf\n", scenario="rates", jobs=2)
    again = build_config(cfg.to_text())
    assert again == cfg


def test_config_validation():
    with pytest.raises(ConfigError):
        build_config("p = 0.5")
    with pytest.raises(ConfigError):
        build_config("dx = 0.1\ndt = 0.2")
    with pytest.raises(ConfigError):
        build_config("jobs = 0")
    assert parse_q("INF") is INF
    assert ScenarioConfig().resolved(0.05, 200.0) == (0.05, 0.9 * 0.05, 200.0)


def test_jobs_lookup():
    assert [n for n, _ in jobs_for("ode-check")] == ["ode_residuals", "ode_derivatives"]
    assert len(jobs_for("all")) == sum(len(v) for v in SCENARIOS.values())
    with pytest.raises(ConfigError):
        jobs_for("nope")
    with pytest.raises(ConfigError):
        jobs_for("ode-check", ("cone_limit",))


def test_ode_check_writes_artifacts(tmp_path):
    out = tmp_path / "ode"
    assert main(["ode-check", "--out", str(out)]) == EXIT_OK
    report = (out / "report.csv").read_text().splitlines()
    assert report[0] == "check,passed,worst_value,t,x,constant"
    assert all(",true," in line for line in report[1:])
    rows = (out / "ode_residuals.csv").read_text().splitlines()
    assert len(rows) == 1 + 4 * 3 * 2 * 64
    assert "scenario = ode-check" in (out / "config.txt").read_text()
    assert (out / "summary.txt").read_text().startswith("scenario: ode-check")


def test_simulate_linear_writes_snapshots(tmp_path):
    out = tmp_path / "sim"
    assert main(["simulate", "--out", str(out), "--dx", "0.04", "--t-final", "4"]) == EXIT_OK
    snaps = sorted(out.glob("snapshot_t*.csv"))
    assert len(snaps) == 3
    assert snaps[-1].read_text().startswith("# t=")
    f = GridFunction.from_csv(snaps[-1])
    assert np.all(np.isfinite(f.values))
    assert "linf_error" in (out / "linear_error.csv").read_text()
    assert "min_value_seen" in (out / "simulate_meta.txt").read_text()


def test_simulate_nonlinear(tmp_path):
    out = tmp_path / "nl"
    assert main(["simulate", "--nonlinear", "--out", str(out), "--dx", "0.05", "--t-final", "2"]) == EXIT_OK
    assert "simulate_nonlinear" in (out / "report.csv").read_text()


def test_config_file_and_overrides(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("checks = cone_limit\np = 3.0\n")
    out = tmp_path / "k"
    assert main(["kernel-check", "--config", str(cfg), "--p", "2.0", "--out", str(out)]) == EXIT_OK
    resolved = (out / "config.txt").read_text()
    assert "p = 2.0" in resolved and "checks = cone_limit" in resolved
    assert (out / "report.csv").read_text().count("\n") == 2


def test_config_errors_exit_2(tmp_path, capsys):
    assert main(["ode-check", "--out", str(tmp_path), "--p", "0.9"]) == EXIT_CONFIG
    assert main(["ode-check", "--out", str(tmp_path), "--checks", "bogus"]) == EXIT_CONFIG
    assert main(["ode-check", "--config", str(tmp_path / "missing.cfg")]) == EXIT_CONFIG
    assert main(["simulate", "--out", str(tmp_path), "--dx", "0.01", "--dt", "0.02"]) == EXIT_CONFIG
    assert "config error" in capsys.readouterr().err


def _failing_job(cfg):
    from dampwave.core import CheckReport
    from dampwave.scenarios import JobResult

    return JobResult([CheckReport("always_fails", False, 2.0, (1.0, 0.0))])


def test_failing_check_exit_1(tmp_path, capsys, monkeypatch):
    monkeypatch.setitem(SCENARIOS, "ode-check", {"always_fails": _failing_job})
    assert main(["ode-check", "--out", str(tmp_path)]) == EXIT_FAIL
    assert "always_fails" in capsys.readouterr().err
    assert "always_fails,false,2" in (tmp_path / "report.csv").read_text()


def test_run_error_exit_1(tmp_path, capsys, monkeypatch):
    def boom(cfg):
        raise RuntimeError("kaput")

    monkeypatch.setitem(SCENARIOS, "ode-check", {"boom": boom})
    assert main(["ode-check", "--out", str(tmp_path)]) == EXIT_FAIL
    assert "kaput" in capsys.readouterr().err


def test_rates_rejects_short_horizon(tmp_path):
    assert main(["rates", "--out", str(tmp_path), "--t-final", "50"]) == EXIT_CONFIG


def test_write_atomic(tmp_path):
    p = tmp_path / "a" / "b.txt"
    write_atomic(p, "x\n")
    write_atomic(p, "y\n")
    assert p.read_text() == "y\n"
    assert [q.name for q in p.parent.iterdir()] == ["b.txt"]


def test_outputs_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    args = ["kernel-check", "--jobs", "2"]
    assert main(args + ["--out", str(a)]) == EXIT_OK
    assert main(args + ["--out", str(b)]) == EXIT_OK
    for f in a.glob("*.csv"):
        assert f.read_bytes() == (b / f.name).read_bytes()
