import json

import pytest

from rattling.cli import main


def test_help(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--help"])
    assert exc.value.code == 0
    assert "simulate" in capsys.readouterr().out


def test_simulate_outputs(tmp_path, capsys):
    stem = tmp_path / "run"
    rc = main(["simulate", "--h2", "1", "--events", "24", "--epsilon", "0.1",
               "--profile-times", "10", "--out", str(stem)])
    assert rc == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["events"] == 24
    assert (tmp_path / "run.csv").read_text().startswith("node,time,tau\n")
    meta = json.loads((tmp_path / "run.json").read_text())
    assert meta["method"] == "event-driven" and "bounds" in meta
    assert (tmp_path / "run_report.json").exists()
    assert (tmp_path / "run_omega.csv").exists()
    assert (tmp_path / "run_profile.csv").read_text().startswith("n,t,u\n")


def test_simulate_deterministic(tmp_path):
    for name in ("a", "b"):
        assert main(["simulate", "--events", "12", "--out", str(tmp_path / name)]) == 0
    for suffix in (".csv", ".json"):
        assert (tmp_path / f"a{suffix}").read_bytes() == (tmp_path / f"b{suffix}").read_bytes()


def test_stepper_method(tmp_path):
    assert main(["simulate", "--events", "8", "--method", "stepper", "--out", str(tmp_path / "s")]) == 0
    assert json.loads((tmp_path / "s.json").read_text())["method"] == "time-stepper"


@pytest.mark.parametrize(
    "argv",
    [
        ["simulate", "--c", "0.6", "--events", "5"],
        ["simulate", "--h2", "-1", "--events", "5"],
        ["simulate"],
        ["astar", "--lambda", "1.5"],
        ["pattern", "--alpha", "3/2"],
    ],
)
def test_config_errors(argv, tmp_path, capsys):
    assert main(argv + ["--out", str(tmp_path / "x")] if argv[0] != "astar" else argv) == 2
    assert "error" in capsys.readouterr().err


def test_astar(tmp_path):
    out = tmp_path / "a.csv"
    prof = tmp_path / "p.csv"
    assert main(["astar", "--lambda", "10", "--out", str(out), "--profiles", str(prof)]) == 0
    rows = out.read_text().splitlines()
    assert len(rows) == 2 and rows[1].startswith("10.0,")
    assert prof.read_text().startswith("x,F_a=0.2")


def test_pattern(tmp_path, capsys):
    stem = tmp_path / "pat"
    assert main(["pattern", "--alpha", "1/2", "--beta", "1/4", "--nmax", "40",
                 "--window", "1", "1", "--out", str(stem)]) == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["window"]["holds"] is True
    assert json.loads((tmp_path / "pat.json").read_text())["alpha"] == "1/2"
    metric = (tmp_path / "pat_metric.csv").read_text().splitlines()
    assert metric[0] == "n,p,metric" and metric[1].startswith("4,1,")


def test_counterexample(tmp_path, capsys):
    assert main(["pattern", "--counterexample", "--levels", "6", "--out", str(tmp_path / "ce")]) == 0
    rows = (tmp_path / "ce_counterexample.csv").read_text().splitlines()
    assert rows[0] == "j,M_j,m_j,density,sampled_metric"
    assert len(rows) == 7
    desc = json.loads((tmp_path / "ce.json").read_text())
    assert desc["counterexample_levels"] == 6 and desc["start"] == "1/3"


def test_selftest(capsys):
    assert main(["selftest"]) == 0
    assert "specfun PASS" in capsys.readouterr().out
    assert main(["selftest", "--group", "integrals", "--strict", "1e-13"]) == 3
