"""End-to-end command line checks, run in-process through cli.run."""

import json
import math

import pytest

from polyliouville.cli import run

LOG2 = repr(math.log(2.0))


def read(path):
    with open(path, "rb") as fh:
        return fh.read()


def test_constants_prints_exact_gamma(capsys):
    assert run(["constants", "--m", "2"]) == 0
    out = capsys.readouterr().out
    assert "gamma_m = 8 * pi^2" in out
    assert "sigma_m = 1" in out


def test_pizzetti_all_exact(capsys):
    assert run(["pizzetti", "--m", "2", "--n", "4", "--cases", "100", "--seed", "3"]) == 0
    assert "100/100 exact" in capsys.readouterr().out


def test_green_m2_report(capsys):
    assert run(["green", "--m", "2"]) == 0
    out = capsys.readouterr().out
    assert "log coefficient: -1/8 * pi^-2" in out
    assert "r^2 coefficient: 1/32 * pi^-2" in out
    assert "Navier boundary residuals exactly zero: True" in out
    assert "> 0" in out


def test_shoot_writes_classified_report(tmp_path, capsys):
    rc = run(
        ["shoot", "--m", "2", "--u0", LOG2, "--d2", "-3", "--out", str(tmp_path)]
    )
    assert rc == 0
    out = capsys.readouterr().out
    assert "overall = nonstandard" in out
    blob = json.loads(read(tmp_path / "report.json"))
    assert blob["termination"] == "reached_end"
    assert blob["classification"]["overall"] == "nonstandard"
    assert abs(blob["alpha_final"] - 0.21332616180327657) < 1e-9
    header = read(tmp_path / "trajectory.csv").splitlines()[0]
    assert header == b"r,w0,p0,w1,p1,alpha_R,R_scalar"


def test_shoot_is_deterministic(tmp_path):
    a = tmp_path / "a"
    b = tmp_path / "b"
    a.mkdir()
    b.mkdir()
    args = ["shoot", "--m", "2", "--u0", LOG2, "--d2", "-2.5", "--r-end", "400"]
    assert run(args + ["--out", str(a)]) == 0
    assert run(args + ["--out", str(b)]) == 0
    assert read(a / "trajectory.csv") == read(b / "trajectory.csv")
    assert read(a / "report.json") == read(b / "report.json")


def test_unknown_flag_exits_2():
    assert run(["shoot", "--m", "2", "--u0", "0.0", "--frobnicate"]) == 2


def test_represent_on_blowup_exits_3(tmp_path, capsys):
    rc = run(
        [
            "represent",
            "--m",
            "2",
            "--u0",
            LOG2,
            "--d2",
            "2.0",
            "--r-end",
            "50",
            "--out",
            str(tmp_path),
        ]
    )
    assert rc == 3
    assert "numerical failure" in capsys.readouterr().err


def test_represent_writes_profile(tmp_path):
    rc = run(
        [
            "represent",
            "--m",
            "2",
            "--u0",
            LOG2,
            "--d2",
            "-2.0",
            "--points",
            "12",
            "--out",
            str(tmp_path),
        ]
    )
    assert rc == 0
    header = read(tmp_path / "v_profile.csv").splitlines()[0]
    assert header == b"r,v,err_bar"
    fit = json.loads(read(tmp_path / "fit.json"))
    assert "inferred_degree" in fit


def test_config_file_and_explicit_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(f"m=2\nu0={math.log(2.0)!r}\nd2=-3.0\nr-end=150.0\n")
    out1 = tmp_path / "one"
    out1.mkdir()
    assert run(["shoot", "--config", str(cfg), "--out", str(out1)]) == 0
    blob = json.loads(read(out1 / "report.json"))
    assert blob["r_reached"] == pytest.approx(150.0)
    out2 = tmp_path / "two"
    out2.mkdir()
    # explicit flag wins over the config value
    assert run(
        ["shoot", "--config", str(cfg), "--r-end", "200", "--out", str(out2)]
    ) == 0
    blob2 = json.loads(read(out2 / "report.json"))
    assert blob2["r_reached"] == pytest.approx(200.0)


def test_classify_writes_json(tmp_path, capsys):
    rc = run(
        ["classify", "--m", "2", "--u0", LOG2, "--d2", "-3", "--out", str(tmp_path)]
    )
    assert rc == 0
    blob = json.loads(read(tmp_path / "classification.json"))
    assert blob["overall"] == "nonstandard"
    names = [entry["name"] for entry in blob["criteria"]]
    assert names == ["ii", "iii", "iv", "v", "vi"]


def test_a2m_check_passes(capsys):
    assert run(["a2m-check", "--m", "1"]) == 0
    out = capsys.readouterr().out
    assert "PASS" in out
    assert "FAIL" not in out


def test_reproduce_paper_all_rows_pass(tmp_path, capsys):
    rc = run(["reproduce-paper", "--jobs", "2", "--out", str(tmp_path)])
    out = capsys.readouterr().out
    assert rc == 0
    assert "FAIL" not in out
    assert "gamma-identity m=1..10: PASS" in out
    assert "Pizzetti 200/200: PASS" in out
    assert "Green signs m<=5: PASS" in out
    summary = read(tmp_path / "summary.csv").decode().splitlines()
    assert summary[0].endswith(",ok")
    rows = [line.rsplit(",", 1) for line in summary[1:]]
    assert len(rows) == 5
    assert all(flag == "True" for _, flag in rows)
