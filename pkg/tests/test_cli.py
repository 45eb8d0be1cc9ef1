import csv
import io
import shutil
from pathlib import Path

import pytest

from nlspread.cli import main

SCENARIOS = Path(__file__).resolve().parents[1] / "scenarios"


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_speeds_right_only(capsys):
    code, out, _ = run(capsys, "speeds", "--config", str(SCENARIOS / "uniform.cfg"))
    assert code == 0
    row = rows(out)[0]
    assert row["class"] == "RightOnly"
    assert 0 < float(row["c_l"]) < float(row["c_r"])


def test_speeds_bidirectional_at_large_sigma(capsys):
    code, out, _ = run(capsys, "speeds", "--config", str(SCENARIOS / "uniform.cfg"),
                       "--set", "kernel.v=uniform(lower=-2, upper=2)")
    assert code == 0 and rows(out)[0]["class"] == "Bidirectional"


def test_speeds_symmetric(capsys):
    _, out, _ = run(capsys, "speeds", "--config", str(SCENARIOS / "symmetric.cfg"))
    row = rows(out)[0]
    assert abs(float(row["c_l"]) + float(row["c_r"])) < 1e-9


def test_classify(capsys):
    code, out, _ = run(capsys, "classify", "--config", str(SCENARIOS / "uniform.cfg"))
    row = rows(out)[0]
    assert code == 0 and row["class"] == "RightOnly" and float(row["lambda_hi"]) < 0


def test_kappa_and_sigma_star(capsys):
    _, out, _ = run(capsys, "kappa", "--config", str(SCENARIOS / "uniform.cfg"))
    assert float(rows(out)[0]["kappa"]) == pytest.approx(1.1952187588556652, abs=1e-12)
    _, out, _ = run(capsys, "sigma-star", "--config", str(SCENARIOS / "normal.cfg"))
    row = rows(out)[0]
    assert float(row["kappa"]) == pytest.approx(1.4432, abs=5e-4)
    assert float(row["sigma_star"]) == pytest.approx(2.1348532339738077, abs=1e-8)


def test_sigma_star_without_critical_value(capsys):
    code, out, _ = run(capsys, "sigma-star", "--config", str(SCENARIOS / "symmetric.cfg"))
    row = rows(out)[0]
    assert code == 0 and row["sigma_star"] == "" and float(row["kappa"]) < 1


def test_out_writes_csv(capsys, tmp_path):
    run(capsys, "kappa", "--config", str(SCENARIOS / "uniform.cfg"), "--out", str(tmp_path))
    assert (tmp_path / "kappa.csv").read_text().startswith("kappa\n")


def test_config_error_exit_code(capsys, tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("model.alpha = oops\n")
    code, _, err = run(capsys, "speeds", "--config", str(bad))
    assert code == 2 and "line 1" in err


def test_math_error_exit_code(capsys):
    code, _, err = run(capsys, "kappa", "--config", str(SCENARIOS / "uniform.cfg"),
                       "--set", "kernel.u=uniform(lower=-2, upper=1)")
    assert code == 3 and "nonnegative mean" in err


def test_abort_exit_code(capsys, tmp_path):
    code, _, _ = run(capsys, "simulate", "--config", str(SCENARIOS / "smoke.cfg"),
                     "--set", "grid.halfwidth=10", "--out", str(tmp_path))
    assert code == 4
    assert not any(p.name[0] != "." for p in tmp_path.iterdir())


def test_simulate_writes_files_deterministically(capsys, tmp_path):
    argv = ["simulate", "--config", str(SCENARIOS / "smoke.cfg")]
    code, out, _ = run(capsys, *argv, "--out", str(tmp_path / "a"))
    assert code == 0
    outdir = Path(rows(out)[0]["outdir"])
    names = ["fronts.csv", "scenario.txt", "snapshots.csv", "summary.csv"]
    assert sorted(p.name for p in outdir.iterdir()) == names
    assert (outdir / "snapshots.csv").read_text().startswith("t,x,u,v\n")
    assert (outdir / "fronts.csv").read_text().startswith("t,x_left,x_right\n")
    first = {n: (outdir / n).read_bytes() for n in names}
    shutil.rmtree(outdir)
    run(capsys, *argv, "--out", str(tmp_path / "a"))
    assert {n: (outdir / n).read_bytes() for n in names} == first


def test_validate_passes(capsys):
    code, out, _ = run(capsys, "validate", "--config", str(SCENARIOS / "smoke.cfg"))
    assert code == 0, out
    assert "PASS direct-vs-spectral" in out and "SKIP" not in out


def test_sweep_sigma_transitions(capsys):
    code, out, _ = run(capsys, "sweep", "--config", str(SCENARIOS / "uniform.cfg"),
                       "--axis", "kernel.v.sigma", "--values", "0.5*sigma_star, sigma_star, 2*sigma_star")
    assert code == 0
    assert [r["class"] for r in rows(out)] == ["RightOnly", "CriticalLeft", "Bidirectional"]


def test_single_value_sweep_matches_command(capsys):
    _, single, _ = run(capsys, "speeds", "--config", str(SCENARIOS / "uniform.cfg"),
                       "--set", "kernel.v=uniform(lower=-0.6, upper=0.6)")
    _, swept, _ = run(capsys, "sweep", "--config", str(SCENARIOS / "uniform.cfg"),
                      "--axis", "kernel.v.sigma", "--values", "0.6")
    a, b = rows(single)[0], rows(swept)[0]
    assert {k: b[k] for k in a} == a


def test_sweep_parallel_matches_serial(capsys):
    argv = ["sweep", "--config", str(SCENARIOS / "uniform.cfg"), "--axis", "model.alpha",
            "--values", "0.15,0.2,0.22"]
    _, serial, _ = run(capsys, *argv)
    _, parallel, _ = run(capsys, *argv, "--jobs", "2")
    assert serial == parallel


def test_sweep_reports_per_value_errors(capsys):
    code, out, _ = run(capsys, "sweep", "--config", str(SCENARIOS / "uniform.cfg"),
                       "--axis", "kernel.u.upper", "--values", "0.5,2", "--run", "kappa")
    r = rows(out)
    assert code == 0
    assert r[0]["error"].startswith("DomainError") and r[1]["error"] == ""


def test_sweep_bad_value(capsys):
    code, _, _ = run(capsys, "sweep", "--config", str(SCENARIOS / "uniform.cfg"),
                     "--axis", "model.alpha", "--values", "two")
    assert code == 2
