import json
import math
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from qflow import cli
from qflow.field import load_field

CONFIGS = Path(__file__).resolve().parents[1] / "demos" / "configs"


def summary(out):
    return dict(line.split(" = ", 1) for line in (out / "summary.txt").read_text().splitlines())


def test_flow_fixed_point(tmp_path, capsys):
    assert cli.main(["flow", "--config", str(CONFIGS / "fixed_point.cfg"), "--out", str(tmp_path)]) == 0
    s = summary(tmp_path)
    assert s["status"] == "converged" and float(s["b"]) == 0.0
    assert s["max_principle"] == "ok"
    meta, u_hat = load_field(tmp_path / "u_hat.qf1")
    assert meta["toy"] and u_hat.shape == (16, 16) and np.all(u_hat == 0)
    assert (tmp_path / "series.csv").read_text().startswith("t,dt,min_dtu")


def test_flow_cone_exit(tmp_path, capsys):
    assert cli.main(["flow", "--config", str(CONFIGS / "cone_exit.cfg"), "--out", str(tmp_path)]) != 0
    assert summary(tmp_path)["status"] == "cone_exit"


def test_flow_constant_shift(tmp_path, capsys):
    text = (CONFIGS / "constant_shift.cfg").read_text().replace("N = 16", "N = 8")
    cfg = tmp_path / "shift.cfg"
    cfg.write_text(text)
    assert cli.main(["flow", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 0
    s = summary(tmp_path / "o")
    assert float(s["b"]) == pytest.approx(-0.1, abs=1e-6)
    assert s["J_monotone"] == "ok"
    assert float(s["decay_rate"]) > 0


def test_check_sub(tmp_path, capsys):
    assert cli.main(["check-sub", "--config", str(CONFIGS / "subsolution_l0.cfg")]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["failures"] == 0 and report["min_margin"] > 0
    assert cli.main(["check-sub", "--config", str(CONFIGS / "subsolution_fail.cfg")]) == 1
    missing = tmp_path / "missing.cfg"
    missing.write_text("n = 2\nN = 8\nk = 2\nl = 1\na = 2\npsi = constant 2\n")
    assert cli.main(["check-sub", "--config", str(missing)]) == 2
    assert "ubar" in capsys.readouterr().err


def test_selftest(tmp_path, capsys):
    cfg = tmp_path / "st.cfg"
    cfg.write_text("selftest_samples = 300\n")
    assert cli.main(["selftest", "--config", str(cfg), "--seed", "5"]) == 0
    out = capsys.readouterr().out
    assert out.count("PASS") == 4
    assert cli.main(["selftest", "--config", str(cfg), "--inject-fault"]) == 1
    assert "FAIL" in capsys.readouterr().out
    cfg.write_text("selftest_n = 7\n")
    assert cli.main(["selftest", "--config", str(cfg)]) == 2


def test_toy_flag_and_seed(tmp_path, capsys):
    cfg = tmp_path / "full.cfg"
    cfg.write_text("n = 2\nN = 8\nk = 2\nl = 1\na = 2\npsi = constant 2\n")
    assert cli.main(["flow", "--config", str(cfg), "--out", str(tmp_path / "o"), "--toy", "--seed", "9"]) == 0
    meta, _ = load_field(tmp_path / "o" / "u_hat.qf1")
    assert meta["toy"]
    assert cli.main(["flow", "--config", str(cfg), "--seed", "-1"]) == 2


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "qflow", "flow", "--config", str(CONFIGS / "fixed_point.cfg"), "--out", str(tmp_path)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert "status = converged" in proc.stdout
