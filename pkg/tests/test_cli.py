import csv
import io
import json
import math
import shutil
import subprocess

import pytest

from lunepv.cli import SCAN_COLUMNS, fmt, main, scan_grid


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_delta_csv(capsys):
    code, out, _ = run(capsys, "delta", "--x", "1", "--y", "0", "--a", "0.3")
    assert code == 0
    row = next(csv.DictReader(io.StringIO(out)))
    assert row["region"] == "RightMoon" and row["delta"] == "1"
    assert out.endswith("\n") and "\r" not in out


def test_delta_json(capsys):
    code, out, _ = run(capsys, "delta", "--x", "-1", "--y", "0", "--a", "0.3", "--format", "json")
    obj = json.loads(out)
    assert code == 0 and obj["delta"] == -1 and obj["region"] == "LeftMoon"


def test_jordan_anchor(capsys):
    code, out, _ = run(capsys, "jordan", "--x", "2", "--y", "0", "--a", "0.5", "--format", "json")
    assert json.loads(out)["value"] == 0.5 * math.pi * math.log(5776)


def test_floats_round_trip():
    for v in (0.1, 1 / 3, 13.6054, 1e-300):
        assert float(fmt(v)) == v
    assert fmt(True) == "true"


def test_compare_domain_error(capsys):
    code, _, err = run(capsys, "compare", "--x", "0", "--y", "0.9", "--a", "0.5")
    assert code == 2 and "x != 0" in err


def test_inner_domain_error(capsys):
    code, _, err = run(capsys, "inner", "--x", "0", "--y", "0.1", "--center", "0.3")
    assert code == 2


def test_oracle_f_rejects_zero(capsys):
    code, _, err = run(capsys, "oracle", "f", "--a", "0", "--samples", "1000000", "--seed", "1")
    assert code == 2 and "moons empty" in err


def test_oracle_inner_json(capsys):
    code, out, _ = run(capsys, "oracle", "inner", "--x", "2", "--y", "0", "--center", "0.5",
                       "--samples", "100000", "--seed", "3", "--format", "json")
    obj = json.loads(out)
    assert code == 0 and obj["samples"] == 100000 and obj["std_err"] > 0


def test_eval_f_far_disks(capsys, tmp_path):
    dest = tmp_path / "f.json"
    code, out, _ = run(capsys, "eval-f", "--a", "2.5", "--tol", "1e-3", "--format", "json", "--out", str(dest))
    assert code == 0 and out == ""
    obj = json.loads(dest.read_text())
    assert obj["converged"] is True and obj["log_rate"] is None


def test_eval_f_divergent_exit_code(capsys):
    code, out, _ = run(capsys, "eval-f", "--a", "0.5", "--tol", "1e-3", "--cutoff", "1e-3", "--format", "json")
    obj = json.loads(out)
    assert code == 3 and obj["converged"] is False and obj["log_rate"] > 0


def test_scan_zero(capsys):
    code, out, _ = run(capsys, "scan", "--a-min", "0", "--a-max", "0", "--steps", "1")
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0
    assert rows[0] == SCAN_COLUMNS
    assert rows[1] == ["0", "0", "0", "0", "true", "0"]


def test_scan_output_independent_of_jobs(tmp_path):
    outs = []
    for jobs in ("1", "3"):
        dest = tmp_path / f"scan{jobs}.csv"
        main(["scan", "--a-min", "1.5", "--a-max", "2.5", "--steps", "3", "--tol", "1e-3",
              "--jobs", jobs, "--out", str(dest)])
        outs.append(dest.read_bytes())
    assert outs[0] == outs[1]


def test_env_defaults_and_flag_precedence(capsys, monkeypatch):
    monkeypatch.setenv("LUNEPV_TOL", "1e-3")
    _, out, _ = run(capsys, "inner", "--x", "2", "--y", "0", "--center", "0.5", "--format", "json")
    assert json.loads(out)["abs_tol"] == 1e-3
    _, out, _ = run(capsys, "inner", "--x", "2", "--y", "0", "--center", "0.5", "--format", "json", "--tol", "1e-6")
    assert json.loads(out)["abs_tol"] == 1e-6


def test_scan_grid():
    assert scan_grid(0.1, 0.9, 9)[4] == 0.5
    with pytest.raises(ValueError):
        scan_grid(0, 1, 0)


@pytest.mark.skipif(shutil.which("lunepv") is None, reason="console script not installed")
def test_console_script():
    proc = subprocess.run(["lunepv", "delta", "--x", "0", "--y", "0", "--a", "0.3"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and "Lens" in proc.stdout
