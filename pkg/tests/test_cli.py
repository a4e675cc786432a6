import csv
import io
import json
import math
import subprocess
import sys

import pytest

from fracheat.cli import EXIT_FAIL, EXIT_OK, EXIT_USAGE, main, parse_geom, parse_power


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_eigensum_lists_multiplicities(capsys):
    code, out, _ = run(capsys, "eigensum", "--n", "2", "--cutoff", "2")
    assert code == EXIT_OK
    assert [(float(r["lambda"]), int(r["multiplicity"])) for r in rows(out)] == [(0.0, 1), (1.0, 4), (2.0, 4)]


def test_heat_csv_round_trips_floats(capsys):
    code, out, _ = run(capsys, "heat", "--n", "1", "--r", "1/2", "--diag", "--t", "0.3,1.0")
    assert code == EXIT_OK
    r = rows(out)
    for row in r:
        t = float(row["t"])
        assert float(row["value"]) == pytest.approx(1 / math.tanh(t / 2) / (2 * math.pi), rel=1e-13)
        assert repr(float(row["value"])) == repr(float(f"{float(row['value']):.17g}"))


def test_heat_is_deterministic(capsys):
    argv = ("heat", "--n", "2", "--r", "1/3", "--x", "0.2,0.1", "--y", "0,0", "--t-geom", "0.5:2:1.5")
    a = run(capsys, *argv)
    b = run(capsys, *argv)
    assert a == b and a[0] == EXIT_OK


def test_heat_laplacian_and_compare(capsys):
    code, out, _ = run(capsys, "heat", "--n", "1", "--r", "1", "--method", "poisson", "--t", "0.5", "--compare", "eigensum")
    assert code == EXIT_OK
    (row,) = rows(out)
    assert float(row["agreement"]) < 1e-13


@pytest.mark.parametrize("r", ["3/2", "0", "1/0", "abc", "-1/2"])
def test_invalid_power_is_a_usage_error(capsys, r):
    code, _, err = run(capsys, "heat", "--n", "1", f"--r={r}", "--t", "1")
    assert code == EXIT_USAGE
    assert "usage error" in err


def test_argparse_errors_map_to_usage(capsys):
    assert main(["heat"]) == EXIT_USAGE
    assert main(["nosuch"]) == EXIT_USAGE


def test_threads_env_is_validated(capsys, monkeypatch):
    monkeypatch.setenv("FRACHEAT_THREADS", "0")
    assert main(["heat", "--n", "1", "--t", "1"]) == EXIT_USAGE
    monkeypatch.setenv("FRACHEAT_THREADS", "4")
    assert main(["heat", "--n", "1", "--t", "1"]) == EXIT_OK


def test_zeta_value_and_pole(capsys):
    code, out, _ = run(capsys, "zeta", "--n", "2", "--s", "-1")
    assert code == EXIT_OK and abs(json.loads(out)["value"][0]) < 1e-12
    code, out, _ = run(capsys, "zeta", "--n", "1", "--s", "0.5")
    d = json.loads(out)
    assert code == EXIT_OK and d["is_pole"] and d["residue"][0] == pytest.approx(1.0)


def test_predict_reports_log_slot(capsys):
    code, out, _ = run(capsys, "predict", "--n", "1", "--r", "1/2", "--shift", "1", "--max-exponent", "1")
    d = json.loads(out)
    logs = [r for r in d["rows"] if r["log_power"] == 1]
    assert code == EXIT_OK and logs[0]["predicted"] == pytest.approx(1 / (2 * math.pi), rel=1e-14)


def test_fit_pass_and_fail_exit_codes(capsys, tmp_path):
    base = ("fit", "--n", "1", "--r", "1/2", "--shift", "1", "--t-geom", "0.01:0.3:1.25", "--check-max", "1")
    report = tmp_path / "r.json"
    code, out, _ = run(capsys, *base, "--report", str(report))
    assert code == EXIT_OK
    assert json.loads(report.read_text()) == json.loads(out)
    code, _, _ = run(capsys, *base[:-2], "--rel-tol", "1e-9", "--abs-floor", "1e-12")
    assert code == EXIT_FAIL


def test_fit_from_samples_file(capsys, tmp_path):
    code, out, _ = run(capsys, "heat", "--n", "1", "--r", "1/2", "--t-geom", "0.01:0.3:1.2")
    path = tmp_path / "s.csv"
    path.write_text(out)
    code, out, _ = run(capsys, "fit", "--n", "1", "--r", "1/2", "--samples", str(path), "--check-max", "1")
    assert code == EXIT_OK
    assert json.loads(out)["metadata"]["n_samples"] == len(rows(path.read_text()))


def test_nonlocality(capsys):
    code, out, _ = run(capsys, "nonlocality", "--n", "2", "--r", "1/3", "--p", "3")
    d = json.loads(out)
    assert code == EXIT_OK and d["ratio"] == pytest.approx(3.0 ** (-2 / 3 - 2), rel=1e-10)
    code, _, _ = run(capsys, "nonlocality", "--n", "2", "--r", "1/2", "--j", "2")
    assert code == EXIT_USAGE


def test_blowup_scaled_column_tends_to_constant(capsys):
    code, out, _ = run(capsys, "blowup", "--n", "2", "--omega", "1,1,0", "--rho-geom", "0.02:0.2:2")
    assert code == EXIT_OK
    last = rows(out)[-1]
    assert float(last["rho^n*value/omega0"]) == pytest.approx(1 / (2 * math.pi), rel=1e-3)


def test_computation_error_exit_code(capsys):
    code, _, err = run(capsys, "heat", "--n", "1", "--r", "1/3", "--method", "subordination", "--t", "1")
    assert code == 3 and "DomainError" in err


def test_helpers():
    assert parse_power("1", allow_one=True) is None
    assert parse_geom("0.1:1:10").tolist() == [0.1, 1.0]


def test_module_entry_point():
    p = subprocess.run([sys.executable, "-m", "fracheat", "heat", "--n", "1", "--t", "1"], capture_output=True, text=True)
    assert p.returncode == 0 and p.stdout.startswith("t,value,error_bound,method")
