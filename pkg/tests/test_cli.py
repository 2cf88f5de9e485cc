"""CLI plumbing tests: flag parsing, config merging, CSV output,
determinism, and exit codes.  The heavy table commands are exercised with
a stubbed force evaluator; their numerics live in the acceptance suite."""

import csv
import json
import subprocess
import sys

import pytest

from casphere import cli
from casphere.freeenergy import EnergyResult


def run_cli(args):
    return cli.main(args)


def read_csv(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def test_invalid_config_exit_code(tmp_path, capsys):
    assert run_cli(["--command", "free-energy", "--R", "1.0"]) == 1
    assert run_cli(["--command", "free-energy", "--R", "1.0", "--d", "0.5",
                    "--epsilon", "0.5", "--T", "1.0"]) == 1
    assert run_cli([]) == 1
    err = capsys.readouterr().err
    assert "error:" in err


def test_free_energy_csv(tmp_path):
    out = tmp_path / "fe.csv"
    rc = run_cli(["--command", "free-energy", "--R", "1.0", "--d", "1.0",
                  "--T", "1.0", "--out", str(out)])
    assert rc == 0
    rows = read_csv(out)
    assert len(rows) == 1
    row = rows[0]
    for col in ("value", "error_estimate", "l_max_used", "converged"):
        assert col in row
    assert float(row["value"]) < 0
    assert row["converged"] == "True"


def test_epsilon_flag(tmp_path):
    out = tmp_path / "pfa.csv"
    rc = run_cli(["--command", "pfa", "--R", "10.0", "--epsilon", "0.1",
                  "--T", "0.0", "--mode-count", "2", "--out", str(out)])
    assert rc == 0
    row = read_csv(out)[0]
    assert float(row["d"]) == pytest.approx(1.0)
    # -pi^3 R/720 d^2 / (1 + eps)
    import math
    want = -math.pi ** 3 * 10.0 / 720.0 / 1.1
    assert float(row["value"]) == pytest.approx(want, rel=1e-6)


def test_config_file_merge(tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"command": "pfa", "R": 10.0, "d": 1.0,
                               "T": 0.0, "mode-count": 2}))
    out = tmp_path / "out.csv"
    rc = run_cli(["--config", str(cfg), "--out", str(out)])
    assert rc == 0
    # flags override the file
    out2 = tmp_path / "out2.csv"
    rc = run_cli(["--config", str(cfg), "--T", "1.0", "--out", str(out2)])
    assert rc == 0
    assert float(read_csv(out2)[0]["value"]) < float(read_csv(out)[0]["value"])


def test_scan_monotone_and_deterministic(tmp_path):
    args = ["--command", "scan", "--scan-axis", "R", "--scan-grid", "0.2:1.2:3",
            "--epsilon", "0.0", "--T", "1.0", "--scan-quantity", "thermal-part",
            "--rel-tol", "1e-2"]
    out1 = tmp_path / "s1.csv"
    out2 = tmp_path / "s2.csv"
    assert run_cli(args + ["--out", str(out1)]) == 0
    assert run_cli(args + ["--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()  # bit-identical rerun
    rows = read_csv(out1)
    vals = [float(r["value"]) for r in rows]
    assert all(v < 0 for v in vals)
    assert all(b < a for a, b in zip(vals, vals[1:]))  # deeper with larger R


def test_scan_grid_validation():
    assert run_cli(["--command", "scan", "--scan-axis", "R",
                    "--scan-grid", "3:1:5", "--epsilon", "0.1", "--T", "1"]) == 1
    assert run_cli(["--command", "scan", "--scan-axis", "R",
                    "--scan-grid", "nonsense", "--epsilon", "0.1", "--T", "1"]) == 1


def test_asymptotic_command(tmp_path):
    out = tmp_path / "asy.csv"
    rc = run_cli(["--command", "asymptotic", "--R", "1.0", "--d", "1.0",
                  "--T", "0.1", "--field", "em", "--out", str(out)])
    assert rc == 0
    row = read_csv(out)[0]
    assert int(row["leading_power"]) == 4


def test_table_command_stubbed(tmp_path, monkeypatch):
    calls = []

    def fake_force(geom, spec, T, trunc=None, target="total"):
        calls.append((geom.R, geom.d, target))
        return EnergyResult(-0.5 / geom.R, 1e-4,
                            {"l_max_used": 10, "converged": True})

    monkeypatch.setattr(cli.freeenergy, "force", fake_force)
    out = tmp_path / "t1.csv"
    rc = run_cli(["--command", "table1", "--out", str(out)])
    assert rc == 0
    rows = read_csv(out)
    assert [float(r["R"]) for r in rows] == [0.5, 1.0, 3.0]
    assert all(r["epsilon"] == "0.01" for r in rows)
    # table convention: R * |force|
    assert [float(r["f_T_exact"]) for r in rows] == pytest.approx([0.5, 0.5, 0.5])
    for col in ("f_T_pfa", "rel_deviation", "f_T_pfa_mode2", "converged"):
        assert col in rows[0]
    assert all(t == "thermal_part" for _, _, t in calls)


def test_table_convergence_failure_exit_2(tmp_path, monkeypatch):
    def fake_force(geom, spec, T, trunc=None, target="total"):
        return EnergyResult(-0.5, 1e-4, {"l_max_used": 10, "converged": False})

    monkeypatch.setattr(cli.freeenergy, "force", fake_force)
    out = tmp_path / "t2.csv"
    rc = run_cli(["--command", "table2", "--out", str(out)])
    assert rc == 2
    assert len(read_csv(out)) == 3  # partial results still written


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "casphere.cli", "--help"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "--command" in proc.stdout
