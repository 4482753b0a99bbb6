import json
import os

import pytest

from qcpower.cli import UsageError, parse_range, run


def _rows(text):
    return [l for l in text.splitlines() if l and not l.startswith("#")]


def test_parse_range():
    assert parse_range("0:1:0.25") == [0.0, 0.25, 0.5, 0.75, 1.0]
    assert parse_range("-2:2:0.05")[-1] == 2.0 and len(parse_range("-2:2:0.05")) == 81
    assert parse_range("0.1:0.1:1") == [0.1]
    for bad in ("0:1", "a:b:c", "1:0:0.1", "0:1:0", "0:1:-1", "0:inf:1"):
        with pytest.raises(UsageError):
            parse_range(bad)


def test_errors_report(capsys):
    assert run(["errors", "--model", "xxz", "--delta", "0", "--temp", "0.16"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[1] == "I,0.9942"


def test_errors_csv_full_precision(capsys):
    assert run(["errors", "--model", "xxz", "--delta", "0", "--temp", "0.16", "--format", "csv"]) == 0
    rows = _rows(capsys.readouterr().out)
    value = rows[2].split(",")[1]
    assert len(value.replace(".", "").replace("e-", "").lstrip("0")) >= 12


def test_errors_json(capsys):
    assert run(["errors", "--model", "aniso", "--dz", "0.5", "--temp", "0.1", "--format", "json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["columns"] == ["class", "probability"] and len(doc["rows"]) == 16
    assert doc["metadata"]["version"]


@pytest.mark.parametrize("argv", [
    ["errors", "--model", "xxz", "--dz", "0", "--temp", "0.1"],
    ["errors", "--model", "xxz", "--delta", "0", "--temp", "-1"],
    ["errors", "--model", "xxz", "--delta", "-3", "--temp", "0.1"],
    ["phase3d", "--model", "xxz", "--delta-range", "0:1"],
    ["phase3d", "--model", "xxz", "--delta-range", "0:1:0.5", "--temp-range", "x"],
    ["phase2d", "--model", "xxz", "--delta", "0", "--k-source", "table"],
    ["spectrum", "--model", "aniso"],
    ["spectrum", "--model", "xxz", "--delta", "0", "--bogus"],
    ["no-such-command"],
    ["zero-t-boundary", "--model", "xxz", "--lattice", "cross"],
])
def test_validation_exit_code(argv, capsys):
    assert run(argv) == 2
    assert capsys.readouterr().err


def test_missing_k_table_file(tmp_path, capsys):
    code = run(["phase2d", "--model", "xxz", "--delta", "0", "--k-source", "table",
                "--k-table", str(tmp_path / "absent.csv")])
    assert code == 2


def test_verify_propagation(capsys):
    assert run(["verify-propagation"]) == 0
    assert "8/8 rules verified" in capsys.readouterr().out


def test_spectrum_and_ground_check(capsys):
    assert run(["spectrum", "--model", "xxz", "--delta-range", "-3:-1:0.01"]) == 0
    text = capsys.readouterr().out
    assert '"location": -2.0' in text
    assert run(["ground-check", "--model", "aniso", "--dz-range", "-2:2:1"]) == 0
    for row in _rows(capsys.readouterr().out)[1:]:
        assert float(row.split(",")[2]) > 1 - 1e-9


def test_zero_t_boundary(capsys):
    assert run(["zero-t-boundary", "--model", "aniso"]) == 0
    param = float(_rows(capsys.readouterr().out)[1].split(",")[-1])
    assert param == pytest.approx(-1.2882, abs=0.005)
    assert run(["zero-t-boundary", "--model", "xxz", "--lattice", "cross", "--p-th", "0.7453"]) == 0


def test_percolation_example(capsys):
    assert run(["percolation", "--lattice", "honeycomb", "--trials", "200", "--size", "128", "--seed", "7"]) == 0
    out = capsys.readouterr().out
    assert "# seed: 7" in out
    p_th = float(_rows(out)[1].split(",")[4])
    assert 0.69 <= p_th <= 0.705


def test_seed_env_override(monkeypatch, capsys):
    monkeypatch.setenv("QCPOWER_SEED", "42")
    assert run(["percolation", "--lattice", "square", "--size", "16", "--trials", "40"]) == 0
    assert "# seed: 42" in capsys.readouterr().out
    monkeypatch.setenv("QCPOWER_SEED", "forty")
    assert run(["percolation", "--lattice", "square", "--size", "16", "--trials", "40"]) == 2


def test_spanning_curve(capsys):
    assert run(["percolation", "--lattice", "square", "--size", "16", "--trials", "40",
                "--p-range", "0:1:0.5"]) == 0
    rows = _rows(capsys.readouterr().out)
    assert rows[0] == "p,spanning_probability"
    assert rows[1].endswith(",0.0") and rows[-1].endswith(",1.0")


def test_kcurve(tmp_path):
    out = tmp_path / "k.csv"
    assert run(["kcurve", "--loss-range", "0:0.2:0.1", "--size", "32", "--trials", "4", "-o", str(out)]) == 0
    rows = _rows(out.read_text())
    assert rows[0] == "p_l,k,stderr" and rows[1].startswith("0.0,1.0")


def test_phase3d_writes_grid_and_boundary(tmp_path):
    out = tmp_path / "p3.csv"
    code = run(["phase3d", "--model", "xxz", "--delta-range", "-2:2:0.5", "--temp-range", "0:0.2:0.1",
                "--tol", "1e-6", "--workers", "2", "-o", str(out)])
    assert code == 0
    rows = _rows(out.read_text())
    assert rows[0] == "model,param,T,p_z,p_l,universal_2d,universal_3d,margin"
    assert len(rows) == 1 + 9 * 3
    bnd = _rows((tmp_path / "p3_boundary.csv").read_text())
    assert bnd[0] == "model,param,T_star,margin,flag" and len(bnd) > 1


def test_phase2d_with_table(tmp_path, capsys):
    table = tmp_path / "k.csv"
    table.write_text("p_l,k\n0.0,1.0\n0.2,0.6\n0.4,0.2\n")
    code = run(["phase2d", "--model", "aniso", "--dz-range", "-1:0:0.5", "--temp-range", "0:0.02:0.01",
                "--k-source", "table", "--k-table", str(table), "--format", "json"])
    assert code == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["metadata"]["k_source"] == f"table:{table}"
    assert doc["boundary"]["columns"][2] == "T_star"


def test_module_entry_point():
    import subprocess
    import sys
    res = subprocess.run([sys.executable, "-m", "qcpower", "--version"], capture_output=True, text=True)
    assert res.returncode == 0 and "qcpower" in res.stdout
