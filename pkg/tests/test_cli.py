"""Command-line interface: outputs, configuration merging and exit codes."""

import csv
import io
import json
import math

import numpy as np
import pytest

from moment_spectra import cli
from moment_spectra import spectra_analytic as sa


def _gate_file(path, m):
    path.write_text(json.dumps({"d": 2, "entries": [[float(x), 0.0] for x in np.ravel(m)]}))
    return str(path)


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_gate_canonical_cnot(capsys):
    code, out, _ = run(capsys, "gate", "--canonical", f"{math.pi / 4},0,0", "--format", "json")
    assert code == 0
    js = json.loads(out)
    assert js["profile"]["e_u"] == pytest.approx(2 / 3)
    assert js["profile"]["g_u"] == pytest.approx(1 / 3)
    assert js["solvable_residual"] == pytest.approx(-2 / 9)
    assert js["qubit_solvable_residual"] == pytest.approx(0.4)
    assert js["degenerate"] is False


def test_gate_identity_is_degenerate(capsys):
    code, out, _ = run(capsys, "gate", "--canonical", "0,0,0", "--format", "json")
    assert code == 0 and json.loads(out)["degenerate"] is True


def test_gate_file_swap(tmp_path, capsys):
    p = _gate_file(tmp_path / "swap.json", np.eye(4)[[0, 2, 1, 3]])
    code, out, _ = run(capsys, "gate", "--file", p, "--format", "json")
    assert code == 0
    prof = json.loads(out)["profile"]
    assert (prof["e_u"], prof["g_u"]) == pytest.approx((0.0, 1.0), abs=1e-12)


def test_gate_non_unitary_exit_3(tmp_path, capsys):
    p = _gate_file(tmp_path / "bad.json", np.ones((4, 4)))
    assert run(capsys, "gate", "--file", p)[0] == 3


def test_gate_malformed_file_exit_2(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text(json.dumps({"d": 2, "entries": [[1, 0]] * 5}))
    assert run(capsys, "gate", "--file", str(p))[0] == 2


def test_gate_missing_file_exit_2(tmp_path, capsys):
    assert run(capsys, "gate", "--file", str(tmp_path / "missing.json"))[0] == 2


def test_spectrum_local(capsys):
    code, out, _ = run(capsys, "spectrum", "-n", "4", "--e", "0.6")
    assert code == 0
    ev = json.loads(out)["eigenvalues"]
    assert len(ev) == 16
    assert sum(abs(e["re"] - 1) < 1e-12 for e in ev) == 2


def test_spectrum_brickwall_numeric_match(capsys):
    code, out, _ = run(capsys, "spectrum", "-n", "6", "--arch", "brickwall", "--e", str(2 / 3), "--numeric")
    assert code == 0
    assert json.loads(out)["match"]["ok"] is True


def test_spectrum_off_solvable_line_exit_4(capsys):
    assert run(capsys, "spectrum", "-n", "4", "--e", "0.6", "--g", "0.3")[0] == 4
    assert run(capsys, "spectrum", "-n", "4", "--e", "0.6", "--g", "0.3", "--numeric")[0] == 0


def test_spectrum_odd_brickwall_exit_4(capsys):
    assert run(capsys, "spectrum", "-n", "5", "--arch", "brickwall", "--e", "0.6")[0] == 4


def test_missing_required_argument_exit_2(capsys):
    code, _, err = run(capsys, "spectrum", "--e", "0.6")
    assert code == 2 and "n" in err


def test_unknown_subcommand_exit_2(capsys):
    assert run(capsys, "bogus")[0] == 2


def test_scan_csv_with_haar_row(tmp_path, capsys):
    out = tmp_path / "scan.csv"
    code, _, _ = run(capsys, "scan", "-n", "4", "--resolution", "21", "--out", str(out), "--solvable-line")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out.read_text())))
    assert len(rows) == 21 * 21
    haar = [r for r in rows if abs(float(r["e_u"]) - 0.6) < 1e-9 and abs(float(r["g_u"]) - 0.5) < 1e-9]
    assert len(haar) == 1
    assert float(haar[0]["gap"]) == pytest.approx(sa.local_gap(4, 2, 0.6), abs=1e-9)
    line = list(csv.DictReader(io.StringIO((tmp_path / "scan.solvable.csv").read_text())))
    assert line and all(abs(float(r["g_u"]) - float(r["e_u"]) / 1.2) < 1e-12 for r in line)


def test_frame_potential_domain_wall(capsys):
    code, out, _ = run(capsys, "frame-potential", "-n", "6", "--arch", "domain-wall", "--e", "0.6", "--t-max", "2")
    assert code == 0
    js = json.loads(out)
    assert (js["diag"], js["off"]) == pytest.approx((0.32, 0.16))
    assert js["curve"][1]["F"] == pytest.approx(0.7168)


def test_frame_potential_csv(capsys):
    code, out, _ = run(capsys, "frame-potential", "-n", "4", "--e", "0.6", "--t-max", "3", "--format", "csv")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "t,F" and len(lines) == 5
    assert float(lines[1].split(",")[1]) == pytest.approx(16.0)


def test_config_file_merges_with_overrides(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"n": 4, "e": 0.6}))
    code, out, _ = run(capsys, "spectrum", "--config", str(cfg), "-n", "3")
    assert code == 0
    assert json.loads(out)["n"] == 3


def test_config_unknown_key_exit_2(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"n": 4, "bogus": 1}))
    assert run(capsys, "spectrum", "--config", str(cfg), "--e", "0.6")[0] == 2


def test_validate_quick_passes(capsys):
    code, _, err = run(capsys, "validate", "quick")
    assert code == 0
    assert err.count("[PASS]") == 12


def test_validate_detects_injected_fault(monkeypatch, capsys):
    # corrupt the single-particle energy: the analytic/numeric cross-checks must fail
    monkeypatch.setattr(sa.FermionDispersion, "eps_k", lambda self, k: 0.0 * np.asarray(k))
    code, _, err = run(capsys, "validate", "quick")
    assert code == 1
    assert "[FAIL]" in err
