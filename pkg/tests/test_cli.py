import json
import subprocess
import sys

import pytest

from ccc4 import cli


def run_cli(argv, capsys):
    code = cli.main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_solve_equal_masses(capsys):
    code, out, err = run_cli(["solve", "--masses", "1,1,1,1"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["converged"] is True
    assert doc["is_cocircular"] is True
    assert doc["r_star"]["r13"] == pytest.approx(2.0 ** 0.5, abs=1e-8)
    assert doc["multipliers"]["lambda"] == pytest.approx(0.6767766952966369, abs=1e-9)


def test_solve_rejects_nonpositive_masses(capsys):
    code, out, err = run_cli(["solve", "--masses", "1,1,1,-1"], capsys)
    assert code == 64
    assert "positive" in err


def test_solve_rejects_malformed_masses(capsys):
    assert run_cli(["solve", "--masses", "1,1,1"], capsys)[0] == 64
    assert run_cli(["solve", "--masses", "a,b,c,d"], capsys)[0] == 64


def test_solve_deterministic_bytes(tmp_path, capsys):
    out1 = tmp_path / "a.json"
    out2 = tmp_path / "b.json"
    args = ["solve", "--masses", "2,2,1,1", "--starts", "12", "--seed", "7"]
    assert run_cli(args + ["--out", str(out1)], capsys)[0] == 0
    assert run_cli(args + ["--out", str(out2)], capsys)[0] == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_solve_nonconvergence_exit_code(capsys):
    # a tolerance below attainable float accuracy cannot be certified
    code, out, err = run_cli(["solve", "--masses", "1.3,0.6,2.1,0.9",
                              "--tol", "1e-30"], capsys)
    assert code == 2
    assert json.loads(out)["converged"] is False


def test_solve_unwritable_output(capsys):
    code, out, err = run_cli(["solve", "--masses", "1,1,1,1",
                              "--out", "/nonexistent-dir/x.json"], capsys)
    assert code == 73


def test_scan_smoke_grid(tmp_path, capsys):
    out = tmp_path / "scan.csv"
    code, _, _ = run_cli(["scan", "--grid", "2", "--out", str(out)], capsys)
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "# ccc4-schema=1"
    assert lines[1] == "m1,m2,m3,m4,K_star,U_star,lambda,is_cocircular,iterations,converged"
    rows = lines[2:]
    assert len(rows) == 8
    for row in rows:
        cells = row.split(",")
        assert len(cells) == 10
        assert cells[9] == "true"


def test_scan_jobs_reproducible(tmp_path, capsys):
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    assert run_cli(["scan", "--grid", "2", "--jobs", "1", "--out", str(a)], capsys)[0] == 0
    assert run_cli(["scan", "--grid", "2", "--jobs", "4", "--out", str(b)], capsys)[0] == 0
    assert a.read_bytes() == b.read_bytes()


def test_scan_jobs_env_default(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("CCC4_JOBS", "3")
    out = tmp_path / "env.csv"
    assert run_cli(["scan", "--grid", "2", "--out", str(out)], capsys)[0] == 0


def test_scan_flag_validation(capsys):
    assert run_cli(["scan", "--grid", "1"], capsys)[0] == 64
    assert run_cli(["scan", "--grid", "2", "--fix", "m9=1"], capsys)[0] == 64
    assert run_cli(["scan", "--grid", "2", "--fix", "m4=-1"], capsys)[0] == 64
    assert run_cli(["scan", "--grid", "2", "--jobs", "0"], capsys)[0] == 64


def test_scan_unwritable(capsys):
    code, _, _ = run_cli(["scan", "--grid", "2", "--out", "/nonexistent-dir/s.csv"],
                         capsys)
    assert code == 73


def test_inverse_square_degrees(capsys):
    code, out, err = run_cli(["inverse", "--angles", "0,90,180,270", "--degrees"],
                             capsys)
    assert code == 0
    doc = json.loads(out)
    for key in ("m1", "m2", "m3", "m4"):
        assert doc[key] == pytest.approx(1.0, rel=1e-9)
    assert doc["diagnostics"]["compat_residual"] <= 1e-12


def test_inverse_generic_infeasible(capsys):
    code, out, err = run_cli(["inverse", "--angles", "0,50,180,300", "--degrees"],
                             capsys)
    assert code == 1
    assert out.startswith("infeasible:")


def test_inverse_coincident_angles(capsys):
    code, _, err = run_cli(["inverse", "--angles", "0,0,90,180", "--degrees"], capsys)
    assert code == 64


def test_inverse_flag_validation(capsys):
    assert run_cli(["inverse", "--angles", "0,1,2"], capsys)[0] == 64
    assert run_cli(["inverse", "--angles", "0,1,2,3", "--radius", "-2"], capsys)[0] == 64


def test_certify_fresh_record(tmp_path, capsys):
    rec_path = tmp_path / "rec.json"
    assert run_cli(["solve", "--masses", "1,1,1,1", "--out", str(rec_path)],
                   capsys)[0] == 0
    code, out, _ = run_cli(["certify", "--in", str(rec_path)], capsys)
    assert code == 0
    assert "certificate: PASS" in out
    assert "cartesian_embedding: ok" in out


def test_certify_tampered_record(tmp_path, capsys):
    rec_path = tmp_path / "rec.json"
    assert run_cli(["solve", "--masses", "2,2,1,1", "--out", str(rec_path)],
                   capsys)[0] == 0
    doc = json.loads(rec_path.read_text())
    doc["multipliers"]["lambda"] += 0.01
    rec_path.write_text(json.dumps(doc))
    code, out, _ = run_cli(["certify", "--in", str(rec_path)], capsys)
    assert code == 1
    assert "certificate: FAIL" in out
    assert "stationarity: FAIL" in out


def test_certify_unreadable_inputs(tmp_path, capsys):
    assert run_cli(["certify", "--in", str(tmp_path / "missing.json")], capsys)[0] == 66
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run_cli(["certify", "--in", str(bad)], capsys)[0] == 66
    incomplete = tmp_path / "incomplete.json"
    incomplete.write_text('{"masses": {"m1": 1.0}}')
    assert run_cli(["certify", "--in", str(incomplete)], capsys)[0] == 66


def test_identities_table(capsys):
    code, out, _ = run_cli(["identities", "--samples", "300", "--seed", "1"], capsys)
    assert code == 0
    for name in ("pech_identity", "pech_anchor_points", "cyclic_K_vanishes",
                 "cyclic_H_vanishes", "gradient_parallelism",
                 "circumradius_relation", "homogeneity_degrees"):
        assert name in out
    assert "FAIL" not in out


def test_identities_flag_validation(capsys):
    assert run_cli(["identities", "--samples", "0"], capsys)[0] == 64


def test_unknown_subcommand(capsys):
    assert run_cli(["frobnicate"], capsys)[0] == 64
    assert run_cli([], capsys)[0] == 64


def test_console_entry_point_subprocess(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "ccc4", "solve", "--masses", "1,1,1,1"],
        capture_output=True, text=True, timeout=120)
    assert proc.returncode == 0
    doc = json.loads(proc.stdout)
    assert doc["is_cocircular"] is True


def test_scan_sentinel_fields_for_nonconverged(tmp_path, capsys, monkeypatch):
    # force a non-converged record through the row formatter
    from dataclasses import replace
    from ccc4 import cli as cli_mod
    from ccc4.solver import minimize_U as real_minimize

    def crippled(masses, opts):
        return replace(real_minimize(masses, opts), converged=False)

    monkeypatch.setattr(cli_mod, "minimize_U", crippled)
    out = tmp_path / "scan.csv"
    assert cli_mod.main(["scan", "--grid", "2", "--out", str(out)]) == 0
    capsys.readouterr()
    for row in out.read_text().splitlines()[2:]:
        cells = row.split(",")
        assert cells[4] == "" and cells[5] == "" and cells[6] == "" and cells[7] == ""
        assert cells[9] == "false"
        assert cells[8].isdigit()
