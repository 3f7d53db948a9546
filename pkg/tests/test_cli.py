"""Command-line interface: exit codes, JSON and CSV contracts, seeding."""

import csv
import io
import json
import math

import numpy as np
import pytest

from nks3 import cli


def _run(capsys, argv):
    code = cli.main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_verify_structure_exit_zero(capsys):
    code, out, _ = _run(capsys, ["verify", "--suite", "structure",
                                 "--seed", "42", "--samples", "50"])
    assert code == 0
    doc = json.loads(out)
    assert doc["suite"] == "structure"
    assert all(c["pass"] for c in doc["checks"])


def test_verify_unknown_suite_usage_error(capsys):
    code, _, err = _run(capsys, ["verify", "--suite", "bogus"])
    assert code == 2
    assert "suite" in err


def test_verify_all_writes_file(tmp_path, capsys):
    out_path = tmp_path / "report.json"
    code, out, _ = _run(capsys, [
        "verify", "--suite", "all", "--seed", "3", "--samples", "2",
        "--out", str(out_path),
    ])
    assert code == 0
    doc = json.loads(out_path.read_text())
    assert isinstance(doc, list) and len(doc) == 3
    assert {d["suite"] for d in doc} == {"structure", "isometry", "hypersurface"}
    # stdout carries the same payload
    assert json.loads(out) == doc


def test_verify_out_path_io_error(tmp_path, capsys):
    bad = tmp_path / "no" / "such" / "dir" / "r.json"
    code, _, err = _run(capsys, ["verify", "--suite", "structure",
                                 "--samples", "5", "--out", str(bad)])
    assert code == 3
    assert "cannot write" in err


def test_analyze_reference_point(capsys):
    code, out, _ = _run(capsys, ["analyze", "--family", "m1", "--r", "1",
                                 "--at", "0,0,0,0,0"])
    assert code == 0
    doc = json.loads(out)
    assert abs(doc["alpha"]) <= 1e-6
    assert doc["pxi_class"] == "PLUS"
    assert doc["dim_distribution"] == 2
    assert len(doc["eigenvalues"]) == 5
    assert doc["theta"] == pytest.approx(1.0, abs=1e-6)


def test_analyze_swap_family_class(capsys):
    code, out, _ = _run(capsys, ["analyze", "--family", "m2", "--r", "0.7"])
    assert code == 0
    assert json.loads(out)["pxi_class"] == "MINUS"


def test_analyze_malformed_at(capsys):
    code, _, err = _run(capsys, ["analyze", "--family", "m1", "--r", "0.5",
                                 "--at", "0,0"])
    assert code == 2


def test_analyze_out_of_domain_r(capsys):
    code, _, err = _run(capsys, ["analyze", "--family", "m1", "--r", "0.01"])
    assert code == 2
    assert "r must lie" in err


def test_analyze_seed_env_fallback(capsys, monkeypatch):
    monkeypatch.setenv("NKS3_SEED", "5")
    code, out_env, _ = _run(capsys, ["analyze", "--family", "m1", "--r", "0.6"])
    assert code == 0
    code, out_flag, _ = _run(capsys, ["analyze", "--family", "m1", "--r", "0.6",
                                      "--seed", "5"])
    assert json.loads(out_env)["at"] == json.loads(out_flag)["at"]
    # flags beat the environment
    code, out_other, _ = _run(capsys, ["analyze", "--family", "m1", "--r", "0.6",
                                       "--seed", "6"])
    assert json.loads(out_other)["at"] != json.loads(out_env)["at"]


def _parse_csv(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_sweep_header_and_rows(capsys):
    code, out, err = _run(capsys, ["sweep", "--family", "m1",
                                   "--r", "0.2,0.6,1.0", "--samples", "3",
                                   "--seed", "1"])
    assert code == 0, err
    lines = out.strip().splitlines()
    assert lines[0] == ("family,r,k,l,ev1,ev2,ev3,ev4,ev5,"
                        "mult_pattern,traceA,pxi_class,theta")
    rows = _parse_csv(out)
    assert [row["r"] for row in rows] == ["0.2", "0.6", "1"]
    for row in rows:
        assert row["family"] == "m1"
        assert row["k"] == "" and row["l"] == ""
        assert row["mult_pattern"] == "2-1-2"
        assert row["pxi_class"] == "PLUS"
        evs = [float(row[f"ev{i}"]) for i in range(1, 6)]
        r = float(row["r"])
        # the sum of the double principal curvatures is sqrt(1 - r^2)/r
        lam_plus_bet = evs[0] + evs[4]
        assert lam_plus_bet == pytest.approx(math.sqrt(1 - r * r) / r, abs=1e-6)
        assert float(row["traceA"]) == pytest.approx(2 * lam_plus_bet, abs=1e-6)
    # minimal exactly at r = 1
    assert abs(float(rows[-1]["traceA"])) <= 1e-6
    assert float(rows[-1]["theta"]) == pytest.approx(1.0, abs=1e-6)


def test_sweep_torus_family(capsys):
    code, out, _ = _run(capsys, ["sweep", "--family", "m4", "--k", "0.6",
                                 "--samples", "2", "--seed", "2"])
    assert code == 0
    rows = _parse_csv(out)
    assert rows[0]["r"] == ""
    assert rows[0]["k"] == "0.6"
    assert float(rows[0]["l"]) == pytest.approx(0.8, abs=1e-12)
    assert rows[0]["mult_pattern"] == "1-1-1-1-1"
    assert rows[0]["theta"] == ""


def test_sweep_out_of_domain_grid(capsys):
    code, _, err = _run(capsys, ["sweep", "--family", "m1", "--r", "0.01,0.5"])
    assert code == 2


def test_sweep_writes_file(tmp_path, capsys):
    path = tmp_path / "sweep.csv"
    code, _, _ = _run(capsys, ["sweep", "--family", "m1", "--r", "0.5",
                               "--samples", "2", "--out", str(path)])
    assert code == 0
    rows = _parse_csv(path.read_text())
    assert len(rows) == 1


def test_twelve_significant_digits():
    assert cli._fmt(2.0 / 3.0) == "0.666666666667"
    assert cli._fmt(1.0) == "1"


def test_verify_failing_check_exits_one(capsys, monkeypatch):
    from nks3 import verify

    def failing_suite(seed, samples):
        return verify.SuiteReport(
            suite="structure", seed=seed,
            checks=[verify.CheckResult("x", "y", samples, 1.0, 1e-10)],
            duration_ms=0.0,
        )

    monkeypatch.setattr(cli.verify, "run_structure_suite", failing_suite)
    code, out, _ = _run(capsys, ["verify", "--suite", "structure"])
    assert code == 1
    assert json.loads(out)["checks"][0]["pass"] is False


def test_sweep_nonconstant_spectrum_exits_one(capsys, monkeypatch):
    monkeypatch.setattr(cli, "_sweep_rows", lambda args, seed: ([], 1e-3))
    code, _, err = _run(capsys, ["sweep", "--family", "m1", "--r", "0.5"])
    assert code == 1
    assert "spread" in err
