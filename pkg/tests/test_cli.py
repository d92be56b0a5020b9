"""CLI surface: golden outputs, round-trips, exit codes."""

import json
import pathlib
import subprocess
import sys

import pytest

GOLDEN = pathlib.Path(__file__).parent / "golden"


def run_cli(*args):
    return subprocess.run([sys.executable, "-m", "siegel_eisenstein.cli", *args],
                          capture_output=True, text=True)


CASES = [
    ("coeff_g1_k4.json", ["coeff", "--genus", "1", "--weight", "4", "--trace-bound", "6"]),
    ("coeff_g2_k4.json", ["coeff", "--genus", "2", "--weight", "4", "--trace-bound", "2"]),
    ("stab_g1_k4_p5.json", ["stabilize", "--genus", "1", "--weight", "4", "--p", "5",
                            "--trace-bound", "10"]),
    ("satake_g2_k4_p2.json", ["satake", "--genus", "2", "--weight", "4", "--p", "2"]),
    ("lambda_g1_a2_p5.json", ["lambda", "--genus", "1", "--a", "2", "--p", "5",
                              "--trace-bound", "3"]),
]


@pytest.mark.parametrize("golden,args", CASES, ids=[c[0] for c in CASES])
def test_golden_outputs(golden, args):
    res = run_cli(*args, "--format", "json")
    assert res.returncode == 0, res.stderr
    expect = json.loads((GOLDEN / golden).read_text())
    assert json.loads(res.stdout) == expect


def test_json_roundtrip_values():
    res = run_cli("stabilize", "--genus", "2", "--weight", "6", "--p", "5",
                  "--trace-bound", "1", "--format", "json")
    assert res.returncode == 0, res.stderr
    doc = json.loads(res.stdout)
    assert doc["spec"]["paths_agree"] is True
    from siegel_eisenstein.arith import rational_from_str
    from siegel_eisenstein.eisenstein import stabilized_coeff
    from siegel_eisenstein.quadform import HalfIntegralMatrix
    for entry in doc["entries"]:
        T = HalfIntegralMatrix.from_json(entry["G"])
        assert rational_from_str(entry["value"]) == stabilized_coeff(2, 6, 5, T)


def test_deterministic_ordering():
    a = run_cli("coeff", "--genus", "2", "--weight", "4", "--trace-bound", "2", "--format", "json")
    b = run_cli("coeff", "--genus", "2", "--weight", "4", "--trace-bound", "2", "--format", "json")
    assert a.stdout == b.stdout


def test_jobs_flag():
    serial = run_cli("coeff", "--genus", "2", "--weight", "4", "--trace-bound", "2",
                     "--format", "json")
    par = run_cli("coeff", "--genus", "2", "--weight", "4", "--trace-bound", "2",
                  "--format", "json", "--jobs", "2")
    assert par.returncode == 0, par.stderr
    assert json.loads(serial.stdout) == json.loads(par.stdout)


def test_env_precedence(monkeypatch):
    res = subprocess.run(
        [sys.executable, "-m", "siegel_eisenstein.cli", "coeff", "--trace-bound", "1",
         "--format", "json"],
        capture_output=True, text=True,
        env={"PATH": "/usr/bin:/bin", "SIEGEL_WEIGHT": "6", "SIEGEL_GENUS": "1",
             "PYTHONPATH": str(pathlib.Path(__file__).parents[1] / "src")})
    assert res.returncode == 0, res.stderr
    doc = json.loads(res.stdout)
    assert doc["spec"]["weight"] == 6
    # zeta(-5)/2 = -1/504
    assert doc["entries"][0]["value"] == "-1/504"


def test_exit_codes():
    assert run_cli("coeff", "--matrix", "garbage").returncode == 2
    assert run_cli("stabilize", "--genus", "1", "--weight", "4", "--p", "2").returncode == 3
    assert run_cli("coeff", "--genus", "5", "--weight", "8", "--trace-bound", "1").returncode == 3
    res = run_cli("verify", "--suite", "satake")
    assert res.returncode == 0
    assert "[PASS]" in res.stdout


def test_single_matrix_coeff():
    res = run_cli("coeff", "--genus", "2", "--weight", "4", "--matrix", "2,1;1,2",
                  "--format", "json")
    assert res.returncode == 0
    doc = json.loads(res.stdout)
    assert doc["entries"][0]["value"] == "-2/9"


def test_table_format():
    res = run_cli("coeff", "--genus", "1", "--weight", "4", "--trace-bound", "3")
    assert res.returncode == 0
    assert "1/240" in res.stdout
