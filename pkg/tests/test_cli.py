import json
import subprocess
import sys
from fractions import Fraction

import pytest

from lpreps.cli import manifest_hash, run


def run_json(tmp_path, argv, name="out.json"):
    out = tmp_path / name
    code = run(argv + ["--out", str(out)])
    data = json.loads(out.read_text()) if out.exists() else None
    return code, data


def test_integrate_command(tmp_path):
    code, data = run_json(tmp_path, ["integrate", "--corpus", "indicator_half", "--p", "1",
                                     "--box", "1/4:3/4", "--prec", "6"])
    assert code == 0
    value = Fraction(data["result"]["value"].replace("/2^", "/2**")) if "^" in data["result"]["value"] \
        else Fraction(data["result"]["value"])
    assert abs(value - Fraction(1, 4)) < Fraction(1, 64)
    assert data["version"] and data["manifest_hash"] == manifest_hash(data["manifest"])


def test_missing_flags_and_bad_literals_exit_1(tmp_path):
    assert run(["integrate", "--corpus", "indicator_half", "--box", "1/4:3/4", "--prec", "6"]) == 1
    assert run(["evaluate", "--corpus", "identity", "--point", "1/3", "--prec", "4"]) == 1
    assert run(["bogus"]) == 1
    assert run([]) == 1
    assert run(["--manifest", str(tmp_path / "missing.json")]) == 1


def test_evaluate_translate_differentiate(tmp_path):
    assert run_json(tmp_path, ["evaluate", "--corpus", "hat", "--point", "1/4", "--prec", "6"])[0] == 0
    assert run_json(tmp_path, ["translate", "--corpus", "indicator_half", "--p", "1", "--prec", "2"])[0] == 0
    assert run_json(tmp_path, ["translate", "--corpus", "identity", "--p", "1", "--prec", "2",
                               "--direction", "cauchy-to-xp"])[0] == 0
    assert run_json(tmp_path, ["differentiate", "--corpus", "half_square", "--prec", "4"])[0] == 0


def test_norm_needs_a_budget(tmp_path):
    assert run(["norm", "--corpus", "hat", "--p", "1", "--prec", "2", "--out", str(tmp_path / "a")]) == 3
    code, data = run_json(tmp_path, ["norm", "--corpus", "hat", "--p", "1", "--prec", "2",
                                     "--budget", str(2**62)])
    assert code == 0


def test_budget_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("LPREPS_BUDGET", "0")
    assert run(["integrate", "--corpus", "indicator_half", "--p", "1", "--box", "1/4:3/4",
                "--prec", "6", "--out", str(tmp_path / "x")]) == 3


def test_fault_injection_exits_2(tmp_path):
    argv = ["integrate", "--corpus", "indicator_half", "--p", "1", "--box", "1/4:3/4", "--prec", "5"]
    assert run(argv + ["--out", str(tmp_path / "ok")]) == 0
    assert run(argv + ["--fault-offset", "1/2^5", "--out", str(tmp_path / "bad")]) == 2
    assert run(["validate", "--corpus", "hat", "--rep", "xs", "--fault-offset", "1/2^3",
                "--prec", "4", "--out", str(tmp_path / "bad2")]) == 2


def test_validate_zero(tmp_path):
    code, data = run_json(tmp_path, ["validate", "--corpus", "zero", "--rep", "xs"])
    assert code == 0 and data["result"]["pass"]


def test_demo(tmp_path):
    code, data = run_json(tmp_path, ["demo-discontinuity", "--m", "3"])
    assert code == 0
    row = data["result"]["rows"][2]
    assert row["agreement_prefix"] == 2 and row["norm_l1"] == "1"


def test_entropy_csv_is_reproducible(tmp_path):
    argv = ["entropy", "--class", "aa", "--modulus", "n", "--n-range", "0:2"]
    assert run(argv + ["--out", str(tmp_path / "a.csv")]) == 0
    assert run(argv + ["--out", str(tmp_path / "b.csv")]) == 0
    a, b = (tmp_path / "a.csv").read_bytes(), (tmp_path / "b.csv").read_bytes()
    assert a == b
    lines = a.decode().splitlines()
    assert lines[0].startswith("# version=")
    assert "n,spanning_exponent" in a.decode()


def test_manifest_file(tmp_path):
    manifest = tmp_path / "run.json"
    out = tmp_path / "m.csv"
    manifest.write_text(json.dumps({"command": "entropy", "class": "lipschitz", "n_range": "0:2",
                                    "out": str(out)}))
    assert run(["--manifest", str(manifest)]) == 0
    assert out.read_text().count("\n") >= 4
    manifest.write_text("{not json")
    assert run(["--manifest", str(manifest)]) == 1


def test_profile_reports(tmp_path):
    code, data = run_json(tmp_path, ["profile", "--op", "integrate", "--n-min", "1", "--n-max", "10"])
    assert code == 0
    rows = data["result"]["operations"][0]["rows"]
    assert [r["queries"] for r in rows] == [3] * 10
    assert all(r["within_bound"] for r in rows)
    suite = tmp_path / "empty.json"
    suite.write_text(json.dumps({"operations": []}))
    code, data = run_json(tmp_path, ["profile", "--suite", str(suite)], "empty_out.json")
    assert code == 0 and data["result"]["operations"] == []


def test_profile_norm_doubles(tmp_path):
    code, data = run_json(tmp_path, ["profile", "--op", "norm", "--corpus", "hat", "--n-min", "0",
                                     "--n-max", "2", "--budget", str(2**62)])
    assert code == 0
    rows = data["result"]["operations"][0]["rows"]
    for a, b in zip(rows, rows[1:]):
        assert b["queries"] >= 2 * a["queries"]


def test_console_entry_point():
    out = subprocess.run([sys.executable, "-m", "lpreps.cli", "--version"], capture_output=True, text=True)
    assert out.returncode == 0 and "lpreps" in out.stdout


@pytest.mark.parametrize("modulus", ["n+2", "1*n+2", "2,3,4"])
def test_modulus_flag_forms(tmp_path, modulus):
    code, _ = run_json(tmp_path, ["validate", "--corpus", "indicator_half", "--rep", "xp", "--p", "1",
                                  "--modulus", modulus, "--prec", "4"])
    assert code == 0
