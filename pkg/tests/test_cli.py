import csv
import io
import json
import subprocess
import sys

import pytest

from nonresidue.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_sv_verify_example(capsys):
    code, out, _ = run(capsys, "sv-verify", "--T", "2", "--d", "1", "--r", "2", "--points", "3,9")
    rec = json.loads(out)
    assert code == 0
    assert rec["det"] == (3 - 9) ** 4 == 1296 and rec["match"]


def test_sv_verify_negative_points_and_cross_check(capsys):
    code, out, _ = run(capsys, "sv-verify", "--T", "4", "--d", "1", "--r", "3",
                       "--points=-3,5,11", "--cross-check", "--p", "101")
    rec = json.loads(out)
    assert code == 0 and rec["match"] and rec["C"] == 20 and rec["C_nonzero_mod_p"]


def test_hankel_example(capsys):
    code, out, _ = run(capsys, "hankel", "--n", "2", "--m", "1", "--l", "1")
    rec = json.loads(out)
    assert code == 0 and rec["direct"] == rec["closed_form"] == 3 and rec["match"]


def test_block_constant(capsys):
    code, out, _ = run(capsys, "block-constant", "--T", "6", "--d", "2", "--r", "3")
    rec = json.loads(out)
    assert code == 0 and rec["match"] and rec["ends_are_one"]


def test_residue_and_least_nonresidue(capsys):
    code, out, _ = run(capsys, "residue", "--p", "13", "--k", "3", "--a", "5")
    assert code == 0 and json.loads(out)["residue"] is True
    code, out, _ = run(capsys, "least-nonresidue", "--p", "41", "--k", "8")
    rec = json.loads(out)
    assert code == 0 and (rec["value"], rec["bound"], rec["holds"]) == (2, 12, True)


def test_scan_theorem_example(capsys):
    code, out, _ = run(capsys, "scan-theorem", "--primes", "5..1000", "--k", "all", "--b", "1", "--c", "1")
    assert code == 0
    assert json.loads(out)["summary"]["violations"] == 0


def test_scan_corollary_violation_exits_1(capsys):
    code, out, _ = run(capsys, "scan-corollary", "--primes", "23..23", "--k", "11",
                       "--classes", "nonresidue")
    assert code == 1
    assert json.loads(out)["summary"]["violations"] == 1


def test_scan_corollary_coset_class(capsys):
    code, out, _ = run(capsys, "scan-corollary", "--primes", "5..500", "--classes", "residue,coset")
    assert code == 0
    assert {r["class"] for r in json.loads(out)["rows"]} == {"residue", "coset"}


def test_scan_lemma(capsys):
    code, out, _ = run(capsys, "--seed", "4", "scan-lemma", "--primes", "101..200", "--samples", "2")
    report = json.loads(out)
    assert code == 0 and report["config"]["seed"] == 4
    assert report["summary"]["rows"] == 2 * 21


def test_stepanov_build(capsys):
    code, out, _ = run(capsys, "stepanov-build", "--p", "101", "--t", "50",
                       "--shifts", "0,1,2", "--targets", "1,1,1", "--compare-literal")
    rec = json.loads(out)
    assert code == 0
    assert rec["multiplicity_ok"] and rec["literal_rows_same_space"]
    assert all(m >= rec["params"]["M"] for m in rec["multiplicities"])


def test_global_flags_after_subcommand(capsys, tmp_path):
    path = tmp_path / "scan.csv"
    code, out, err = run(capsys, "scan-theorem", "--primes", "5..50", "--format", "csv", "--out", str(path))
    assert code == 0 and out == ""
    assert str(path) in err
    rows = list(csv.DictReader(io.StringIO(path.read_text(encoding="utf-8"))))
    assert rows and all(r["holds"] == "1" for r in rows)


def test_record_csv(capsys):
    code, out, _ = run(capsys, "--format", "csv", "hankel", "--n", "3", "--m", "1", "--l", "2")
    header, row = out.splitlines()
    assert code == 0 and header.split(",")[:3] == ["n", "m", "l"] and row.startswith("3,1,2,")


@pytest.mark.parametrize("argv", [
    ["bogus"],
    [],
    ["hankel", "--n", "2"],
    ["residue", "--p", "12", "--k", "2", "--a", "1"],
    ["scan-theorem", "--primes", "2..10"],
    ["scan-theorem", "--k", "seven"],
    ["sv-verify", "--T", "3", "--d", "1", "--r", "2", "--points", "1,2"],
    ["stepanov-build", "--p", "13", "--t", "4", "--shifts", "0,1,2,3,4,5", "--targets", "1,1,1,1,1,1"],
])
def test_usage_errors_exit_2(capsys, argv):
    code, _, _ = run(capsys, *argv)
    assert code == 2


def test_unwritable_output_exit_2(capsys, tmp_path):
    bad = tmp_path / "nope" / "out.json"
    code, _, err = run(capsys, "scan-theorem", "--primes", "5..20", "--out", str(bad))
    assert code == 2 and str(bad) in err


def test_help_exits_0(capsys):
    assert main(["--help"]) == 0


def test_scan_output_deterministic(capsys):
    argv = ["--seed", "9", "scan-lemma", "--primes", "101..300"]
    assert run(capsys, *argv)[1] == run(capsys, *argv)[1]


def test_module_entry_point_and_env_jobs(tmp_path):
    env = {"STEPANOV_JOBS": "2", "PATH": ""}
    args = [sys.executable, "-m", "nonresidue", "scan-theorem", "--primes", "5..300"]
    parallel = subprocess.run(args, capture_output=True, text=True, env=env)
    serial = subprocess.run(args + ["--jobs", "1"], capture_output=True, text=True, env=env)
    assert parallel.returncode == serial.returncode == 0
    assert parallel.stdout == serial.stdout
