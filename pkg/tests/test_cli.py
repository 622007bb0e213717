"""Tests for the command line interface: outputs, exit codes, determinism."""

import json
import math
import subprocess
import sys

import pytest

from kflats.cli import build_parser, main

BASE = ["--dim", "2", "--k", "1"]


def run_cli(args, tmp_path, name="out.txt", fmt=None):
    out = tmp_path / name
    argv = list(args) + ["--out", str(out)]
    if fmt:
        argv += ["--format", fmt]
    code = main(argv)
    text = out.read_text() if out.exists() else ""
    return code, text


def test_parser_requires_subcommand():
    assert main([]) == 2
    assert main(["frobnicate"]) == 2


def test_help_exits_cleanly():
    assert main(["--help"]) == 0
    assert main(["exact", "--help"]) == 0


def test_exact_csv_values(tmp_path):
    code, text = run_cli(["exact", *BASE, "--max-order", "4"], tmp_path)
    assert code == 0
    lines = text.splitlines()
    assert lines[0].startswith("# kflats exact ")
    assert "convention=invariant" in lines[0]
    rows = dict()
    for line in lines[2:]:
        name, order, value = line.split(",")
        rows[(name, order)] = float(value)
    assert rows[("mean", "")] == pytest.approx(math.pi, rel=1e-12)
    assert rows[("central_moment", "2")] == pytest.approx(16 / 3, rel=1e-12)
    assert rows[("cumulant", "3")] == pytest.approx(3 * math.pi, rel=1e-12)
    assert rows[("central_moment", "4")] == pytest.approx(102.4, rel=1e-12)
    assert rows[("covariance_0_1", "")] == pytest.approx(0.961912, abs=1e-6)
    assert rows[("berry_esseen_bound", "")] == pytest.approx(32.1383, abs=1e-3)


def test_exact_json_round_trips(tmp_path):
    code, text = run_cli(
        ["exact", *BASE, "--j", "0", "--max-order", "3"], tmp_path, fmt="json"
    )
    assert code == 0
    payload = json.loads(text)
    assert payload["config"]["j"] == 0
    assert payload["orders"] == [1, 2, 3]
    # j = 0 counts are Poisson: every cumulant equals the hit measure
    assert payload["cumulants"][1] == pytest.approx(2.0, rel=1e-12)
    assert payload["cumulants"][2] == pytest.approx(2.0, rel=1e-12)
    assert len(payload["covariance_matrix"]) == 2


def test_exact_rejects_bad_flags(tmp_path):
    assert run_cli(["exact", "--dim", "2", "--k", "2"], tmp_path)[0] == 2
    assert run_cli(["exact", "--dim", "0", "--k", "0"], tmp_path)[0] == 2
    assert run_cli(["exact", *BASE, "--j", "2"], tmp_path)[0] == 2
    assert run_cli(["exact", *BASE, "--intensity", "-1"], tmp_path)[0] == 2
    assert run_cli(["exact", *BASE, "--max-order", "0"], tmp_path)[0] == 2


def test_simulate_csv_structure(tmp_path):
    code, text = run_cli(
        ["simulate", *BASE, "--reps", "12", "--seed", "4"], tmp_path
    )
    assert code == 0
    lines = text.splitlines()
    assert lines[0].startswith("# kflats simulate ")
    assert "workers" not in lines[0]
    assert lines[1] == "rep,V0,V1"
    body = [l for l in lines if not l.startswith("#")][1:]
    assert len(body) == 12
    first = body[0].split(",")
    assert first[0] == "0"
    int(first[1])  # the count column renders as an integer
    assert any(l.startswith("# summary means=") for l in lines)


def test_simulate_json_summary(tmp_path):
    code, text = run_cli(
        ["simulate", *BASE, "--reps", "200", "--seed", "4"], tmp_path, fmt="json"
    )
    assert code == 0
    payload = json.loads(text)
    assert payload["columns"] == ["rep", "V0", "V1"]
    assert len(payload["samples"]) == 200
    assert payload["summary"]["count"] == 200
    assert payload["summary"]["means"][1] == pytest.approx(math.pi, abs=0.7)


def test_simulate_deterministic_across_workers(tmp_path):
    texts = []
    for w, name in ((1, "a"), (4, "b"), (8, "c")):
        code, text = run_cli(
            ["simulate", *BASE, "--reps", "5000", "--seed", "31",
             "--workers", str(w)],
            tmp_path, name=name,
        )
        assert code == 0
        texts.append(text)
    assert texts[0] == texts[1] == texts[2]


def test_simulate_repeat_runs_identical(tmp_path):
    a = run_cli(["simulate", *BASE, "--reps", "1000", "--seed", "7"], tmp_path, "a")
    b = run_cli(["simulate", *BASE, "--reps", "1000", "--seed", "7"], tmp_path, "b")
    assert a == b


def test_validate_exact_column_matches_exact_command(tmp_path):
    # the "exact" numbers in the validation table must be the same decimal
    # renderings the exact command emits for the same flags
    _, vtext = run_cli(
        ["validate", *BASE, "--reps", "5000", "--orders", "2", "--seed", "1"],
        tmp_path, name="v.csv",
    )
    _, etext = run_cli(["exact", *BASE, "--max-order", "2"], tmp_path, name="e.csv")
    exact_rows = {}
    for line in etext.splitlines()[2:]:
        name, order, value = line.split(",")
        exact_rows[(name, order)] = value
    validate_rows = {}
    for line in vtext.splitlines():
        if line.startswith("#") or line.startswith("name,"):
            continue
        name, exact, *_ = line.split(",")
        validate_rows[name] = exact
    assert validate_rows["mu_j1_m2"] == exact_rows[("central_moment", "2")]
    assert validate_rows["gamma_j1_m2"] == exact_rows[("cumulant", "2")]
    assert validate_rows["corr_0_1"] == exact_rows[("covariance_0_1", "")]


def test_simulate_budget_exit_code(tmp_path):
    code, _ = run_cli(
        ["simulate", *BASE, "--radius", "1e9", "--reps", "3"], tmp_path
    )
    assert code == 4


def test_io_error_exit_code(tmp_path):
    code = main(["exact", *BASE, "--out", str(tmp_path / "missing" / "x.csv")])
    assert code == 3


def test_validate_passes_and_reports(tmp_path):
    code, text = run_cli(
        ["validate", *BASE, "--reps", "20000", "--orders", "3", "--seed", "11"],
        tmp_path, fmt="json",
    )
    assert code == 0
    payload = json.loads(text)
    assert payload["passed"] is True
    assert payload["max_abs_z"] <= 4.0
    names = [row["name"] for row in payload["rows"]]
    assert "mu_j1_m2" in names
    assert "gamma_j1_m3" in names
    assert "corr_0_1" in names
    for row in payload["rows"]:
        if row["standard_error"] > 0:
            expect = (row["estimate"] - row["exact"]) / row["standard_error"]
            assert row["z"] == pytest.approx(expect, rel=1e-12)


def test_validate_detects_wrong_exact_values(tmp_path):
    code, text = run_cli(
        ["validate", *BASE, "--reps", "20000", "--orders", "2", "--seed", "11",
         "--corrupt-exact"],
        tmp_path, fmt="json",
    )
    assert code == 1
    assert json.loads(text)["passed"] is False


def test_validate_rejects_deep_orders(tmp_path):
    code, _ = run_cli(["validate", *BASE, "--orders", "7"], tmp_path)
    assert code == 2
    code, _ = run_cli(["validate", *BASE, "--orders", "1"], tmp_path)
    assert code == 2


def test_clt_json_consistent_with_exit_code(tmp_path):
    code, text = run_cli(
        ["clt", *BASE, "--rhos", "2,4,8", "--reps", "4000", "--seed", "6",
         "--slope-halfwidth", "0.6"],
        tmp_path, fmt="json",
    )
    payload = json.loads(text)
    assert payload["target_slope"] == -0.5
    assert code == (0 if payload["passed"] else 1)
    assert len(payload["distances"]) == 3
    assert all(d <= b for d, b in zip(payload["distances"], payload["bounds"]))


def test_clt_rejects_bad_rho_lists(tmp_path):
    assert run_cli(["clt", *BASE, "--rhos", "1,2"], tmp_path)[0] == 2
    assert run_cli(["clt", *BASE, "--rhos", "0.5,2,4"], tmp_path)[0] == 2
    assert run_cli(["clt", *BASE, "--rhos", "a,b,c"], tmp_path)[0] == 2


def test_module_entry_point():
    out = subprocess.run(
        [sys.executable, "-m", "kflats", "--help"], capture_output=True, text=True
    )
    assert out.returncode == 0
    assert "exact" in out.stdout and "simulate" in out.stdout


def test_parser_lists_all_subcommands():
    parser = build_parser()
    text = parser.format_help()
    for sub in ("exact", "simulate", "validate", "clt"):
        assert sub in text
