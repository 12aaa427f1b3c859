import json
import subprocess
import sys
from pathlib import Path

import pytest

from ffexpand.cli import ExperimentConfig, main, run
from ffexpand import schemas


def invoke(args, cwd):
    return subprocess.run([sys.executable, "-m", "ffexpand.cli", *args],
                          capture_output=True, text=True, cwd=cwd)


def test_verify_exit_zero(tmp_path):
    res = invoke(["verify", "--field", "3^1", "--kernel", "(a+x)^2"], tmp_path)
    assert res.returncode == 0, res.stderr
    payload = json.loads(res.stdout)
    assert payload["ok"] is True


def test_malformed_kernel_exit_three(tmp_path):
    res = invoke(["spectrum", "--field", "7^1", "--kernel", "(a+x"], tmp_path)
    assert res.returncode == 3
    assert "error" in res.stderr.lower() or res.stderr


def test_invalid_kernel_hypothesis_exit_three(tmp_path):
    res = invoke(["verify", "--field", "2^1", "--kernel", "(a+x)^2"], tmp_path)
    assert res.returncode == 3
    assert "characteristic" in res.stderr


def test_injected_fault_exit_two(tmp_path):
    res = invoke(["cube-audit", "--field", "3^1", "--kernel", "(a+x)^2",
                  "--inject-adjacency-fault"], tmp_path)
    assert res.returncode == 2


def test_spectrum_sweep_artifacts_and_determinism(tmp_path):
    args = ["spectrum", "--field", "7^1,3^2,11^1,13^1", "--kernel", "(a+x)^2",
            "--seed", "5"]
    r1 = invoke([*args, "--out", "a.csv"], tmp_path)
    assert r1.returncode == 0, r1.stderr
    r2 = invoke([*args, "--out", "b.csv"], tmp_path)
    assert r2.returncode == 0
    a = (tmp_path / "a.csv").read_bytes()
    b = (tmp_path / "b.csv").read_bytes()
    assert a == b
    sa = json.loads((tmp_path / "a_summary.json").read_text())
    sb = json.loads((tmp_path / "b_summary.json").read_text())
    assert sa == sb
    assert (tmp_path / "a.png").exists()
    # 4 fields -> 4 records, 3 metrics each -> 13 csv lines with header
    assert len(a.decode().strip().split("\n")) == 13
    records = [json.loads(line) for line in (tmp_path / "a.jsonl").read_text().splitlines()]
    assert len(records) == 4
    for rec in records:
        schemas.validate(rec, "record")
        schemas.validate(rec["payload"], "spectral")


def test_no_figures_flag(tmp_path):
    res = invoke(["spectrum", "--field", "7^1", "--kernel", "(a+x)^2",
                  "--out", "nf.csv", "--no-figures"], tmp_path)
    assert res.returncode == 0
    assert not (tmp_path / "nf.png").exists()
    assert (tmp_path / "nf.csv").exists()


def test_curve_sweep_csv_columns(tmp_path):
    res = invoke(["curve-sweep", "--field", "3^1", "--kernel", "(a+x)^2",
                  "--out", "cs.csv"], tmp_path)
    assert res.returncode == 0, res.stderr
    lines = (tmp_path / "cs.csv").read_text().strip().split("\n")
    assert lines[0] == "q,a,b,c,d,N,D,abs_irred"
    assert len(lines) == 1 + 81
    summary = json.loads((tmp_path / "cs_summary.json").read_text())
    cell = summary["cells"][0]
    schemas.validate(cell, "curve_sweep")
    assert cell["reducible_count"] == 27 and cell["weil_violations"] == 0


def test_incidence_theorem_one_exit_zero(tmp_path):
    res = invoke(["incidence", "--theorem", "1", "--field", "7^1", "--trials", "25",
                  "--out", "inc.csv", "--seed", "2"], tmp_path)
    assert res.returncode == 0, res.stderr
    summary = json.loads((tmp_path / "inc_summary.json").read_text())
    assert summary["max_ratio"] <= 1 + 1e-9


def test_incidence_theorem_three_requires_kernel(tmp_path):
    res = invoke(["incidence", "--theorem", "3", "--field", "5^2", "--trials", "5"],
                 tmp_path)
    assert res.returncode == 3


def test_expand_preset(tmp_path):
    res = invoke(["expand", "--field", "5^2", "--preset", "erdos:k=2",
                  "--sizes", "10,10,10", "--trials", "2", "--out", "ex.csv"], tmp_path)
    assert res.returncode == 0, res.stderr
    summary = json.loads((tmp_path / "ex_summary.json").read_text())
    assert summary["violations"] == 0
    rows = (tmp_path / "ex.csv").read_text().strip().split("\n")
    assert len(rows) == 3


def test_expand_explicit_parts(tmp_path):
    res = invoke(["expand", "--field", "7^1", "--F", "(u+v)^2", "--G", "y*z",
                  "--H", "y+z", "--J", "x", "--sizes", "5,5,5", "--no-figures"],
                 tmp_path)
    assert res.returncode == 0, res.stderr


def test_composition_subcommand(tmp_path):
    res = invoke(["composition", "--field", "5^1", "--trials", "120", "--seed", "9"],
                 tmp_path)
    assert res.returncode == 0, res.stderr
    payload = json.loads(res.stdout)
    assert payload["failures"] == 0
    assert payload["cells"][0]["hypothesis_cases"] == 120


def test_config_file_with_flag_override(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"field": "7^1", "kernel": "(a+x)^2",
                               "trials": 5, "seed": 1}))
    res = invoke(["incidence", "--theorem", "1", "--config", str(cfg),
                  "--trials", "8", "--out", "cfg.csv", "--no-figures"], tmp_path)
    assert res.returncode == 0, res.stderr
    rows = (tmp_path / "cfg.csv").read_text().strip().split("\n")
    assert len(rows) == 1 + 8  # CLI --trials overrides the config file


def test_sweep_partial_failure_policy(tmp_path):
    # 2^1 cannot validate a degree-2 kernel; the sweep records the skip
    res = invoke(["spectrum", "--field", "7^1,2^1", "--kernel", "(a+x)^2",
                  "--out", "p.csv", "--no-figures"], tmp_path)
    assert res.returncode == 0, res.stderr
    summary = json.loads((tmp_path / "p_summary.json").read_text())
    assert len(summary["skipped"]) == 1
    assert summary["skipped"][0]["field"] == "2^1"


def test_run_api_config_hash_stability():
    c1 = ExperimentConfig("spectrum", ("7^1",), "(a+x)^2", seed=3)
    c2 = ExperimentConfig("spectrum", ("7^1",), "(a+x)^2", seed=3, out="x.csv")
    assert c1.hash() == c2.hash()  # output paths don't affect identity
    c3 = ExperimentConfig("spectrum", ("7^1",), "(a+x)^2", seed=4)
    assert c1.hash() != c3.hash()


def test_main_rejects_missing_field():
    assert main(["spectrum", "--kernel", "(a+x)^2"]) == 3
