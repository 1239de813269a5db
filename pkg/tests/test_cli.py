"""Tests for the experiment harness: file outputs, determinism, exit codes."""

import json
import subprocess
import sys

import numpy as np
import pytest

from shallowreg import cli


def run_cli(args):
    return cli.main(args)


# ---------------------------------------------------------- interpolate-demo

def test_interpolate_demo_outputs(tmp_path):
    rc = run_cli(["interpolate-demo", "--n", "16", "--sigma", "1.0",
                  "--reps", "12", "--seed", "4", "--out", str(tmp_path)])
    assert rc == 0
    payload = json.loads((tmp_path / "interpolate_demo.json").read_text())
    assert len(payload["replications"]) == 12
    assert all(r["train_mse"] <= 1e-9 for r in payload["replications"])
    agg = payload["aggregate"]["empirical_error"]
    assert 0.4 <= agg["mean"] <= 1.8   # 12 reps only; wide band
    assert agg["ci95"][0] <= agg["mean"] <= agg["ci95"][1]


def test_interpolate_demo_sigma_zero(tmp_path):
    run_cli(["interpolate-demo", "--n", "8", "--sigma", "0", "--reps", "5",
             "--seed", "1", "--out", str(tmp_path)])
    payload = json.loads((tmp_path / "interpolate_demo.json").read_text())
    assert all(r["empirical_error"] == 0.0 for r in payload["replications"])


# --------------------------------------------------------------------- sweep

def sweep_args(out, extra=()):
    return ["sweep", "--model", "zero", "--n", "24", "--d", "2",
            "--sigma", "1.0", "--k-grid", "1", "2", "4", "8", "16",
            "--lambda-grid", "0", "0.01", "schedule:c=1",
            "--reps", "4", "--seed", "7", "--n-test", "256",
            "--out", str(out), *extra]


def test_sweep_csv_row_count(tmp_path):
    # |k_grid| = 5, |lambda_grid| = 3, reps = 4 -> 60 data rows
    assert run_cli(sweep_args(tmp_path)) == 0
    lines = (tmp_path / "sweep.csv").read_text().strip().splitlines()
    assert lines[0] == ("k,lambda,rep,seed,train_mse,empirical_error,"
                       "prediction_error,pred_se,penalty_value,iters,converged")
    assert len(lines) == 1 + 60


def test_sweep_summary_and_envelope(tmp_path):
    run_cli(sweep_args(tmp_path))
    summary = json.loads((tmp_path / "sweep_summary.json").read_text())
    assert len(summary["aggregates"]) == 15
    assert len(summary["envelope"]) == 5
    for k_entry in summary["envelope"]:
        cell_means = [a["prediction_mean"] for a in summary["aggregates"]
                      if a["k"] == k_entry["k"]]
        assert k_entry["prediction_mean"] == min(cell_means)
    svg = (tmp_path / "sweep.svg").read_text()
    assert svg.startswith("<svg") and svg.rstrip().endswith("</svg>")
    assert "best-lambda envelope" in svg
    assert "schedule:c=1" in svg


def test_sweep_overfitting_signature(tmp_path):
    # lambda = 0 with k >> n on pure noise: residuals vanish on the training
    # points while the prediction error stays far from zero
    rc = run_cli(["sweep", "--model", "zero", "--n", "16", "--d", "2",
                  "--sigma", "1.0", "--k-grid", "64", "--lambda-grid", "0",
                  "--reps", "3", "--seed", "9", "--n-test", "512",
                  "--out", str(tmp_path)])
    assert rc == 0
    summary = json.loads((tmp_path / "sweep_summary.json").read_text())
    cell = summary["aggregates"][0]
    assert cell["train_mse_mean"] <= 0.02          # residuals near zero...
    assert cell["prediction_mean"] >= 0.1          # ...but no generalization
    assert cell["prediction_mean"] >= 10 * cell["train_mse_mean"]


def test_sweep_config_manifest_with_flag_override(tmp_path):
    manifest = {
        "model_id": "zero", "n": 20, "d": 2, "sigma": 1.0,
        "k_grid": [1, 2], "lambda_grid": [0.01], "reps": 2, "seed": 3,
        "n_test": 128, "output_dir": str(tmp_path / "a"),
    }
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(manifest))
    assert run_cli(["sweep", "--config", str(cfg_path)]) == 0
    assert (tmp_path / "a" / "sweep.csv").exists()
    # --reps flag overrides the manifest
    assert run_cli(["sweep", "--config", str(cfg_path), "--reps", "1",
                    "--out", str(tmp_path / "b")]) == 0
    lines_a = (tmp_path / "a" / "sweep.csv").read_text().splitlines()
    lines_b = (tmp_path / "b" / "sweep.csv").read_text().splitlines()
    assert len(lines_a) == 1 + 4 and len(lines_b) == 1 + 2


def test_sweep_accepts_full_figure_grid_config(tmp_path):
    # the full-scale experiment passes validation (not executed here)
    cfg = dict(cli.SWEEP_DEFAULTS)
    cfg.update({"n": 1024, "d": 32,
                "k_grid": [1, 2, 3, 5, 7, 11, 17, 25, 38, 57, 86, 129, 194,
                           291, 437, 656, 985, 1477, 2216, 3325],
                "reps": 3, "output_dir": str(tmp_path)})
    assert cli._validate_sweep(cfg)["k_grid"][-1] == 3325


def test_sweep_rejects_bad_pairs_and_grids(tmp_path):
    base = ["sweep", "--out", str(tmp_path), "--n", "16", "--d", "2",
            "--model", "zero", "--reps", "1", "--n-test", "64"]
    assert run_cli(base + ["--activation", "sigmoid"]) == 2
    assert run_cli(base + ["--lambda-grid", "-0.5"]) == 2
    assert run_cli(base + ["--lambda-grid", "schedule:c=-1"]) == 2
    assert run_cli(base + ["--lambda-grid", "sched:c=1"]) == 2


def test_sweep_worker_pool_matches_serial(tmp_path):
    base = ["sweep", "--model", "zero", "--n", "16", "--d", "2",
            "--sigma", "1.0", "--k-grid", "2", "4", "--lambda-grid", "0.01",
            "--reps", "2", "--seed", "13", "--n-test", "128"]
    assert run_cli(base + ["--out", str(tmp_path / "serial")]) == 0
    assert run_cli(base + ["--workers", "2",
                           "--out", str(tmp_path / "pool")]) == 0
    assert (tmp_path / "serial" / "sweep.csv").read_bytes() == \
        (tmp_path / "pool" / "sweep.csv").read_bytes()


def test_sweep_model_dimension_error_is_config_error(tmp_path):
    rc = run_cli(["sweep", "--model", "fig2", "--n", "8", "--d", "3",
                  "--k-grid", "1", "--lambda-grid", "0.1", "--reps", "1",
                  "--n-test", "64", "--out", str(tmp_path)])
    assert rc == 2


def test_solver_failure_exit_code(tmp_path, monkeypatch):
    from shallowreg.fit import SolveError

    def boom(*args, **kwargs):
        raise SolveError("injected")

    monkeypatch.setattr(cli, "fit_alternating_ridge", boom)
    rc = run_cli(["sweep", "--model", "zero", "--n", "8", "--d", "1",
                  "--k-grid", "1", "--lambda-grid", "0.1", "--reps", "1",
                  "--n-test", "64", "--out", str(tmp_path)])
    assert rc == 3


# -------------------------------------------------------------------- theory

def test_theory_shapes(tmp_path):
    rc = run_cli(["theory", "--alpha", "2", "--beta", "0", "--n", "10000",
                  "--c", "1", "--k-max", "120", "--out", str(tmp_path / "dd")])
    assert rc == 0
    header = json.loads((tmp_path / "dd" / "theory_curve.json").read_text())
    assert header["shape"] == "DoubleDescent"

    run_cli(["theory", "--alpha", "1", "--beta", "0", "--n", "10000",
             "--c", "1", "--k-max", "120", "--out", str(tmp_path / "mono")])
    header = json.loads((tmp_path / "mono" / "theory_curve.json").read_text())
    assert header["shape"] == "Monotone"

    lines = (tmp_path / "dd" / "theory_curve.csv").read_text().splitlines()
    assert len(lines) == 1 + 120


def test_theory_domain_error(tmp_path):
    rc = run_cli(["theory", "--alpha", "1", "--beta", "0.25", "--n", "256",
                  "--c", "1", "--k-max", "5000", "--out", str(tmp_path)])
    assert rc == 2


# ---------------------------------------------------------------- complexity

def test_complexity_homogeneity_and_records(tmp_path):
    rc = run_cli(["complexity", "--class", "pathnorm", "--M", "1", "2",
                  "--n", "16", "--k", "2", "--d", "2", "--draws", "4",
                  "--restarts", "4", "--steps", "40", "--seed", "6",
                  "--out", str(tmp_path)])
    assert rc == 0
    records = [json.loads(line) for line in
               (tmp_path / "complexity.jsonl").read_text().splitlines()]
    assert len(records) == 2
    by_M = {r["M"]: r["value"] for r in records}
    assert by_M[2.0] == pytest.approx(2.0 * by_M[1.0], rel=1e-9)
    assert all(r["estimate"] == "lower" for r in records)


def test_complexity_singleton_zero(tmp_path):
    run_cli(["complexity", "--class", "singleton-zero", "--M", "1",
             "--n", "8", "16", "--k", "1", "--d", "2", "--draws", "3",
             "--seed", "0", "--out", str(tmp_path)])
    records = [json.loads(line) for line in
               (tmp_path / "complexity.jsonl").read_text().splitlines()]
    assert all(r["value"] == 0.0 for r in records)
    summary = json.loads((tmp_path / "complexity_summary.json").read_text())
    assert summary["log_value_vs_log_n_slope"] == {}


def test_complexity_slope_summary(tmp_path):
    run_cli(["complexity", "--class", "pathnorm", "--M", "1",
             "--n", "16", "64", "--k", "4", "--d", "2", "--draws", "6",
             "--restarts", "6", "--steps", "60", "--seed", "2",
             "--out", str(tmp_path)])
    summary = json.loads((tmp_path / "complexity_summary.json").read_text())
    slope = summary["log_value_vs_log_n_slope"]["M=1.0,k=4"]
    assert -1.0 < slope < 0.0


# ----------------------------------------------------------------------- fit

def test_fit_prints_json(capsys):
    rc = run_cli(["fit", "--model", "zero", "--n", "16", "--d", "2",
                  "--sigma", "1", "--k", "3", "--lambda", "0.05",
                  "--seed", "2"])
    assert rc == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["net"]["activation"] == "relu"
    assert len(payload["net"]["a"]) == 3
    assert payload["train_mse"] >= 0.0


def test_fit_schedule_lambda_and_outfile(tmp_path, capsys):
    out = tmp_path / "fit.json"
    rc = run_cli(["fit", "--model", "zero", "--n", "16", "--d", "1",
                  "--sigma", "1", "--k", "8", "--lambda", "schedule:c=0.5",
                  "--seed", "3", "--out", str(out)])
    assert rc == 0
    assert json.loads(out.read_text())["iters"] >= 1


def test_fit_sigmoid_path(capsys):
    rc = run_cli(["fit", "--model", "zero", "--n", "12", "--d", "1",
                  "--sigma", "1", "--k", "2", "--lambda", "0.01",
                  "--activation", "sigmoid", "--seed", "1"])
    assert rc == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["net"]["activation"] == "sigmoid"


# -------------------------------------------------------------- determinism

def run_subprocess(args, cwd):
    return subprocess.run([sys.executable, "-m", "shallowreg.cli", *args],
                          cwd=cwd, capture_output=True, text=True)


@pytest.mark.parametrize("args,files", [
    (["interpolate-demo", "--n", "12", "--sigma", "1", "--reps", "6",
      "--seed", "11"], ["interpolate_demo.json"]),
    (["theory", "--alpha", "1.5", "--beta", "0.1", "--n", "4096",
      "--c", "2", "--k-max", "200"],
     ["theory_curve.csv", "theory_curve.json"]),
    (["sweep", "--model", "zero", "--n", "20", "--d", "2", "--sigma", "1",
      "--k-grid", "2", "8", "--lambda-grid", "0", "schedule:c=1",
      "--reps", "2", "--seed", "5", "--n-test", "128"],
     ["sweep.csv", "sweep_summary.json", "sweep.svg"]),
    (["complexity", "--class", "pathnorm", "--M", "1", "--n", "12",
      "--k", "2", "--d", "2", "--draws", "3", "--restarts", "4",
      "--steps", "30", "--seed", "8"],
     ["complexity.jsonl", "complexity_summary.json"]),
])
def test_byte_identical_reruns(tmp_path, args, files):
    d1, d2 = tmp_path / "one", tmp_path / "two"
    for d in (d1, d2):
        proc = run_subprocess(args + ["--out", str(d)], tmp_path)
        assert proc.returncode == 0, proc.stderr
    for name in files:
        assert (d1 / name).read_bytes() == (d2 / name).read_bytes(), name
