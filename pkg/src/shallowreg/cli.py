"""Experiment harness.

Subcommands::

    interpolate-demo   exact-interpolation / inconsistency demonstration
    sweep              (k, lambda, rep) grid experiment with CSV/JSON/SVG output
    theory             closed-form bound curve artifacts
    complexity         Monte-Carlo complexity estimates as JSON lines
    fit                one penalized fit, printed as JSON

Every subcommand accepts ``--config FILE`` with a JSON manifest; explicit
flags override manifest fields. Exit codes: 0 success, 2 configuration
error, 3 solver failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from ._rng import derive_seed
from .complexity import (GAUSSIAN, RADEMACHER, L1OuterBall, PathNormBall,
                         SearchConfig, Singleton, complexity_estimate)
from .data import MODEL_GENERATORS, gen_zero_model, generate
from .fit import (FitConfig, SolveError, fit_alternating_ridge,
                  fit_sigmoid_l1, lambda_schedule, pick_regime)
from .metrics import (ErrorReport, aggregate, empirical_error,
                      prediction_error_mc)
from .netcore import RELU, SIGMOID, ShallowNet, build_relu_interpolant_1d
from .svg import render_line_plot
from .theory import bound_curve

DEFAULT_LAMBDA_GRID = [0.0, 1e-4, 1e-3, 1e-2, 1e-1]


class ConfigError(ValueError):
    """Invalid harness configuration."""


def _agg_dict(values) -> dict:
    mean, sd, ci = aggregate(values)
    return {"mean": mean, "sd": sd, "ci95": list(ci)}


def _write_json(path: Path, payload) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


# ---------------------------------------------------------------- interpolate

def cmd_interpolate_demo(n: int, sigma: float, reps: int, seed: int,
                         out_dir: Path) -> Path:
    """Replicate the pure-noise 1-D interpolation experiment.

    Per replication: draw zero-model data, build the piecewise-linear ReLU
    interpolant, record its training MSE (machine zero by construction)
    and its empirical error against the true regression function m = 0,
    whose expectation equals the noise variance.
    """
    if n < 2:
        raise ConfigError("interpolate-demo needs n >= 2")
    if reps < 1:
        raise ConfigError("reps must be >= 1")
    rows = []
    for rep in range(reps):
        ds = gen_zero_model(n, 1, sigma, derive_seed(seed, "interp-rep", rep))
        net = build_relu_interpolant_1d(ds.X[:, 0], ds.y)
        preds = net.eval(ds.X)
        rows.append({
            "rep": rep,
            "train_mse": float(np.mean((preds - ds.y) ** 2)),
            "empirical_error": empirical_error(preds, ds.m_true),
            "neurons": net.k,
        })
    payload = {
        "config": {"n": n, "sigma": sigma, "reps": reps, "seed": seed},
        "replications": rows,
        "aggregate": {
            "train_mse": _agg_dict([r["train_mse"] for r in rows])
            if reps > 1 else {"mean": rows[0]["train_mse"]},
            "empirical_error": _agg_dict([r["empirical_error"] for r in rows])
            if reps > 1 else {"mean": rows[0]["empirical_error"]},
        },
    }
    path = out_dir / "interpolate_demo.json"
    _write_json(path, payload)
    return path


# ---------------------------------------------------------------------- sweep

SWEEP_DEFAULTS = {
    "model_id": "fig2",
    "n": 256,
    "d": 8,
    "sigma": 0.2,
    "k_grid": [1, 2, 4, 8, 16, 32, 64, 128, 256, 512],
    "lambda_grid": DEFAULT_LAMBDA_GRID,
    "reps": 10,
    "seed": 0,
    "activation": RELU,
    "penalty_kind": "l2sum",
    "n_test": 4096,
    "output_dir": ".",
    "workers": 1,
    "beta": 0.0,
    "fit": {},
}


def _lambda_label(entry) -> str:
    return entry if isinstance(entry, str) else repr(float(entry))


def _resolve_lambda(entry, n: int, k: int, beta: float) -> float:
    if isinstance(entry, str):
        if not entry.startswith("schedule:c="):
            raise ConfigError(f"bad lambda entry {entry!r}; expected a number "
                              "or 'schedule:c=<val>'")
        try:
            c = float(entry.split("=", 1)[1])
        except ValueError:
            raise ConfigError(f"bad schedule constant in {entry!r}") from None
        if not c > 0:
            raise ConfigError("schedule constant must be positive")
        return lambda_schedule(pick_regime(n, k, beta), n, k, beta, c)
    lam = float(entry)
    if lam < 0:
        raise ConfigError("lambda must be >= 0")
    return lam


def _validate_sweep(cfg: dict) -> dict:
    cfg = dict(cfg)
    if cfg["model_id"] not in MODEL_GENERATORS:
        raise ConfigError(f"unknown model_id {cfg['model_id']!r}")
    if not cfg["k_grid"]:
        raise ConfigError("k_grid must be non-empty")
    if not cfg["lambda_grid"]:
        raise ConfigError("lambda_grid must be non-empty")
    if cfg["reps"] < 1:
        raise ConfigError("reps must be >= 1")
    if cfg["n_test"] < 2:
        raise ConfigError("n_test must be >= 2")
    pair = (cfg["activation"], cfg["penalty_kind"])
    if pair not in ((RELU, "l2sum"), (SIGMOID, "l1outer")):
        raise ConfigError(
            "unsupported (activation, penalty) pair; solvers exist for "
            "(relu, l2sum) and (sigmoid, l1outer)")
    if cfg["workers"] < 1:
        raise ConfigError("workers must be >= 1")
    try:
        FitConfig(**cfg["fit"])
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad fit options: {exc}") from None
    return cfg


def _run_cell(payload: dict) -> dict:
    ds = generate(payload["model_id"], payload["n"], payload["d"],
                  payload["sigma"], payload["data_seed"])
    cfg = FitConfig(init_seed=payload["init_seed"], **payload["fit"])
    if payload["activation"] == RELU:
        res = fit_alternating_ridge(ds, payload["k"], payload["lam"], cfg)
    else:
        res = fit_sigmoid_l1(ds, payload["k"], payload["lam"], cfg)
    preds = res.net.eval(ds.X)
    pred, pred_se = prediction_error_mc(res.net, payload["model_id"],
                                        payload["n_test"],
                                        payload["test_seed"])
    report = ErrorReport(empirical=empirical_error(preds, ds.m_true),
                         prediction=pred, pred_se=pred_se,
                         n_test=payload["n_test"], train_mse=res.train_mse)
    return {
        "k": payload["k"],
        "lambda": payload["lam"],
        "lambda_label": payload["lam_label"],
        "rep": payload["rep"],
        "seed": payload["data_seed"],
        "train_mse": report.train_mse,
        "empirical_error": report.empirical,
        "prediction_error": report.prediction,
        "pred_se": report.pred_se,
        "penalty_value": res.penalty_value,
        "iters": res.iters,
        "converged": res.converged,
    }


def cmd_sweep(cfg: dict) -> dict:
    """Run the (k, lambda, rep) grid and write CSV, JSON summary and SVG.

    The dataset seed depends only on the replication index, so every
    (k, lambda) cell of a replication sees the same training sample and
    the same Monte-Carlo test sample; comparisons across cells are paired.
    """
    cfg = _validate_sweep(cfg)
    out_dir = Path(cfg["output_dir"])
    out_dir.mkdir(parents=True, exist_ok=True)
    seed = cfg["seed"]
    beta = cfg["beta"]

    payloads = []
    for k in cfg["k_grid"]:
        for entry in cfg["lambda_grid"]:
            lam = _resolve_lambda(entry, cfg["n"], k, beta)
            label = _lambda_label(entry)
            for rep in range(cfg["reps"]):
                payloads.append({
                    "model_id": cfg["model_id"],
                    "n": cfg["n"],
                    "d": cfg["d"],
                    "sigma": cfg["sigma"],
                    "k": int(k),
                    "lam": lam,
                    "lam_label": label,
                    "rep": rep,
                    "data_seed": derive_seed(seed, "sweep-data", rep),
                    "init_seed": derive_seed(seed, "sweep-init", int(k),
                                             repr(lam), rep),
                    "test_seed": derive_seed(seed, "sweep-test", rep),
                    "activation": cfg["activation"],
                    "n_test": cfg["n_test"],
                    "fit": cfg["fit"],
                })

    if cfg["workers"] > 1:
        with ProcessPoolExecutor(max_workers=cfg["workers"]) as pool:
            rows = list(pool.map(_run_cell, payloads, chunksize=1))
    else:
        rows = [_run_cell(p) for p in payloads]

    csv_path = out_dir / "sweep.csv"
    with open(csv_path, "w") as fh:
        fh.write("k,lambda,rep,seed,train_mse,empirical_error,"
                 "prediction_error,pred_se,penalty_value,iters,converged\n")
        for r in rows:
            fh.write(",".join([
                str(r["k"]), repr(r["lambda"]), str(r["rep"]), str(r["seed"]),
                repr(r["train_mse"]), repr(r["empirical_error"]),
                repr(r["prediction_error"]), repr(r["pred_se"]),
                repr(r["penalty_value"]), str(r["iters"]),
                str(int(r["converged"])),
            ]) + "\n")

    # per-(k, lambda entry) aggregates and per-k lower envelope
    label_order = [_lambda_label(e) for e in cfg["lambda_grid"]]
    aggregates = []
    envelope = []
    for k in cfg["k_grid"]:
        best = None
        for label in label_order:
            cell = [r for r in rows
                    if r["k"] == k and r["lambda_label"] == label]
            preds = [r["prediction_error"] for r in cell]
            mean = float(np.mean(preds))
            sd = float(np.std(preds, ddof=1)) if len(preds) > 1 else 0.0
            se = sd / np.sqrt(len(preds)) if len(preds) > 1 else 0.0
            agg = {
                "k": int(k),
                "lambda_label": label,
                "lambda": cell[0]["lambda"],
                "prediction_mean": mean,
                "prediction_sd": sd,
                "prediction_se": float(se),
                "empirical_mean": float(np.mean([r["empirical_error"]
                                                 for r in cell])),
                "train_mse_mean": float(np.mean([r["train_mse"]
                                                 for r in cell])),
                "penalty_mean": float(np.mean([r["penalty_value"]
                                               for r in cell])),
                "converged_frac": float(np.mean([r["converged"]
                                                 for r in cell])),
            }
            aggregates.append(agg)
            if best is None or mean < best["prediction_mean"]:
                best = agg
        envelope.append({
            "k": int(k),
            "lambda_label": best["lambda_label"],
            "lambda": best["lambda"],
            "prediction_mean": best["prediction_mean"],
            "prediction_se": best["prediction_se"],
        })

    echo = {key: cfg[key] for key in sorted(cfg)
            if key not in ("output_dir", "workers")}
    summary = {"config": echo,
               "aggregates": aggregates,
               "envelope": envelope}
    _write_json(out_dir / "sweep_summary.json", summary)

    series = []
    for label in label_order:
        pts = [(a["k"], a["prediction_mean"]) for a in aggregates
               if a["lambda_label"] == label]
        series.append({
            "label": f"lambda={label}",
            "x": [p[0] for p in pts],
            "y": [p[1] for p in pts],
        })
    series.append({
        "label": "best-lambda envelope",
        "x": [e["k"] for e in envelope],
        "y": [e["prediction_mean"] for e in envelope],
        "color": "#000000",
        "dashed": True,
        "stroke_width": 2.2,
    })
    svg = render_line_plot(
        series,
        title=(f"{cfg['model_id']}: mean prediction error, n={cfg['n']}, "
               f"d={cfg['d']}, reps={cfg['reps']}"),
        x_label="neurons k (log scale)",
        y_label="mean squared prediction error",
    )
    with open(out_dir / "sweep.svg", "w") as fh:
        fh.write(svg)
    return summary


# --------------------------------------------------------------------- theory

def cmd_theory(alpha: float, beta: float, n: int, c: float, k_max: int,
               out_dir: Path) -> dict:
    try:
        curve = bound_curve(alpha, beta, n, c, k_max=k_max)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    out_dir.mkdir(parents=True, exist_ok=True)
    curve.to_csv(out_dir / "theory_curve.csv")
    header = curve.header()
    _write_json(out_dir / "theory_curve.json", header)
    return header


# ----------------------------------------------------------------- complexity

def _make_class(name: str, M: float, k: int, d: int):
    if name == "pathnorm":
        return PathNormBall(M=M, k=k, activation=RELU)
    if name == "pathnorm-sigmoid":
        return PathNormBall(M=M, k=k, activation=SIGMOID)
    if name == "l1outer":
        return L1OuterBall(M=M, k=k, activation=SIGMOID)
    if name == "singleton-zero":
        return Singleton(net=ShallowNet(
            a=np.zeros(1), Theta=np.zeros((1, d)), b=np.zeros(1),
            activation=RELU))
    raise ConfigError(f"unknown complexity class {name!r}")


def cmd_complexity(class_name: str, M_list, n_list, k_list, draws: int,
                   seed: int, d: int, multiplier: str, out_dir: Path,
                   search: SearchConfig) -> dict:
    if not (M_list and n_list and k_list):
        raise ConfigError("M, n and k lists must be non-empty")
    if multiplier not in (RADEMACHER, GAUSSIAN):
        raise ConfigError(f"unknown multiplier {multiplier!r}")
    from .data import sample_ball

    out_dir.mkdir(parents=True, exist_ok=True)
    records = []
    for M in M_list:
        for n in n_list:
            X = sample_ball(int(n), d, derive_seed(seed, "cx-points", int(n)))
            for k in k_list:
                cls = _make_class(class_name, float(M), int(k), d)
                est = complexity_estimate(cls, X, draws, multiplier,
                                          search, seed)
                records.append(est.record())

    with open(out_dir / "complexity.jsonl", "w") as fh:
        for rec in records:
            fh.write(json.dumps(rec, sort_keys=True) + "\n")

    slopes = {}
    if len(n_list) >= 2:
        for M in M_list:
            for k in k_list:
                pts = [(r["n"], r["value"]) for r in records
                       if r["M"] == float(M) and r["k"] == int(k)]
                if len(pts) < 2:
                    continue
                if all(v > 0 for _, v in pts):
                    coef = np.polyfit(np.log([p[0] for p in pts]),
                                      np.log([p[1] for p in pts]), 1)
                    slopes[f"M={M},k={k}"] = float(coef[0])
                else:
                    slopes[f"M={M},k={k}"] = None
    summary = {
        "class": class_name,
        "multiplier": multiplier,
        "draws": draws,
        "d": d,
        "seed": seed,
        "log_value_vs_log_n_slope": slopes,
    }
    _write_json(out_dir / "complexity_summary.json", summary)
    return summary


# ------------------------------------------------------------------------ fit

def cmd_fit(model_id: str, n: int, d: int, sigma: float, k: int, lam,
            activation: str, seed: int, beta: float, out: Path | None) -> str:
    if model_id not in MODEL_GENERATORS:
        raise ConfigError(f"unknown model_id {model_id!r}")
    ds = generate(model_id, n, d, sigma, derive_seed(seed, "fit-data"))
    lam_value = _resolve_lambda(lam, n, k, beta)
    cfg = FitConfig(init_seed=derive_seed(seed, "fit-init", k, repr(lam_value)))
    if activation == RELU:
        res = fit_alternating_ridge(ds, k, lam_value, cfg)
    elif activation == SIGMOID:
        res = fit_sigmoid_l1(ds, k, lam_value, cfg)
    else:
        raise ConfigError(f"unknown activation {activation!r}")
    text = res.to_json()
    if out is not None:
        out.parent.mkdir(parents=True, exist_ok=True)
        with open(out, "w") as fh:
            fh.write(text + "\n")
    return text


# ------------------------------------------------------------------ cli glue

def _load_config(path) -> dict:
    if path is None:
        return {}
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    if not isinstance(cfg, dict):
        raise ConfigError("config manifest must be a JSON object")
    return cfg


def _merged(defaults: dict, config: dict, overrides: dict) -> dict:
    merged = dict(defaults)
    for key, value in config.items():
        if key not in defaults:
            raise ConfigError(f"unknown config field {key!r}")
        merged[key] = value
    for key, value in overrides.items():
        if value is not None:
            merged[key] = value
    return merged


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="shallowreg",
        description="Penalized two-layer network regression experiments")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("interpolate-demo",
                       help="exact interpolation on pure noise")
    p.add_argument("--config", type=Path)
    p.add_argument("--n", type=int)
    p.add_argument("--sigma", type=float)
    p.add_argument("--reps", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", type=Path)

    p = sub.add_parser("sweep", help="grid experiment over (k, lambda, rep)")
    p.add_argument("--config", type=Path)
    p.add_argument("--model", dest="model_id")
    p.add_argument("--n", type=int)
    p.add_argument("--d", type=int)
    p.add_argument("--sigma", type=float)
    p.add_argument("--k-grid", type=int, nargs="+")
    p.add_argument("--lambda-grid", nargs="+",
                   help="numbers and/or 'schedule:c=<val>' entries")
    p.add_argument("--reps", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--activation", choices=[RELU, SIGMOID])
    p.add_argument("--penalty", dest="penalty_kind",
                   choices=["l2sum", "l1outer"])
    p.add_argument("--n-test", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--out", type=Path)

    p = sub.add_parser("theory", help="bound-curve artifacts")
    p.add_argument("--config", type=Path)
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--n", type=int)
    p.add_argument("--c", type=float)
    p.add_argument("--k-max", type=int)
    p.add_argument("--out", type=Path)

    p = sub.add_parser("complexity", help="Monte-Carlo complexity estimates")
    p.add_argument("--config", type=Path)
    p.add_argument("--class", dest="class_name",
                   choices=["pathnorm", "pathnorm-sigmoid", "l1outer",
                            "singleton-zero"])
    p.add_argument("--M", type=float, nargs="+")
    p.add_argument("--n", type=int, nargs="+")
    p.add_argument("--k", type=int, nargs="+")
    p.add_argument("--d", type=int)
    p.add_argument("--draws", type=int)
    p.add_argument("--multiplier", choices=[RADEMACHER, GAUSSIAN])
    p.add_argument("--restarts", type=int)
    p.add_argument("--steps", type=int)
    p.add_argument("--step-size", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", type=Path)

    p = sub.add_parser("fit", help="single penalized fit, JSON to stdout")
    p.add_argument("--config", type=Path)
    p.add_argument("--model", dest="model_id")
    p.add_argument("--n", type=int)
    p.add_argument("--d", type=int)
    p.add_argument("--sigma", type=float)
    p.add_argument("--k", type=int)
    p.add_argument("--lambda", dest="lam",
                   help="number or 'schedule:c=<val>'")
    p.add_argument("--beta", type=float)
    p.add_argument("--activation", choices=[RELU, SIGMOID])
    p.add_argument("--seed", type=int)
    p.add_argument("--out", type=Path)

    return parser


def _dispatch(args: argparse.Namespace) -> int:
    config = _load_config(args.config)

    if args.command == "interpolate-demo":
        opts = _merged(
            {"n": 32, "sigma": 1.0, "reps": 200, "seed": 0, "out": "."},
            config,
            {"n": args.n, "sigma": args.sigma, "reps": args.reps,
             "seed": args.seed, "out": args.out})
        path = cmd_interpolate_demo(opts["n"], opts["sigma"], opts["reps"],
                                    opts["seed"], Path(opts["out"]))
        print(path)
        return 0

    if args.command == "sweep":
        overrides = {
            "model_id": args.model_id, "n": args.n, "d": args.d,
            "sigma": args.sigma, "k_grid": args.k_grid,
            "lambda_grid": args.lambda_grid, "reps": args.reps,
            "seed": args.seed, "activation": args.activation,
            "penalty_kind": args.penalty_kind, "n_test": args.n_test,
            "workers": args.workers,
            "output_dir": str(args.out) if args.out else None,
        }
        cfg = _merged(SWEEP_DEFAULTS, config, overrides)
        if cfg["lambda_grid"] is not None:
            cfg["lambda_grid"] = [
                e if isinstance(e, str) and e.startswith("schedule:")
                else (e if isinstance(e, (int, float)) else float(e))
                for e in cfg["lambda_grid"]]
        cmd_sweep(cfg)
        print(Path(cfg["output_dir"]) / "sweep.csv")
        return 0

    if args.command == "theory":
        opts = _merged(
            {"alpha": 1.0, "beta": 0.0, "n": 1024, "c": 1.0,
             "k_max": 100, "out": "."},
            config,
            {"alpha": args.alpha, "beta": args.beta, "n": args.n,
             "c": args.c, "k_max": args.k_max, "out": args.out})
        header = cmd_theory(opts["alpha"], opts["beta"], opts["n"],
                            opts["c"], opts["k_max"], Path(opts["out"]))
        print(json.dumps(header, sort_keys=True))
        return 0

    if args.command == "complexity":
        opts = _merged(
            {"class_name": "pathnorm", "M": [1.0], "n": [64], "k": [8],
             "d": 4, "draws": 50, "multiplier": RADEMACHER, "restarts": 32,
             "steps": 200, "step_size": 0.05, "seed": 0, "out": "."},
            config,
            {"class_name": args.class_name, "M": args.M, "n": args.n,
             "k": args.k, "d": args.d, "draws": args.draws,
             "multiplier": args.multiplier, "restarts": args.restarts,
             "steps": args.steps, "step_size": args.step_size,
             "seed": args.seed, "out": args.out})
        search = SearchConfig(restarts=opts["restarts"], steps=opts["steps"],
                              step_size=opts["step_size"])
        summary = cmd_complexity(opts["class_name"], opts["M"], opts["n"],
                                 opts["k"], opts["draws"], opts["seed"],
                                 opts["d"], opts["multiplier"],
                                 Path(opts["out"]), search)
        print(json.dumps(summary, sort_keys=True))
        return 0

    if args.command == "fit":
        opts = _merged(
            {"model_id": "fig2", "n": 128, "d": 8, "sigma": 0.2, "k": 16,
             "lam": 0.01, "beta": 0.0, "activation": RELU, "seed": 0,
             "out": None},
            config,
            {"model_id": args.model_id, "n": args.n, "d": args.d,
             "sigma": args.sigma, "k": args.k, "lam": args.lam,
             "beta": args.beta, "activation": args.activation,
             "seed": args.seed, "out": args.out})
        lam = opts["lam"]
        if isinstance(lam, str) and not lam.startswith("schedule:"):
            try:
                lam = float(lam)
            except ValueError:
                raise ConfigError(f"bad lambda {lam!r}") from None
        text = cmd_fit(opts["model_id"], opts["n"], opts["d"], opts["sigma"],
                       opts["k"], lam, opts["activation"], opts["seed"],
                       opts["beta"],
                       Path(opts["out"]) if opts["out"] else None)
        print(text)
        return 0

    raise ConfigError(f"unknown command {args.command!r}")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _dispatch(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except SolveError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
