"""Command-line driver: dataset simulation, single fits, regularization
paths, and the three benchmark experiments, all writing plot-ready CSV/JSON.

Matrix files are headerless CSV (one observation per row, 17 significant
digits, round-trip exact for finite doubles).  Every output carries a JSON
sidecar (or embedded section) with the fully resolved configuration and seed.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .sbhcl import (
    default_lambda_grid,
    fit_mtl,
    fit_path,
    fit_sbhcl,
    fit_scl,
    lambda_max_mtl,
    lambda_max_sbhcl,
)
from .sgcl import fit_sgcl, lambda_max_sgcl
from .simulate import (
    SimulationSpec,
    gen_dataset,
    metric_normalized_rmse,
    roc_sweep,
    trials_experiment,
)
from .types import (
    BlockNoise,
    DesignMatrix,
    FitResult,
    FullNoise,
    IdentityNoise,
    ShapeMismatch,
    SigmaFloor,
    SolverConfig,
    TaskMatrix,
    default_sigma_floor,
)

SOLVERS = ("sgcl", "sbhcl", "scl", "mtl")
FLOAT_FMT = "%.17g"


# ---------------------------------------------------------------------------
# matrix and JSON I/O


def save_matrix(path: str, values: np.ndarray) -> None:
    values = np.atleast_2d(np.asarray(values, dtype=np.float64))
    np.savetxt(path, values, delimiter=",", fmt=FLOAT_FMT)


def load_matrix(path: str) -> np.ndarray:
    """Parse a headerless CSV of floats, reporting the offending cell on
    malformed input."""
    rows: list[list[float]] = []
    with open(path, "r", encoding="utf-8") as fh:
        for i, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            row = []
            for j, tok in enumerate(parts, start=1):
                try:
                    row.append(float(tok))
                except ValueError:
                    raise ValueError(f"{path}: row {i}, column {j}: cannot parse {tok.strip()!r} as a float") from None
            if rows and len(row) != len(rows[0]):
                raise ValueError(f"{path}: row {i} has {len(row)} fields, expected {len(rows[0])}")
            rows.append(row)
    if not rows:
        raise ValueError(f"{path}: file contains no data")
    return np.array(rows, dtype=np.float64)


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def save_json(path: str, payload: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(_jsonable(payload), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_json(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def noise_to_json(noise) -> dict:
    if isinstance(noise, BlockNoise):
        return {"kind": "block", "sigmas": noise.sigmas, "block_sizes": list(noise.block_sizes)}
    if isinstance(noise, IdentityNoise):
        return {"kind": "identity"}
    if isinstance(noise, FullNoise):
        return {"kind": "full", "eigvals": noise.eigvals, "eigvecs": noise.eigvecs}
    return {"kind": "rank-one", "gamma": noise.gamma, "z": noise.z, "sigma_min": noise.sigma_min}


def coefficients_to_json(coeffs) -> dict:
    rows = coeffs.active_rows
    return {
        "shape": list(coeffs.values.shape),
        "rows": rows,
        "values": coeffs.values[rows],
    }


def coefficients_from_json(d: dict) -> np.ndarray:
    B = np.zeros(tuple(d["shape"]))
    for j, vals in zip(d["rows"], d["values"]):
        B[int(j)] = vals
    return B


def block_sigma_summary(noise, block_sizes) -> np.ndarray:
    """Per-block mean of the noise square root's diagonal (equals sigma_k
    exactly for block noise; a block-level scale summary otherwise)."""
    n = int(sum(block_sizes))
    diag = noise.diagonal_for(n) if isinstance(noise, IdentityNoise) else noise.diagonal()
    out = np.empty(len(block_sizes))
    off = 0
    for k, nk in enumerate(block_sizes):
        out[k] = float(np.mean(diag[off : off + nk]))
        off += nk
    return out


def write_csv(path: str, header: list[str], rows: list[list]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_format_cell(v) for v in row) + "\n")


def _format_cell(v) -> str:
    if isinstance(v, (float, np.floating)):
        return FLOAT_FMT % v
    return str(v)


# ---------------------------------------------------------------------------
# solver dispatch


def solver_floor(kind: str, Y: TaskMatrix, blocks, alpha: int) -> SigmaFloor | None:
    if kind == "mtl":
        return None
    if kind == "sbhcl":
        return default_sigma_floor(Y, tuple(blocks), alpha=alpha)
    return default_sigma_floor(Y, None, alpha=alpha)


def solver_lambda_max(kind: str, X: DesignMatrix, Y: TaskMatrix, floor: SigmaFloor | None) -> float:
    if kind == "sgcl":
        return lambda_max_sgcl(X, Y, floor)
    if kind == "sbhcl":
        return lambda_max_sbhcl(X, Y, floor)
    if kind == "scl":
        return lambda_max_sbhcl(DesignMatrix(X.values, (X.n,)), Y, floor)
    return lambda_max_mtl(X, Y)


def run_solver(kind: str, X: DesignMatrix, Y: TaskMatrix, config: SolverConfig) -> FitResult:
    fit = {"sgcl": fit_sgcl, "sbhcl": fit_sbhcl, "scl": fit_scl, "mtl": fit_mtl}[kind]
    return fit(X, Y, config)


# ---------------------------------------------------------------------------
# configuration plumbing


def _load_config_arg(args) -> dict:
    cfg = getattr(args, "config", None)
    return load_json(cfg) if cfg else {}


def _resolve(args, cfg: dict, name: str, default=None):
    v = getattr(args, name, None)
    if v is None:
        v = cfg.get(name, default)
    return v

def _parse_ints(text) -> tuple[int, ...]:
    if isinstance(text, (list, tuple)):
        return tuple(int(v) for v in text)
    return tuple(int(tok) for tok in str(text).split(","))


def _parse_floats(text) -> tuple[float, ...]:
    if isinstance(text, (list, tuple)):
        return tuple(float(v) for v in text)
    return tuple(float(tok) for tok in str(text).split(","))


# ---------------------------------------------------------------------------
# subcommands


def cmd_simulate(args) -> int:
    cfg = _load_config_arg(args)
    n = int(_resolve(args, cfg, "n", 300))
    p = int(_resolve(args, cfg, "p", 1000))
    q = int(_resolve(args, cfg, "q", 100))
    blocks = _parse_ints(_resolve(args, cfg, "blocks", None) or [n])
    mult = _parse_floats(_resolve(args, cfg, "noise_mult", None) or [1.0] * len(blocks))
    spec = SimulationSpec(
        n=n,
        p=p,
        q=q,
        block_sizes=blocks,
        noise_multipliers=mult,
        rho=float(_resolve(args, cfg, "rho", 0.7)),
        support_size=int(_resolve(args, cfg, "support", 20)),
        snr=float(_resolve(args, cfg, "snr", 1.0)),
        snr_definition=str(_resolve(args, cfg, "snr_def", "signal-over-noise")),
        seed=int(_resolve(args, cfg, "seed", 0)),
    )
    data = gen_dataset(spec)
    os.makedirs(args.out, exist_ok=True)
    save_matrix(os.path.join(args.out, "X.csv"), data.X.values)
    save_matrix(os.path.join(args.out, "Y.csv"), data.Y.values)
    save_matrix(os.path.join(args.out, "B_star.csv"), data.B_star.values)
    save_json(
        os.path.join(args.out, "meta.json"),
        {
            "spec": spec.__dict__,
            "seed": spec.seed,
            "n": n,
            "p": p,
            "q": q,
            "block_sizes": list(blocks),
            "sigma_star": data.sigma_star,
            "true_support": data.true_support,
            "train_rows": data.train_rows,
            "test_rows": data.test_rows,
        },
    )
    return 0


def _load_dataset_args(args, cfg) -> tuple[DesignMatrix, TaskMatrix, dict | None]:
    x_path = _resolve(args, cfg, "x")
    y_path = _resolve(args, cfg, "y")
    if x_path is None or y_path is None:
        raise ValueError("--x and --y matrix files are required")
    Xv = load_matrix(x_path)
    Yv = load_matrix(y_path)
    meta = None
    meta_path = _resolve(args, cfg, "meta")
    if meta_path:
        meta = load_json(meta_path)
        if list(Xv.shape) != [meta["n"], meta["p"]]:
            raise ShapeMismatch(f"X shape {Xv.shape} does not match meta.json ({meta['n']}, {meta['p']})")
        if list(Yv.shape) != [meta["n"], meta["q"]]:
            raise ShapeMismatch(f"Y shape {Yv.shape} does not match meta.json ({meta['n']}, {meta['q']})")
    blocks_arg = _resolve(args, cfg, "blocks")
    if blocks_arg is not None:
        blocks = _parse_ints(blocks_arg)
    elif meta is not None:
        blocks = tuple(meta["block_sizes"])
    else:
        blocks = (Xv.shape[0],)
    return DesignMatrix(Xv, blocks), TaskMatrix(Yv), meta


def _solver_config_from_args(args, cfg, lam: float, floor: SigmaFloor | None) -> SolverConfig:
    return SolverConfig(
        lam=lam,
        sigma_floor=floor,
        f=int(_resolve(args, cfg, "f", 10)),
        max_epochs=int(_resolve(args, cfg, "max_epochs", 10_000)),
        tol=float(_resolve(args, cfg, "tol", 1e-6)),
    )


def cmd_fit(args) -> int:
    cfg = _load_config_arg(args)
    X, Y, _ = _load_dataset_args(args, cfg)
    solver = str(_resolve(args, cfg, "solver", "sbhcl"))
    if solver not in SOLVERS:
        raise ValueError(f"unknown solver {solver!r}; choose from {SOLVERS}")
    alpha = int(_resolve(args, cfg, "sigma_floor_alpha", 3))
    floor = solver_floor(solver, Y, X.block_sizes, alpha)
    lam_abs = _resolve(args, cfg, "lam")
    ratio = _resolve(args, cfg, "lambda_ratio")
    if (lam_abs is None) == (ratio is None):
        raise ValueError("exactly one of --lambda and --lambda-ratio is required")
    lam_max = solver_lambda_max(solver, X, Y, floor)
    lam = float(lam_abs) if lam_abs is not None else float(ratio) * lam_max
    config = _solver_config_from_args(args, cfg, lam, floor)
    result = run_solver(solver, X, Y, config)
    payload = {
        "solver": solver,
        "lambda": result.lam,
        "lambda_ratio": result.lam / lam_max,
        "lambda_max": result.lam_max,
        "primal": result.primal,
        "dual": result.dual,
        "gap": result.gap,
        "epochs": result.epochs_run,
        "converged": result.converged,
        "gap_history": [[e, g] for e, g in result.gap_history],
        "coefficients": coefficients_to_json(result.coefficients),
        "noise": noise_to_json(result.noise),
        "config": {
            "tol": config.tol,
            "f": config.f,
            "max_epochs": config.max_epochs,
            "sigma_floor_alpha": alpha,
            "sigma_floor": list(floor.values) if floor is not None else None,
            "block_sizes": list(X.block_sizes),
        },
    }
    save_json(args.out, payload)
    if not result.converged:
        print(f"fit did not reach tolerance (gap {result.gap:.3e}); result written to {args.out}", file=sys.stderr)
        return 1
    return 0


def cmd_path(args) -> int:
    cfg = _load_config_arg(args)
    X, Y, _ = _load_dataset_args(args, cfg)
    solver = str(_resolve(args, cfg, "solver", "sbhcl"))
    if solver not in SOLVERS:
        raise ValueError(f"unknown solver {solver!r}; choose from {SOLVERS}")
    alpha = int(_resolve(args, cfg, "sigma_floor_alpha", 3))
    num = int(_resolve(args, cfg, "num", 15))
    ratio_min = float(_resolve(args, cfg, "ratio_min", 0.1))
    ratio_max = float(_resolve(args, cfg, "ratio_max", 1.0))
    floor = solver_floor(solver, Y, X.block_sizes, alpha)
    lam_max = solver_lambda_max(solver, X, Y, floor)
    if num == 1:
        ratios = np.array([ratio_max])
    else:
        ratios = np.geomspace(ratio_max, ratio_min, num)
    grid = lam_max * ratios
    config = _solver_config_from_args(args, cfg, lam=float(grid[0]), floor=floor)
    results = fit_path(X, Y, solver, grid, config)
    header = ["lambda", "lambda_ratio", "support_size", "primal", "gap", "converged"]
    header += [f"sigma_{k + 1}" for k in range(X.n_blocks)]
    rows = []
    ok = True
    for lam, res in zip(grid, results):
        if res is None:
            ok = False
            rows.append([float(lam), float(lam / lam_max), -1, float("nan"), float("nan"), 0]
                        + [float("nan")] * X.n_blocks)
            continue
        ok = ok and res.converged
        sig = block_sigma_summary(res.noise, X.block_sizes)
        rows.append(
            [res.lam, res.lam / lam_max, len(res.coefficients.active_rows), res.primal, res.gap, int(res.converged)]
            + list(sig)
        )
    write_csv(args.out, header, rows)
    save_json(
        args.out + ".json",
        {
            "solver": solver,
            "lambda_max": lam_max,
            "num": num,
            "ratio_min": ratio_min,
            "ratio_max": ratio_max,
            "tol": config.tol,
            "f": config.f,
            "max_epochs": config.max_epochs,
            "sigma_floor_alpha": alpha,
            "block_sizes": list(X.block_sizes),
        },
    )
    return 0 if ok else 1


# ---------------------------------------------------------------------------
# experiments


def _experiment_spec(cfg: dict, seed: int, defaults: dict) -> SimulationSpec:
    get = lambda k: cfg.get(k, defaults[k])
    return SimulationSpec(
        n=int(get("n")),
        p=int(get("p")),
        q=int(get("q")),
        block_sizes=_parse_ints(get("block_sizes")),
        noise_multipliers=_parse_floats(get("noise_multipliers")),
        rho=float(get("rho")),
        support_size=int(get("support_size")),
        snr=float(get("snr")),
        snr_definition=str(get("snr_definition")),
        seed=seed,
    )


_EXPERIMENT_DEFAULTS = {
    "n": 120,
    "p": 300,
    "q": 30,
    "block_sizes": (40, 40, 40),
    "noise_multipliers": (1.0, 2.0, 5.0),
    "rho": 0.7,
    "support_size": 20,
    "snr": 1.0,
    "snr_definition": "signal-over-noise",
    "seeds": 10,
    "grid_num": 15,
    "grid_ratio_min": 0.1,
    "tol": 1e-6,
    "f": 10,
    "max_epochs": 10_000,
    "sigma_floor_alpha": 3,
}


def _seed_list(cfg: dict, defaults=_EXPERIMENT_DEFAULTS) -> list[int]:
    seeds = cfg.get("seeds", defaults["seeds"])
    if isinstance(seeds, int):
        return list(range(seeds))
    return [int(s) for s in seeds]


def _experiment_config(cfg: dict, lam: float, floor, defaults=_EXPERIMENT_DEFAULTS) -> SolverConfig:
    return SolverConfig(
        lam=lam,
        sigma_floor=floor,
        f=int(cfg.get("f", defaults["f"])),
        max_epochs=int(cfg.get("max_epochs", defaults["max_epochs"])),
        tol=float(cfg.get("tol", defaults["tol"])),
    )


def experiment_floor(solver: str, Y: TaskMatrix, blocks, cfg: dict, sigma_star=None) -> SigmaFloor | None:
    """Noise floor for an experiment fit.

    floor_mode "alpha" (default) uses the data-driven rule; "oracle" sets
    the floors to floor_oracle_scale times the true per-block noise levels
    (the prior-information mode, which also keeps the alternation well
    conditioned when a small regularization level drives residuals to zero).
    """
    if solver == "mtl":
        return None
    mode = cfg.get("floor_mode", "alpha")
    if mode == "alpha":
        alpha = int(cfg.get("sigma_floor_alpha", _EXPERIMENT_DEFAULTS["sigma_floor_alpha"]))
        return solver_floor(solver, Y, blocks, alpha)
    if mode != "oracle":
        raise ValueError(f"unknown floor_mode {mode!r}")
    if sigma_star is None:
        raise ValueError("floor_mode 'oracle' needs the true noise levels")
    scale = float(cfg.get("floor_oracle_scale", 0.5))
    if solver == "sbhcl":
        return SigmaFloor(tuple(scale * s for s in np.asarray(sigma_star)))
    return SigmaFloor((scale * float(np.min(sigma_star)),))


def run_rmse_experiment(cfg: dict, out_dir: str) -> int:
    defaults = dict(_EXPERIMENT_DEFAULTS)
    solvers = cfg.get("solvers", ["sbhcl", "scl"])
    rows, failures = [], []
    all_converged = True
    resolved = {**defaults, **cfg, "solvers": solvers, "experiment": "rmse"}
    for seed in _seed_list(cfg):
        spec = _experiment_spec(cfg, seed, defaults)
        data = gen_dataset(spec)
        Xtr, Ytr = data.split("train")
        for solver in solvers:
            try:
                floor = experiment_floor(solver, Ytr, Xtr.block_sizes, cfg, data.sigma_star)
                lam_max = solver_lambda_max(solver, Xtr, Ytr, floor)
                grid = lam_max * np.geomspace(1.0, float(cfg.get("grid_ratio_min", defaults["grid_ratio_min"])),
                                              int(cfg.get("grid_num", defaults["grid_num"])))
                config = _experiment_config(cfg, float(grid[0]), floor)
                results = fit_path(Xtr, Ytr, solver, grid, config)
            except Exception as exc:  # pragma: no cover - defensive
                failures.append([seed, solver, repr(exc)])
                continue
            for lam, res in zip(grid, results):
                if res is None:
                    failures.append([seed, solver, f"fit failed at lambda={lam}"])
                    continue
                all_converged = all_converged and res.converged
                for split in ("train", "test"):
                    rep = metric_normalized_rmse(res, data, split)
                    for k, v in enumerate(rep.log_rmse):
                        rows.append([seed, solver, float(lam), float(lam / lam_max), split, k, float(v),
                                     int(res.converged)])
    write_csv(
        os.path.join(out_dir, "rmse.csv"),
        ["seed", "solver", "lambda", "lambda_ratio", "split", "block", "log_nrmse", "converged"],
        rows,
    )
    save_json(os.path.join(out_dir, "config.json"), resolved)
    if failures:
        write_csv(os.path.join(out_dir, "failures.csv"), ["seed", "solver", "error"], failures)
    return 0 if not failures and all_converged else 1


def run_roc_experiment(cfg: dict, out_dir: str) -> int:
    defaults = {**_EXPERIMENT_DEFAULTS, "support_size": 30, "grid_ratio_min": 0.05}
    solvers = cfg.get("solvers", ["sbhcl", "scl", "mtl"])
    point_rows, auc_rows, failures = [], [], []
    all_converged = True
    aucs: dict[str, list[float]] = {s: [] for s in solvers}
    resolved = {**defaults, **cfg, "solvers": solvers, "experiment": "roc"}
    for seed in _seed_list(cfg):
        spec = _experiment_spec(cfg, seed, defaults)
        data = gen_dataset(spec)
        for solver in solvers:
            try:
                floor = experiment_floor(solver, data.Y, data.X.block_sizes, cfg, data.sigma_star)
                lam_max = solver_lambda_max(solver, data.X, data.Y, floor)
                grid = lam_max * np.geomspace(1.0, float(cfg.get("grid_ratio_min", defaults["grid_ratio_min"])),
                                              int(cfg.get("grid_num", defaults["grid_num"])))
                config = _experiment_config(cfg, float(grid[0]), floor)
                points, auc = roc_sweep(data.X, data.Y, data.true_support, solver, grid, config)
            except Exception as exc:  # pragma: no cover - defensive
                failures.append([seed, solver, repr(exc)])
                continue
            for pt in points:
                point_rows.append([seed, solver, pt.lambda_ratio, pt.fpr, pt.tpr, int(pt.converged)])
                all_converged = all_converged and pt.converged
            auc_rows.append([seed, solver, auc])
            aucs[solver].append(auc)
    for solver in solvers:
        if aucs[solver]:
            auc_rows.append(["mean", solver, float(np.mean(aucs[solver]))])
    write_csv(os.path.join(out_dir, "roc_points.csv"),
              ["seed", "solver", "lambda_ratio", "fpr", "tpr", "converged"], point_rows)
    write_csv(os.path.join(out_dir, "roc_auc.csv"), ["seed", "solver", "auc"], auc_rows)
    save_json(os.path.join(out_dir, "config.json"), resolved)
    if failures:
        write_csv(os.path.join(out_dir, "failures.csv"), ["seed", "solver", "error"], failures)
    return 0 if not failures and all_converged else 1


def run_trials_experiment(cfg: dict, out_dir: str) -> int:
    defaults = {
        **_EXPERIMENT_DEFAULTS,
        "p": 60,
        "q": 34,
        "support_size": 15,
        "snr": 3.0,
        "t_values": (2, 4, 8, 16, 32),
        "lambda_ratio": 0.03,
    }
    t_values = _parse_ints(cfg.get("t_values", defaults["t_values"]))
    lambda_ratio = float(cfg.get("lambda_ratio", defaults["lambda_ratio"]))
    resolved = {**defaults, **cfg, "t_values": list(t_values), "experiment": "trials"}
    sigma_rows, slope_rows, failures = [], [], []
    all_converged = True
    for seed in _seed_list(cfg):
        spec = _experiment_spec(cfg, seed, defaults)
        try:
            report = trials_experiment(
                spec,
                t_values,
                lambda_ratio=lambda_ratio,
                tol=float(cfg.get("tol", defaults["tol"])),
                f=int(cfg.get("f", defaults["f"])),
                max_epochs=int(cfg.get("max_epochs", defaults["max_epochs"])),
                floor_alpha=int(cfg.get("sigma_floor_alpha", defaults["sigma_floor_alpha"])),
            )
        except Exception as exc:  # pragma: no cover - defensive
            failures.append([seed, "sbhcl", repr(exc)])
            continue
        all_converged = all_converged and report.converged
        for i, t in enumerate(report.t_values):
            for k in range(report.sigma_hat.shape[1]):
                sigma_rows.append([seed, t, k, float(report.sigma_hat[i, k]), int(report.converged)])
        for k, s in enumerate(report.slopes):
            slope_rows.append([seed, k, float(s)])
    write_csv(os.path.join(out_dir, "trials_sigma.csv"),
              ["seed", "t", "block", "sigma_hat", "converged"], sigma_rows)
    write_csv(os.path.join(out_dir, "trials_slopes.csv"), ["seed", "block", "slope"], slope_rows)
    save_json(os.path.join(out_dir, "config.json"), resolved)
    if failures:
        write_csv(os.path.join(out_dir, "failures.csv"), ["seed", "solver", "error"], failures)
    return 0 if not failures and all_converged else 1


def cmd_experiment(args) -> int:
    cfg = _load_config_arg(args)
    os.makedirs(args.out, exist_ok=True)
    runner = {"rmse": run_rmse_experiment, "roc": run_roc_experiment, "trials": run_trials_experiment}
    return runner[args.name](cfg, args.out)


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="concomitant",
        description="Sparse multi-task regression with joint noise square-root estimation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="generate a synthetic benchmark dataset")
    sim.add_argument("--n", type=int)
    sim.add_argument("--p", type=int)
    sim.add_argument("--q", type=int)
    sim.add_argument("--blocks", type=str, help="comma-separated block sizes, e.g. 100,100,100")
    sim.add_argument("--noise-mult", dest="noise_mult", type=str, help="per-block noise multipliers, e.g. 1,2,5")
    sim.add_argument("--rho", type=float)
    sim.add_argument("--support", type=int)
    sim.add_argument("--snr", type=float)
    sim.add_argument("--snr-def", dest="snr_def", choices=["signal-over-noise", "paper-literal"])
    sim.add_argument("--seed", type=int)
    sim.add_argument("--config", type=str)
    sim.add_argument("--out", type=str, required=True, help="output directory")
    sim.set_defaults(func=cmd_simulate)

    def add_fit_args(p):
        p.add_argument("--x", type=str, help="design matrix CSV")
        p.add_argument("--y", type=str, help="observation matrix CSV")
        p.add_argument("--blocks", type=str)
        p.add_argument("--meta", type=str, help="meta.json to validate shapes / supply blocks")
        p.add_argument("--solver", choices=SOLVERS)
        p.add_argument("--tol", type=float)
        p.add_argument("--f", type=int)
        p.add_argument("--max-epochs", dest="max_epochs", type=int)
        p.add_argument("--sigma-floor-alpha", dest="sigma_floor_alpha", type=int)
        p.add_argument("--config", type=str)

    fit = sub.add_parser("fit", help="fit one solver at one regularization level")
    add_fit_args(fit)
    fit.add_argument("--lambda", dest="lam", type=float)
    fit.add_argument("--lambda-ratio", dest="lambda_ratio", type=float)
    fit.add_argument("--out", type=str, required=True, help="output fit.json")
    fit.set_defaults(func=cmd_fit)

    path = sub.add_parser("path", help="fit a warm-started regularization path")
    add_fit_args(path)
    path.add_argument("--num", type=int)
    path.add_argument("--ratio-min", dest="ratio_min", type=float)
    path.add_argument("--ratio-max", dest="ratio_max", type=float)
    path.add_argument("--out", type=str, required=True, help="output path.csv")
    path.set_defaults(func=cmd_path)

    exp = sub.add_parser("experiment", help="run a benchmark experiment")
    exp.add_argument("name", choices=["rmse", "roc", "trials"])
    exp.add_argument("--config", type=str)
    exp.add_argument("--out", type=str, required=True, help="output directory")
    exp.set_defaults(func=cmd_experiment)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
