#!/usr/bin/env python3
"""Trial-averaging benchmark: average the first t noisy repetitions of a
fixed signal, fit the block solver at a fixed fraction of the critical
regularization level, and record the estimated per-block noise scales,
which should decay like t^(-1/2).

Writes trials_sigma.csv and trials_slopes.csv (+ config sidecar)."""
import argparse
import json

from concomitant.cli import run_trials_experiment


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", required=True, help="output directory")
    ap.add_argument("--config", help="JSON file overriding the defaults")
    ap.add_argument("--seeds", type=int, help="number of replicate seeds")
    ap.add_argument("--lambda-ratio", type=float, dest="lambda_ratio",
                    help="fraction of the critical level (default 0.03)")
    ap.add_argument("--t-max", type=int, help="largest trial count (t sweeps powers of 2)")
    args = ap.parse_args()
    cfg = {}
    if args.config:
        with open(args.config) as fh:
            cfg = json.load(fh)
    if args.seeds is not None:
        cfg["seeds"] = args.seeds
    if args.lambda_ratio is not None:
        cfg["lambda_ratio"] = args.lambda_ratio
    if args.t_max is not None:
        ts, t = [], 2
        while t <= args.t_max:
            ts.append(t)
            t *= 2
        cfg["t_values"] = ts
    return run_trials_experiment(cfg, args.out)


if __name__ == "__main__":
    raise SystemExit(main())
