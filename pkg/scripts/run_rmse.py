#!/usr/bin/env python3
"""Prediction-performance benchmark: per-block log normalized RMSE on train
and test splits for the block-homoscedastic solver vs the single-noise-level
solver, over a descending regularization grid.

Writes rmse.csv (+ config sidecar) ready for plotting."""
import argparse
import json

from concomitant.cli import run_rmse_experiment


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", required=True, help="output directory")
    ap.add_argument("--config", help="JSON file overriding the defaults")
    ap.add_argument("--seeds", type=int, help="number of replicate seeds")
    ap.add_argument("--full-scale", action="store_true",
                    help="n=300, p=1000, q=100 benchmark scale (slow)")
    args = ap.parse_args()
    cfg = {}
    if args.config:
        with open(args.config) as fh:
            cfg = json.load(fh)
    if args.full_scale:
        cfg.setdefault("n", 300)
        cfg.setdefault("p", 1000)
        cfg.setdefault("q", 100)
        cfg.setdefault("block_sizes", [100, 100, 100])
    if args.seeds is not None:
        cfg["seeds"] = args.seeds
    cfg.setdefault("floor_mode", "oracle")
    return run_rmse_experiment(cfg, args.out)


if __name__ == "__main__":
    raise SystemExit(main())
