#!/usr/bin/env python3
"""Intermittency diagnostics in the overdriven regime: magnetization time trace
and the iteration-wise / cumulative LLE estimates for the trace preset outputs."""

import argparse
from pathlib import Path

from plotkit import FigureRecipe, render


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--scan-dir", required=True, help="fig7trace preset output directory")
    ap.add_argument("--out", default="figures")
    ap.add_argument("--max-traces", type=int, default=3)
    args = ap.parse_args()
    scan = Path(args.scan_dir)
    out = Path(args.out)

    mags = sorted((scan / "traces").glob("*_magnetization.csv"))[:args.max_traces]
    for path in mags:
        tag = path.stem.replace("_magnetization", "")
        print(render(FigureRecipe(
            "timeseries", {"data": path}, out / f"fig7_{tag}_m.png",
            {"x": "t_over_tau_s", "y": "m", "xlabel": "t / tau_s",
             "ylabel": "magnetization m",
             "title": "Magnetization trace (sticky intervals)"})))
        iters = path.with_name(path.name.replace("_magnetization", "_iterates"))
        print(render(FigureRecipe(
            "timeseries", {"iteration-wise": iters, "cumulative": iters},
            out / f"fig7_{tag}_lle.png",
            {"x": "iter",
             "y_by_label": {"iteration-wise": "lambda_n", "cumulative": "lambda_cum"},
             "xlabel": "iteration", "ylabel": "lambda * tau_s",
             "title": "Iteration-wise and cumulative LLE estimate"})))


if __name__ == "__main__":
    main()
