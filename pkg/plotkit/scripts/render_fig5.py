#!/usr/bin/env python3
"""Ensemble randomization in the weak-modulation regime: trace-distance decay
curves with the finite-size floor, and randomness / randomization-time sweeps."""

import argparse
from pathlib import Path

from plotkit import FigureRecipe, read_csv, render


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--scan-dir", required=True, help="fig5 preset output directory")
    ap.add_argument("--out", default="figures")
    ap.add_argument("--series", type=int, default=4,
                    help="number of delta2 decay curves to overlay")
    args = ap.parse_args()
    scan = Path(args.scan_dir)
    out = Path(args.out)

    _, rows = read_csv(scan / "randomization.csv")
    floor = rows[0]["floor"]

    series = sorted((scan / "delta2").glob("point_*.csv"))
    if series:
        step = max(1, len(series) // args.series)
        chosen = {p.stem.replace("point_", ""): p for p in series[::step][:args.series]}
        print(render(FigureRecipe(
            "timeseries", chosen, out / "fig5_delta2_decay.png",
            {"x": "t_over_tau_s", "y": "delta2", "logy": True, "hlines": [floor],
             "xlabel": "t / tau_s", "ylabel": "trace distance",
             "title": "Approach to Haar statistics"})))

    print(render(FigureRecipe(
        "dipoverlay", {"data": scan / "randomization.csv"}, out / "fig5_R_vs_amp.png",
        {"x": "amp_hbarD_over_eps", "y": "R", "group_by": "center", "logx": True,
         "hlines": [1.0], "xlabel": "hbar D_z / eps_s", "ylabel": "randomness R",
         "title": "Ensemble randomness vs amplitude"})))
    print(render(FigureRecipe(
        "dipoverlay", {"data": scan / "randomization.csv"}, out / "fig5_tau_r_vs_amp.png",
        {"x": "amp_hbarD_over_eps", "y": "tau_r_tau", "group_by": "center",
         "logx": True, "xlabel": "hbar D_z / eps_s", "ylabel": "tau_r / tau_s",
         "title": "Randomization time vs amplitude"})))


if __name__ == "__main__":
    main()
