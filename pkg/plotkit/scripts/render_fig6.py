#!/usr/bin/env python3
"""Overdriven-regime suppression: randomness and randomization time over the wide
amplitude range with the predicted Bessel-zero dip positions overlaid."""

import argparse
from pathlib import Path

from plotkit import FigureRecipe, read_csv, render


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--scan-dir", required=True, help="fig6 preset output directory")
    ap.add_argument("--dips", required=True,
                    help="dip-prediction table from `spinchaos dips --out ...`")
    ap.add_argument("--out", default="figures")
    args = ap.parse_args()
    scan = Path(args.scan_dir)
    out = Path(args.out)

    _, rows = read_csv(scan / "randomization.csv")
    floor = rows[0]["floor"]

    print(render(FigureRecipe(
        "dipoverlay",
        {"data": scan / "randomization.csv", "dips": args.dips},
        out / "fig6_R_dips.png",
        {"x": "amp_hbarD_over_eps", "y": "R", "group_by": "center",
         "xlabel": "hbar D_z / eps_s", "ylabel": "randomness R",
         "title": "Randomization suppression at Bessel zeros"})))
    print(render(FigureRecipe(
        "dipoverlay",
        {"data": scan / "randomization.csv", "dips": args.dips},
        out / "fig6_tau_r_dips.png",
        {"x": "amp_hbarD_over_eps", "y": "tau_r_tau", "group_by": "center",
         "xlabel": "hbar D_z / eps_s", "ylabel": "tau_r / tau_s",
         "title": "Randomization time across the overdriven regime"})))

    series = sorted((scan / "delta2").glob("point_*.csv"))
    if series:
        print(render(FigureRecipe(
            "timeseries", {p.stem.replace("point_", ""): p for p in series[:4]},
            out / "fig6_delta2_suppressed.png",
            {"x": "t_over_tau_s", "y": "delta2", "logy": True, "hlines": [floor],
             "xlabel": "t / tau_s", "ylabel": "trace distance",
             "title": "Trace-distance decay near a suppression dip"})))


if __name__ == "__main__":
    main()
