#!/usr/bin/env python3
"""Modulation-direction dependence: mean LLE vs amplitude for y- vs z-drive,
with predicted dip positions overlaid (log and linear views)."""

import argparse
from pathlib import Path

from plotkit import FigureRecipe, render


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--scan-dir", required=True, help="appC preset output directory")
    ap.add_argument("--dips", default=None, help="optional dip-prediction table")
    ap.add_argument("--out", default="figures")
    args = ap.parse_args()
    scan = Path(args.scan_dir)
    out = Path(args.out)

    inputs = {"data": scan / "lle.csv"}
    if args.dips:
        inputs["dips"] = args.dips
    for suffix, logx in (("log", True), ("linear", False)):
        print(render(FigureRecipe(
            "dipoverlay", dict(inputs), out / f"appC_mean_lle_{suffix}.png",
            {"x": "amp_hbarD_over_eps", "y": "lambda_tau", "group_by": "axis",
             "aggregate": "mean", "logx": logx,
             "xlabel": "hbar D / eps_s", "ylabel": "mean lambda * tau_s",
             "title": "Direction dependence of the LLE"})))


if __name__ == "__main__":
    main()
