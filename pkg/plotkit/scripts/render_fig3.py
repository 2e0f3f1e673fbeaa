#!/usr/bin/env python3
"""Single-trajectory response to the drive: LLE and coverage of the two
reference states vs modulation amplitude (log axis)."""

import argparse
from pathlib import Path

from plotkit import FigureRecipe, render


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--scan-dir", required=True, help="fig3 preset output directory")
    ap.add_argument("--out", default="figures")
    args = ap.parse_args()
    scan = Path(args.scan_dir)
    out = Path(args.out)

    print(render(FigureRecipe(
        "dipoverlay", {"data": scan / "lle.csv"}, out / "fig3_lle_vs_amp.png",
        {"x": "amp_hbarD_over_eps", "y": "lambda_tau", "group_by": "ic",
         "logx": True, "xlabel": "hbar D_z / eps_s", "ylabel": "lambda * tau_s",
         "title": "LLE vs drive amplitude"})))
    print(render(FigureRecipe(
        "dipoverlay", {"data": scan / "coverage.csv"}, out / "fig3_coverage_vs_amp.png",
        {"x": "amp_hbarD_over_eps", "y": "V", "group_by": "ic", "logx": True,
         "hlines": [1.0], "xlabel": "hbar D_z / eps_s", "ylabel": "coverage fraction V",
         "title": "Coverage vs drive amplitude"})))


if __name__ == "__main__":
    main()
