#!/usr/bin/env python3
"""Global mixing map: LLE heatmap on the (drive amplitude, initial energy) plane
plus the amplitude-resolved LLE distribution."""

import argparse
from pathlib import Path

from plotkit import FigureRecipe, render


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--scan-dir", required=True, help="fig4 preset output directory")
    ap.add_argument("--out", default="figures")
    args = ap.parse_args()
    scan = Path(args.scan_dir)
    out = Path(args.out)

    print(render(FigureRecipe(
        "heatmap", {"data": scan / "lle.csv"}, out / "fig4_lle_heatmap.png",
        {"x": "amp_hbarD_over_eps", "y": "E0_over_eps", "value": "lambda_tau",
         "logx": True, "xlabel": "hbar D_z / eps_s", "ylabel": "E / eps_s",
         "value_label": "lambda * tau_s", "title": "LLE on the E-D plane"})))
    print(render(FigureRecipe(
        "scatter", {"data": scan / "lle.csv"}, out / "fig4_lle_distribution.png",
        {"x": "amp_hbarD_over_eps", "y": "lambda_tau", "logx": True,
         "vlines": [0.6, 2.2], "xlabel": "hbar D_z / eps_s",
         "ylabel": "lambda * tau_s", "title": "LLE distribution vs amplitude"})))


if __name__ == "__main__":
    main()
