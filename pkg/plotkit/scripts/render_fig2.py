#!/usr/bin/env python3
"""Undriven mixed-phase-space figures: LLE and coverage fraction vs energy,
with the empirical chaos crossover marked at E/eps_s = 0.8."""

import argparse
from pathlib import Path

from plotkit import FigureRecipe, render


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--scan-dir", required=True, help="fig2 preset output directory")
    ap.add_argument("--out", default="figures", help="image output directory")
    args = ap.parse_args()
    scan = Path(args.scan_dir)
    out = Path(args.out)

    paths = []
    paths.append(render(FigureRecipe(
        "scatter", {"data": scan / "lle.csv"}, out / "fig2_lle_vs_E.png",
        {"x": "E0_over_eps", "y": "lambda_tau", "vlines": [0.8],
         "xlabel": "E / eps_s", "ylabel": "lambda * tau_s",
         "title": "LLE vs energy (undriven)"})))
    paths.append(render(FigureRecipe(
        "scatter", {"data": scan / "coverage.csv"}, out / "fig2_coverage_vs_E.png",
        {"x": "E_over_eps", "y": "V", "vlines": [0.8], "hlines": [1.0],
         "xlabel": "E / eps_s", "ylabel": "coverage fraction V",
         "title": "Phase-space coverage vs energy (undriven)"})))
    for p in paths:
        print(p)


if __name__ == "__main__":
    main()
