#!/usr/bin/env python3
"""Modulation-frequency dependence: LLE distribution vs drive frequency at fixed
amplitude, highlighting the 60 Hz operating point."""

import argparse
from pathlib import Path

from plotkit import FigureRecipe, render


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--scan-dir", required=True, help="appB preset output directory")
    ap.add_argument("--out", default="figures")
    args = ap.parse_args()
    scan = Path(args.scan_dir)
    out = Path(args.out)

    print(render(FigureRecipe(
        "scatter", {"data": scan / "lle.csv"}, out / "appB_lle_vs_freq.png",
        {"x": "freq_hz", "y": "lambda_tau", "vlines": [60.0],
         "xlabel": "w_m / 2pi (Hz)", "ylabel": "lambda * tau_s",
         "title": "LLE distribution vs modulation frequency"})))


if __name__ == "__main__":
    main()
