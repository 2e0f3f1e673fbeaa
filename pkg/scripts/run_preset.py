#!/usr/bin/env python3
"""Run one figure preset end to end and print where the tables landed.

    python3 scripts/run_preset.py fig2 --out runs/fig2
    python3 scripts/run_preset.py fig6 --out runs/fig6 --full --threads 2

Interrupted runs resume: completed grid points are skipped on rerun.
"""

import argparse
import sys

from spinchaos import set_threads
from spinchaos.config import RunConfig
from spinchaos.scan import preset_scan, run_scan, PRESETS


def main():
    ap = argparse.ArgumentParser(description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("preset", choices=sorted(PRESETS))
    ap.add_argument("--out", default=None)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--threads", type=int, default=0)
    ap.add_argument("--full", action="store_true", help="full-scale ensembles (128^2)")
    args = ap.parse_args()

    set_threads(args.threads or None)
    cfg = RunConfig(seed=args.seed)
    spec = preset_scan(args.preset, cfg, args.out or f"runs/{args.preset}", full=args.full)
    manifest = run_scan(spec)
    print(f"done: {manifest['computed_points']} new points, "
          f"{len(manifest['failures'])} failures -> {spec.out_dir}")
    return 0 if not manifest["failures"] else 1


if __name__ == "__main__":
    sys.exit(main())
