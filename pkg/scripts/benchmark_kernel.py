#!/usr/bin/env python3
"""Measure the propagation kernel's throughput (member-steps per second).

Useful for sizing sweeps: the scan engine's cost estimates assume ~15M
member-steps/s; rerun this after hardware or toolchain changes.
"""

import time

from spinchaos import set_threads
from spinchaos.config import RunConfig
from spinchaos.dynamics import DriveSpec, advance_soa, pack_states
from spinchaos.sampling import RngSeed, sample_haar_states


def main():
    cfg = RunConfig()
    drive = DriveSpec.axis("z", 2.2, 60.0)
    for threads in (1, 0):
        n_active = set_threads(threads or None)
        for n in (2, 256, 1024):
            Z = pack_states(sample_haar_states(RngSeed(0, 0), n))
            advance_soa(Z, 0, 100, cfg.dt, cfg.params, drive)  # warm the JIT
            steps = 40_000
            t0 = time.time()
            advance_soa(Z, 0, steps, cfg.dt, cfg.params, drive)
            rate = n * steps / (time.time() - t0)
            print(f"threads={n_active} batch={n}: {rate / 1e6:.1f}M member-steps/s")


if __name__ == "__main__":
    main()
