"""Command-line surface: evolve, lle, coverage, randomize, scan, dips, validate.

Exit codes: 0 success, 1 usage error, 2 numerical failure. Every output file
starts with a commented RunConfig echo; `--from-manifest FILE` re-reads such a
header (or a scan manifest.json) instead of building the config from flags.
"""

import argparse
import json
import math
import sys
from dataclasses import replace
from pathlib import Path

from . import __version__, set_threads
from . import config as config_mod
from .config import RunConfig, header_block
from .dynamics import (DriveSpec, NormDrift, SpinorState, SystemParams,
                       evolve, named_state)
from .entropy import coverage
from .lyapunov import DegenerateCompanion, lle_trace
from .ensembles import EigFail, randomization_run
from .rotating_frame import j1_zeros, predict_dips
from .sampling import RngSeed, derive_stream, sample_haar
from .scan import PRESETS, preset_scan, run_scan, scan_spec_from_file


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        print("fix: see `spinchaos {cmd} --help` for the flag's expected form",
              file=sys.stderr)
        sys.exit(1)


def _add_common(p):
    p.add_argument("--q-hz", type=float, default=None, help="quadratic Zeeman q/h in Hz")
    p.add_argument("--eps-hz", type=float, default=None, help="spin interaction eps_s/h in Hz")
    p.add_argument("--rabi-hz", type=float, default=None, help="Rabi frequency Omega/2pi in Hz")
    p.add_argument("--drive-amp", type=float, default=None, help="drive amplitude hbar*D/eps_s")
    p.add_argument("--drive-freq-hz", type=float, default=None, help="modulation frequency w_m/2pi in Hz")
    p.add_argument("--drive-dir", default=None,
                   help="drive axis: x, y, z, or ux,uy,uz components")
    p.add_argument("--dt", type=float, default=None, help="integrator step in seconds")
    p.add_argument("--seed", type=int, default=None, help="master seed")
    p.add_argument("--threads", type=int, default=None,
                   help="kernel threads (SPINCHAOS_THREADS as fallback)")
    p.add_argument("--out", default=None, help="output file or directory")
    p.add_argument("--config", default=None, help="TOML config file (flags override)")
    p.add_argument("--from-manifest", default=None,
                   help="rebuild the config from an output header or manifest.json")


def _parse_direction(text):
    axes = {"x": (1.0, 0.0, 0.0), "y": (0.0, 1.0, 0.0), "z": (0.0, 0.0, 1.0)}
    if text in axes:
        return axes[text]
    parts = [float(v) for v in text.split(",")]
    if len(parts) != 3:
        raise ValueError("--drive-dir wants x|y|z or three comma-separated components")
    n = math.sqrt(sum(v * v for v in parts))
    return tuple(v / n for v in parts)


def _config_from(args) -> RunConfig:
    if getattr(args, "from_manifest", None):
        text = Path(args.from_manifest).read_text()
        if args.from_manifest.endswith(".json"):
            cfg = config_mod.parse(json.loads(text)["config"])
        else:
            cfg = config_mod.parse_header(text)
    elif getattr(args, "config", None):
        cfg = config_mod.parse(Path(args.config).read_text())
    else:
        cfg = RunConfig()
    params = cfg.params
    if args.q_hz is not None or args.eps_hz is not None or args.rabi_hz is not None:
        params = SystemParams(
            args.q_hz if args.q_hz is not None else params.q_over_h,
            args.eps_hz if args.eps_hz is not None else params.eps_s_over_h,
            args.rabi_hz if args.rabi_hz is not None else params.omega_rabi)
    drive = cfg.drive
    if (args.drive_amp is not None or args.drive_freq_hz is not None
            or args.drive_dir is not None):
        drive = DriveSpec(
            args.drive_amp if args.drive_amp is not None else drive.amplitude_hbarD_over_eps,
            args.drive_freq_hz if args.drive_freq_hz is not None else drive.freq_hz,
            _parse_direction(args.drive_dir) if args.drive_dir is not None else drive.direction)
    cfg = replace(cfg, params=params, drive=drive)
    if args.dt is not None:
        cfg = replace(cfg, dt=args.dt)
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed,
                      lle=replace(cfg.lle, seed=args.seed))
    if args.threads is not None:
        cfg = replace(cfg, threads=args.threads)
    set_threads(cfg.threads if cfg.threads > 0 else None)
    return cfg


def _initial_state(name: str, cfg: RunConfig) -> SpinorState:
    if name.startswith("haar"):
        idx = int(name.split(":")[1]) if ":" in name else 0
        rng = RngSeed(cfg.seed, derive_stream(1, 0, idx))
        return sample_haar(rng)
    if "," in name:
        from .dynamics import PhasePoint, from_phase
        r0, m, ts, tm = (float(v) for v in name.split(","))
        return from_phase(PhasePoint(r0, m, ts, tm))
    return named_state(name)


def _cmd_evolve(args):
    cfg = _config_from(args)
    state = _initial_state(args.init, cfg)
    sample = args.sample_every if args.sample_every else cfg.hist.sample_period
    traj = evolve(state, cfg.params, cfg.drive, 0.0, args.duration, sample, cfg.dt)
    coords = traj.phase_coords()
    energies = traj.energies(cfg.params)
    out = args.out or "trajectory.csv"
    with open(out, "w") as fh:
        fh.write(header_block(cfg, {"command": "evolve", "init": args.init}))
        fh.write("t_s,z1_re,z1_im,z0_re,z0_im,zm1_re,zm1_im,rho0,m,theta_plus,theta_minus,E_over_eps\n")
        for k in range(len(traj)):
            z = traj.states[k]
            fh.write(",".join(f"{v:.17g}" for v in (
                traj.times[k], z[0].real, z[0].imag, z[1].real, z[1].imag,
                z[2].real, z[2].imag, coords[k, 0], coords[k, 1], coords[k, 2],
                coords[k, 3], energies[k])) + "\n")
    print(f"wrote {len(traj)} samples to {out} (max norm error {traj.max_norm_error:.2e})")
    return 0


def _cmd_lle(args):
    cfg = _config_from(args)
    state = _initial_state(args.init, cfg)
    lle_cfg = cfg.lle
    if args.n_iter:
        lle_cfg = replace(lle_cfg, n_iter=args.n_iter)
    trace = lle_trace(state, cfg.params, cfg.drive, lle_cfg,
                      sample_period=cfg.hist.sample_period, dt=cfg.dt)
    res = trace.result
    print(f"lambda * tau_s = {res.lam:.4f} +- {res.stderr:.4f} "
          f"({lle_cfg.n_iter} iterations)")
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(header_block(cfg, {"command": "lle", "init": args.init}))
            fh.write("iter,lambda_n,lambda_cum\n")
            cum = res.cumulative
            for k, ln in enumerate(res.iterates):
                fh.write(f"{k + 1},{ln:.17g},{cum[k]:.17g}\n")
        print(f"wrote iterate trace to {args.out}")
    return 0


def _cmd_coverage(args):
    cfg = _config_from(args)
    state = _initial_state(args.init, cfg)
    spec = cfg.hist
    duration = args.duration or spec.n_samples * spec.sample_period
    traj = evolve(state, cfg.params, cfg.drive, 0.0, duration, spec.sample_period, cfg.dt)
    result = coverage(traj, spec, RngSeed(cfg.seed, derive_stream(4)))
    print(f"S = {result.S:.4f} nats, S_haar = {result.S_haar:.4f} nats, "
          f"deltaS = {result.deltaS:.4f}, V = {result.V:.4f}")
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(header_block(cfg, {"command": "coverage", "init": args.init}))
            fh.write("S,S_haar,deltaS,V\n")
            fh.write(f"{result.S:.17g},{result.S_haar:.17g},{result.deltaS:.17g},{result.V:.17g}\n")
    return 0


def _cmd_randomize(args):
    cfg = _config_from(args)
    if args.full:
        cfg = replace(cfg, ensemble=replace(cfg.ensemble, n_ens=cfg.ensemble.full_n_ens))
    if args.n_ens:
        cfg = replace(cfg, ensemble=replace(cfg.ensemble, n_ens=args.n_ens))
    center = _initial_state(args.center, cfg)
    rng = RngSeed(cfg.seed, derive_stream(3))
    res = randomization_run(center, cfg.params, cfg.drive, cfg.ensemble.n_ens,
                            cfg.ensemble.d_i, rng,
                            t_f=cfg.ensemble.t_f_tau * cfg.params.tau_s,
                            sample_every=cfg.ensemble.cadence_tau * cfg.params.tau_s,
                            dt=cfg.dt)
    tau = cfg.params.tau_s
    tau_r = res.tau_r / tau
    print(f"floor = {res.floor:.5f}, R = {res.R:.4f}, "
          f"tau_r = {'inf' if math.isinf(tau_r) else f'{tau_r:.2f}'} tau_s")
    out = Path(args.out or "randomization")
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "delta2.csv", "w") as fh:
        fh.write(header_block(cfg, {"command": "randomize", "center": args.center}))
        fh.write("t_over_tau_s,delta2\n")
        for t, d2 in zip(res.times, res.delta2):
            fh.write(f"{t / tau:.17g},{d2:.17g}\n")
    summary = {
        "center": args.center,
        "amp_hbarD_over_eps": cfg.drive.amplitude_hbarD_over_eps,
        "freq_hz": cfg.drive.freq_hz,
        "direction": list(cfg.drive.direction),
        "n_ens": cfg.ensemble.n_ens,
        "d_i": cfg.ensemble.d_i,
        "realized_d_i": res.realized_spread,
        "floor": res.floor,
        "R": res.R,
        "tau_r_over_tau_s": None if math.isinf(tau_r) else tau_r,
        "randomized": not math.isinf(tau_r),
        "seed": cfg.seed,
    }
    (out / "summary.json").write_text(json.dumps(summary, indent=2))
    print(f"wrote {out}/delta2.csv and {out}/summary.json")
    return 0


def _cmd_scan(args):
    cfg = _config_from(args)
    out = args.out or f"scan_{Path(args.preset).stem}"
    if Path(args.preset).is_file():
        spec = scan_spec_from_file(args.preset, cfg, out)
    else:
        spec = preset_scan(args.preset, cfg, out, full=args.full)
    manifest = run_scan(spec)
    print(f"scan {spec.name} complete: {manifest['computed_points']} new points, "
          f"{len(manifest['failures'])} failures, tables: {', '.join(manifest['tables'])}")
    return 0


def _cmd_dips(args):
    cfg = _config_from(args)
    omega = args.omega_m if args.omega_m is not None else cfg.drive.freq_hz
    roots = j1_zeros(args.count) if args.count else []
    amps = predict_dips(cfg.params, omega, args.count)
    print("n,j1_root,hbarD_over_eps")
    for n, (r, a) in enumerate(zip(roots, amps), start=1):
        print(f"{n},{r:.6f},{a:.4f}")
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(header_block(cfg, {"command": "dips", "omega_m_hz": omega}))
            fh.write("n,j1_root,hbarD_over_eps\n")
            for n, (r, a) in enumerate(zip(roots, amps), start=1):
                fh.write(f"{n},{r:.17g},{a:.17g}\n")
    return 0


def _cmd_validate(args):
    _config_from(args)
    from .validation import run_all
    ok = run_all(verbose=True)
    return 0 if ok else 2


def build_parser():
    parser = _Parser(prog="spinchaos",
                     description="driven spin-1 condensate chaos & randomization toolkit")
    parser.add_argument("--version", action="version", version=f"spinchaos {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("evolve", help="integrate a single trajectory to CSV")
    p.add_argument("--init", default="xC", help="xR|xC|polar|haar[:k]|'rho0,m,theta_s,theta_m'")
    p.add_argument("--duration", type=float, default=1.0, help="seconds")
    p.add_argument("--sample-every", type=float, default=None, help="seconds between samples")
    _add_common(p)
    p.set_defaults(func=_cmd_evolve)

    p = sub.add_parser("lle", help="largest Lyapunov exponent of one initial condition")
    p.add_argument("--init", default="xC")
    p.add_argument("--n-iter", type=int, default=None, help="override reset iterations")
    _add_common(p)
    p.set_defaults(func=_cmd_lle)

    p = sub.add_parser("coverage", help="phase-space coverage fraction of one trajectory")
    p.add_argument("--init", default="xC")
    p.add_argument("--duration", type=float, default=None)
    _add_common(p)
    p.set_defaults(func=_cmd_coverage)

    p = sub.add_parser("randomize", help="ensemble randomization run")
    p.add_argument("--center", default="xR")
    p.add_argument("--n-ens", type=int, default=None)
    p.add_argument("--full", action="store_true", help="use the full-scale 128^2 ensemble")
    _add_common(p)
    p.set_defaults(func=_cmd_randomize)

    p = sub.add_parser("scan", help="run a figure preset or a TOML scan specfile")
    p.add_argument("preset", help="preset name (" + "|".join(sorted(PRESETS)) + ") or specfile path")
    p.add_argument("--full", action="store_true", help="full-scale ensemble sizes")
    _add_common(p)
    p.set_defaults(func=_cmd_scan)

    p = sub.add_parser("dips", help="Bessel-zero suppression-dip predictions")
    p.add_argument("--omega-m", type=float, default=None, help="modulation frequency in Hz")
    p.add_argument("--count", type=int, default=4)
    _add_common(p)
    p.set_defaults(func=_cmd_dips)

    p = sub.add_parser("validate", help="run the invariant suite (exit 2 on failure)")
    _add_common(p)
    p.set_defaults(func=_cmd_validate)
    return parser


def cli_main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (NormDrift, DegenerateCompanion, EigFail) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    except (ValueError, KeyError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main():  # console entry point
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
