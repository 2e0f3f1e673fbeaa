"""Declarative parameter sweeps with deterministic seeding, resumability, and presets.

A scan is a list of drive points crossed with an initial-condition source and
a set of diagnostics. Every work item derives its random stream from
(seed, point index, IC index), so any subset of the grid reproduces in
isolation and reruns are bit-identical. Per-point rows land in
<out>/rows/point_XXXX.json as they finish; the final tables are their ordered
concatenation, so an interrupted scan resumes by recomputing only missing
points.
"""

import hashlib
import json
import math
import time
from dataclasses import dataclass, asdict
from pathlib import Path

import numpy as np

from . import __version__
from .config import RunConfig, header_block, serialize
from .dynamics import DriveSpec, SpinorState, energies_of, named_state
from .ensembles import randomization_run
from .entropy import coverage_from_codes, haar_entropy, phase_codes
from .lyapunov import LleConfig, benettin_batch, lle_trace
from .sampling import RngSeed, derive_stream

_TAG_ICS = 1
_TAG_LLE = 2
_TAG_ENSEMBLE = 3
_TAG_HAAR_REF = 4

_AXES = {"x": (1.0, 0.0, 0.0), "y": (0.0, 1.0, 0.0), "z": (0.0, 0.0, 1.0)}


@dataclass(frozen=True)
class ScanPoint:
    amp: float
    freq_hz: float
    axis: str = "z"

    def drive(self):
        return DriveSpec(self.amp, self.freq_hz, _AXES[self.axis])


@dataclass
class ScanSpec:
    name: str
    points: list
    diagnostics: tuple
    config: RunConfig
    out_dir: str
    ic_kind: str = "haar"       # "haar" | "named"
    ic_count: int = 200         # haar source
    ic_names: tuple = ("xR", "xC")  # named source (also the ensemble centers)

    def initial_states(self):
        if self.ic_kind == "haar":
            from .sampling import sample_haar_states
            rng = RngSeed(self.config.seed, derive_stream(_TAG_ICS))
            states = sample_haar_states(rng, self.ic_count)
            labels = [str(i) for i in range(self.ic_count)]
        elif self.ic_kind == "named":
            states = np.array([named_state(n).amplitudes for n in self.ic_names])
            labels = list(self.ic_names)
        else:
            raise ValueError(f"unknown ic_kind {self.ic_kind!r}")
        return states, labels


def _fmt(x):
    if isinstance(x, float):
        return f"{x:.17g}"
    return str(x)


LLE_COLUMNS = ("point", "ic", "amp_hbarD_over_eps", "freq_hz", "axis",
               "E0_over_eps", "lambda_tau", "stderr_tau")
COVERAGE_COLUMNS = ("point", "ic", "amp_hbarD_over_eps", "freq_hz", "axis",
                    "E_over_eps", "S", "S_haar", "deltaS", "V", "degenerate_samples")
RANDOMIZATION_COLUMNS = ("point", "center", "amp_hbarD_over_eps", "freq_hz", "axis",
                         "n_ens", "d_i", "realized_d_i", "floor", "delta2_tf",
                         "R", "tau_r_tau")


def _point_rows(spec: ScanSpec, idx: int, point: ScanPoint, states, labels):
    """All diagnostic rows for one grid point; returns {diagnostic: [row, ...]}."""
    cfg = spec.config
    drive = point.drive()
    rows = {}
    base = [str(idx), None, _fmt(point.amp), _fmt(point.freq_hz), point.axis]

    want_lle = "lle" in spec.diagnostics
    want_cov = "coverage" in spec.diagnostics
    if want_lle or want_cov:
        seeds = [RngSeed(cfg.seed, derive_stream(_TAG_LLE, idx, j))
                 for j in range(len(states))]
        stride = int(round(cfg.hist.sample_period / cfg.dt)) if want_cov else 0
        coder = (lambda c: phase_codes(c, cfg.hist.bins_per_axis)) if want_cov else None
        out = benettin_batch(states, cfg.params, drive, cfg.lle, cfg.dt,
                             seeds=seeds, sample_stride=stride, collect_codes=coder)
        e0 = energies_of(states, cfg.params)
        tau = cfg.params.tau_s
        if want_lle:
            lam = out["iterates"].mean(axis=1) * tau
            se = out["iterates"].std(axis=1, ddof=1) / math.sqrt(cfg.lle.n_iter) * tau
            rows["lle"] = [
                base[:1] + [labels[j]] + base[2:] + [_fmt(float(e0[j])), _fmt(float(lam[j])),
                                                     _fmt(float(se[j]))]
                for j in range(len(states)) if not out["failed"][j]
            ]
        if want_cov:
            ref = haar_entropy(cfg.hist, RngSeed(cfg.seed, derive_stream(_TAG_HAAR_REF)))
            rows["coverage"] = []
            for j in range(len(states)):
                if out["failed"][j]:
                    continue
                cov = coverage_from_codes(out["codes"][j], cfg.hist,
                                          RngSeed(cfg.seed, derive_stream(_TAG_HAAR_REF)))
                rows["coverage"].append(
                    base[:1] + [labels[j]] + base[2:]
                    + [_fmt(float(e0[j])), _fmt(cov.S), _fmt(ref), _fmt(cov.deltaS),
                       _fmt(cov.V), str(int(out["degenerate_samples"][j]))])
        ic_failures = [f"ic {labels[j]}: {msg}" for j, msg in enumerate(out["failed"]) if msg]
        if ic_failures:
            rows["_ic_failures"] = ic_failures

    if "randomization" in spec.diagnostics:
        rows["randomization"] = []
        out_dir = Path(spec.out_dir)
        for c_idx, name in enumerate(spec.ic_names):
            center = named_state(name)
            rng = RngSeed(cfg.seed, derive_stream(_TAG_ENSEMBLE, idx, c_idx))
            res = randomization_run(center, cfg.params, drive, cfg.ensemble.n_ens,
                                    cfg.ensemble.d_i, rng,
                                    t_f=cfg.ensemble.t_f_tau * cfg.params.tau_s,
                                    sample_every=cfg.ensemble.cadence_tau * cfg.params.tau_s,
                                    dt=cfg.dt)
            tau = cfg.params.tau_s
            rows["randomization"].append(
                base[:1] + [name] + base[2:]
                + [str(cfg.ensemble.n_ens), _fmt(cfg.ensemble.d_i), _fmt(res.realized_spread),
                   _fmt(res.floor), _fmt(float(res.delta2[-1])), _fmt(res.R),
                   _fmt(res.tau_r / tau)])
            series_dir = out_dir / "delta2"
            series_dir.mkdir(parents=True, exist_ok=True)
            with open(series_dir / f"point_{idx:04d}_{name}.csv", "w") as fh:
                fh.write(header_block(cfg, {"scan": spec.name, "point": idx, "center": name}))
                fh.write("t_over_tau_s,delta2\n")
                for t, d2 in zip(res.times, res.delta2):
                    fh.write(f"{_fmt(t / tau)},{_fmt(float(d2))}\n")

    if "traces" in spec.diagnostics:
        rows["traces"] = []
        out_dir = Path(spec.out_dir) / "traces"
        out_dir.mkdir(parents=True, exist_ok=True)
        for j, label in enumerate(labels):
            cfgl = LleConfig(cfg.lle.d0, cfg.lle.reset_time, cfg.lle.n_iter,
                             cfg.seed, derive_stream(_TAG_LLE, idx, j))
            tr = lle_trace(SpinorState(states[j]), cfg.params, drive, cfgl,
                           sample_period=cfg.hist.sample_period, dt=cfg.dt)
            with open(out_dir / f"point_{idx:04d}_ic{label}_iterates.csv", "w") as fh:
                fh.write(header_block(cfg, {"scan": spec.name, "point": idx, "ic": label}))
                fh.write("iter,lambda_n,lambda_cum\n")
                cum = tr.cumulative
                for k, ln in enumerate(tr.iterates):
                    fh.write(f"{k + 1},{_fmt(float(ln))},{_fmt(float(cum[k]))}\n")
            with open(out_dir / f"point_{idx:04d}_ic{label}_magnetization.csv", "w") as fh:
                fh.write(header_block(cfg, {"scan": spec.name, "point": idx, "ic": label}))
                fh.write("t_over_tau_s,m\n")
                for t, m in zip(tr.times, tr.magnetization):
                    fh.write(f"{_fmt(t / cfg.params.tau_s)},{_fmt(float(m))}\n")
            rows["traces"].append(base[:1] + [label] + base[2:])
    return rows


def estimate_cost(spec: ScanSpec) -> str:
    """Rough work estimate printed before execution."""
    n_pts = len(spec.points)
    n_ics = spec.ic_count if spec.ic_kind == "haar" else len(spec.ic_names)
    parts = [f"{n_pts} points"]
    total_steps = 0.0
    if {"lle", "coverage", "traces"} & set(spec.diagnostics):
        traj_s = spec.config.lle.n_iter * spec.config.lle.reset_time
        total_steps += n_pts * n_ics * 2 * traj_s / spec.config.dt
        parts.append(f"{n_ics} ICs x {traj_s:.0f} s paired trajectories")
    if "randomization" in spec.diagnostics:
        t_f = spec.config.ensemble.t_f_tau * spec.config.params.tau_s
        total_steps += n_pts * len(spec.ic_names) * spec.config.ensemble.n_ens * t_f / spec.config.dt
        parts.append(f"{len(spec.ic_names)} ensembles x {spec.config.ensemble.n_ens} members")
    parts.append(f"~{total_steps / 1e9:.2f}G member-steps (~{total_steps / 15e6 / 60:.0f} min at 15M/s)")
    return ", ".join(parts)


def _spec_fingerprint(spec: ScanSpec) -> str:
    payload = json.dumps({
        "points": [asdict(p) for p in spec.points],
        "diagnostics": list(spec.diagnostics),
        "config": serialize(spec.config),
        "ic": [spec.ic_kind, spec.ic_count, list(spec.ic_names)],
    }, sort_keys=True)
    return hashlib.sha256(payload.encode()).hexdigest()


def run_scan(spec: ScanSpec, progress=print) -> dict:
    """Execute a scan with per-point persistence; returns the manifest dict.

    A point that raises is recorded as a failure without stopping the sweep;
    the scan itself fails only if more than 1% of points fail. Resuming into
    an output directory written by a different spec is refused, since stored
    point rows are only valid for the grid that produced them.
    """
    out_dir = Path(spec.out_dir)
    rows_dir = out_dir / "rows"
    rows_dir.mkdir(parents=True, exist_ok=True)
    fingerprint = _spec_fingerprint(spec)
    fp_file = out_dir / "spec.sha256"
    if fp_file.exists() and fp_file.read_text().strip() != fingerprint:
        raise RuntimeError(
            f"{out_dir} holds rows from a different scan spec; "
            "remove the directory or choose another --out")
    fp_file.write_text(fingerprint + "\n")
    states, labels = spec.initial_states()
    progress(f"scan {spec.name}: {estimate_cost(spec)}")

    t_start = time.time()
    failures = {}
    ic_failures = {}
    computed = 0
    for idx, point in enumerate(spec.points):
        row_file = rows_dir / f"point_{idx:04d}.json"
        if row_file.exists():
            continue
        try:
            rows = _point_rows(spec, idx, point, states, labels)
        except Exception as exc:  # failure containment per point
            failures[idx] = f"{type(exc).__name__}: {exc}"
            progress(f"  point {idx} FAILED: {failures[idx]}")
            continue
        row_file.write_text(json.dumps(rows))
        computed += 1
        progress(f"  point {idx + 1}/{len(spec.points)} done "
                 f"(amp={point.amp:.4g}, {time.time() - t_start:.0f}s elapsed)")

    if len(failures) > max(1, len(spec.points)) * 0.01:
        raise RuntimeError(f"{len(failures)}/{len(spec.points)} points failed: {failures}")

    tables = {"lle": LLE_COLUMNS, "coverage": COVERAGE_COLUMNS,
              "randomization": RANDOMIZATION_COLUMNS}
    written = []
    for idx in range(len(spec.points)):
        row_file = rows_dir / f"point_{idx:04d}.json"
        if row_file.exists():
            msgs = json.loads(row_file.read_text()).get("_ic_failures")
            if msgs:
                ic_failures[idx] = msgs
    for diag in spec.diagnostics:
        if diag not in tables:
            continue
        path = out_dir / f"{diag}.csv"
        with open(path, "w") as fh:
            fh.write(header_block(spec.config, {"scan": spec.name}))
            fh.write(",".join(tables[diag]) + "\n")
            for idx in range(len(spec.points)):
                row_file = rows_dir / f"point_{idx:04d}.json"
                if not row_file.exists():
                    continue
                for row in json.loads(row_file.read_text()).get(diag, []):
                    fh.write(",".join(row) + "\n")
        written.append(str(path))

    manifest = {
        "scan": spec.name,
        "version": __version__,
        "config": serialize(spec.config),
        "seed": spec.config.seed,
        "points": [asdict(p) for p in spec.points],
        "diagnostics": list(spec.diagnostics),
        "ic_kind": spec.ic_kind,
        "ic_count": spec.ic_count if spec.ic_kind == "haar" else len(spec.ic_names),
        "ic_names": list(spec.ic_names),
        "tables": written,
        "failures": failures,
        "ic_failures": ic_failures,
        "computed_points": computed,
        "wall_time_s": time.time() - t_start,
    }
    (out_dir / "manifest.json").write_text(json.dumps(manifest, indent=2))
    return manifest


def detect_dips(x: np.ndarray, y: np.ndarray) -> list:
    """Centers of sharp local minima: below half the median of a ±5-point window.

    Returns parabola-refined x positions of every interior local minimum whose
    value is < 0.5 x the window median. Empty list when nothing qualifies.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    order = np.argsort(x)
    x, y = x[order], y[order]
    dips = []
    for i in range(1, len(x) - 1):
        if not (y[i] < y[i - 1] and y[i] <= y[i + 1]):
            continue
        lo = max(0, i - 5)
        window = y[lo:i + 6]
        if y[i] >= 0.5 * float(np.median(window)):
            continue
        # vertex of the parabola through the three points around the minimum
        x0, x1, x2 = x[i - 1], x[i], x[i + 1]
        y0, y1, y2 = y[i - 1], y[i], y[i + 1]
        denom = (x0 - x1) * (x0 - x2) * (x1 - x2)
        a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / denom
        b = (x2 * x2 * (y0 - y1) + x1 * x1 * (y2 - y0) + x0 * x0 * (y1 - y2)) / denom
        dips.append(float(-b / (2 * a)) if a > 0 else float(x1))
    return dips


# -- figure presets ----------------------------------------------------------

def _z_points(amps, freq=60.0):
    return [ScanPoint(float(a), freq, "z") for a in amps]


def _preset_fig2(cfg, out, full):
    return ScanSpec("fig2", _z_points([0.0]), ("lle", "coverage"), cfg, out,
                    ic_kind="haar", ic_count=200)


def _preset_fig3(cfg, out, full):
    amps = np.geomspace(0.01, 3.0, 25)
    return ScanSpec("fig3", _z_points(amps), ("lle", "coverage"), cfg, out,
                    ic_kind="named", ic_names=("xR", "xC"))


def _preset_fig4(cfg, out, full):
    amps = np.geomspace(0.01, 3.0, 40)
    return ScanSpec("fig4", _z_points(amps), ("lle",), cfg, out,
                    ic_kind="haar", ic_count=200)


def _preset_fig5(cfg, out, full):
    amps = np.geomspace(0.01, 3.0, 25)
    return ScanSpec("fig5", _z_points(amps), ("randomization",), _full_ens(cfg, full), out,
                    ic_kind="named", ic_names=("xR", "xC"))


def _preset_fig6(cfg, out, full):
    amps = np.linspace(0.2, 20.0, 120)
    return ScanSpec("fig6", _z_points(amps), ("randomization",), _full_ens(cfg, full), out,
                    ic_kind="named", ic_names=("xR", "xC"))


def _preset_fig7a(cfg, out, full):
    amps = np.linspace(0.2, 20.0, 60)
    return ScanSpec("fig7a", _z_points(amps), ("lle",), cfg, out,
                    ic_kind="haar", ic_count=200)


def _preset_fig7trace(cfg, out, full):
    return ScanSpec("fig7trace", _z_points([17.8]), ("traces",), cfg, out,
                    ic_kind="haar", ic_count=8)


def _preset_appB(cfg, out, full):
    freqs = np.linspace(20.0, 140.0, 13)
    pts = [ScanPoint(2.2, float(f), "z") for f in freqs]
    return ScanSpec("appB", pts, ("lle",), cfg, out, ic_kind="haar", ic_count=200)


def _preset_appB_fixed(freq):
    def build(cfg, out, full):
        d_tildes = np.linspace(0.5, 15.0, 30)
        amps = d_tildes * freq / cfg.params.eps_s_over_h
        pts = [ScanPoint(float(a), freq, "z") for a in amps]
        return ScanSpec(f"appB{int(freq)}", pts, ("lle",), cfg, out,
                        ic_kind="haar", ic_count=200)
    return build


def _preset_appC(cfg, out, full):
    amps = np.geomspace(0.02, 20.0, 40)
    pts = [ScanPoint(float(a), 60.0, ax) for ax in ("z", "y") for a in amps]
    return ScanSpec("appC", pts, ("lle",), cfg, out, ic_kind="haar", ic_count=200)


def _full_ens(cfg: RunConfig, full: bool) -> RunConfig:
    if not full:
        return cfg
    from dataclasses import replace
    return replace(cfg, ensemble=replace(cfg.ensemble, n_ens=cfg.ensemble.full_n_ens))


PRESETS = {
    "fig2": _preset_fig2,
    "fig3": _preset_fig3,
    "fig4": _preset_fig4,
    "fig5": _preset_fig5,
    "fig6": _preset_fig6,
    "fig7a": _preset_fig7a,
    "fig7trace": _preset_fig7trace,
    "appB": _preset_appB,
    "appB40": _preset_appB_fixed(40.0),
    "appB100": _preset_appB_fixed(100.0),
    "appC": _preset_appC,
}


def preset_scan(name: str, cfg: RunConfig, out_dir: str, full: bool = False) -> ScanSpec:
    try:
        build = PRESETS[name]
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; available: {sorted(PRESETS)}")
    return build(cfg, str(out_dir), full)


def scan_spec_from_file(path, cfg: RunConfig, out_dir: str) -> ScanSpec:
    """Explicit-grid scan from a TOML specfile.

    [scan] carries name/diagnostics/ic_kind/ic_count/ic_names; each [[point]]
    carries amp, freq_hz, axis. Any RunConfig sections present override cfg.
    """
    try:
        import tomllib as _toml
    except ModuleNotFoundError:
        import tomli as _toml
    from .config import parse as parse_config
    text = Path(path).read_text()
    doc = _toml.loads(text)
    if any(k in doc for k in ("system", "drive", "integrator", "lle", "histogram", "ensemble", "run")):
        cfg = parse_config(text)
    head = doc.get("scan", {})
    points = [ScanPoint(float(p["amp"]), float(p.get("freq_hz", 60.0)), p.get("axis", "z"))
              for p in doc.get("point", [])]
    if not points:
        raise ValueError(f"specfile {path} defines no [[point]] entries")
    return ScanSpec(
        name=head.get("name", Path(path).stem),
        points=points,
        diagnostics=tuple(head.get("diagnostics", ("lle",))),
        config=cfg,
        out_dir=str(out_dir),
        ic_kind=head.get("ic_kind", "haar"),
        ic_count=int(head.get("ic_count", 200)),
        ic_names=tuple(head.get("ic_names", ("xR", "xC"))),
    )
