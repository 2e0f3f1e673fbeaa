"""Largest Lyapunov exponent by two-trajectory Benettin rescaling, plus the phase-space metric.

The companion trajectory starts a metric distance d0 away in a random
direction, both are propagated for a reset interval, the log-growth of the
separation is recorded, and the companion is pulled back to d0 along the
current separation direction. Rescaling happens in the metric's native
coordinates (rho0, m, theta_+/pi, theta_-/pi) and the companion is rebuilt as
a spinor afterwards.
"""

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import (DEFAULT_DT, DriveSpec, SpinorState, SystemParams,
                       advance_soa, pack_states, phase_coords_of,
                       states_from_phase_coords, unpack_states, wrap_angle)
from .sampling import RngSeed, normals

#: per-coordinate scale of the metric (angles enter as theta/pi)
METRIC_SCALE = np.array([1.0, 1.0, math.pi, math.pi])


class DegenerateCompanion(RuntimeError):
    """Companion rescaling kept landing outside the physical domain."""


@dataclass(frozen=True)
class LleConfig:
    """Benettin parameters: separation d0, reset interval, iteration count, seed."""

    d0: float = 1e-6
    reset_time: float = 0.05
    n_iter: int = 2000
    seed: int = 0
    stream: int = 0

    def __post_init__(self):
        if self.d0 <= 0 or self.reset_time <= 0 or self.n_iter < 1:
            raise ValueError("need d0 > 0, reset_time > 0, n_iter >= 1")


@dataclass
class LleResult:
    """Exponent estimate in 1/tau_s units with the full iterate trace."""

    lam: float
    stderr: float
    iterates: np.ndarray

    @property
    def cumulative(self):
        return np.cumsum(self.iterates) / np.arange(1, len(self.iterates) + 1)


@dataclass
class LleTrace:
    """lle_trace output: magnetization of the primary plus the iterate traces."""

    times: np.ndarray
    magnetization: np.ndarray
    result: LleResult

    @property
    def iterates(self):
        return self.result.iterates

    @property
    def cumulative(self):
        return self.result.cumulative


def metric_displacement(coords_a, coords_b):
    """Displacement b - a in metric units; angle differences take the shortest arc."""
    d = np.empty(np.broadcast_shapes(np.shape(coords_a), np.shape(coords_b)))
    d[..., 0] = coords_b[..., 0] - coords_a[..., 0]
    d[..., 1] = coords_b[..., 1] - coords_a[..., 1]
    d[..., 2] = wrap_angle(coords_b[..., 2] - coords_a[..., 2]) / math.pi
    d[..., 3] = wrap_angle(coords_b[..., 3] - coords_a[..., 3]) / math.pi
    return d


def phase_distance(a: SpinorState, b: SpinorState) -> float:
    """Gauge-invariant metric d = sqrt(drho0^2 + dm^2 + (dth+/pi)^2 + (dth-/pi)^2)."""
    ca, _ = phase_coords_of(a.amplitudes[None, :])
    cb, _ = phase_coords_of(b.amplitudes[None, :])
    return float(np.linalg.norm(metric_displacement(ca, cb)[0]))


def _coords_valid(coords):
    rho0 = coords[..., 0]
    m = coords[..., 1]
    return (rho0 >= 0.0) & (rho0 <= 1.0) & (np.abs(m) <= 1.0 - rho0)


def _displace(coords, direction, d0):
    out = coords.copy()
    out[..., :] += d0 * direction * METRIC_SCALE
    return out


def benettin_batch(initials: np.ndarray, params, drive, cfg: LleConfig,
                   dt: float = DEFAULT_DT, seeds=None, sample_stride: int = 0,
                   collect_codes=None, collect_m: bool = False, max_retries: int = 10):
    """Run the rescaling loop for a batch of initial states in lockstep.

    initials: (N, 3) complex. seeds: per-IC RngSeed list (defaults to
    cfg.seed/stream for IC 0, stream+i beyond). sample_stride > 0 samples the
    primary every that many steps (must divide the steps per reset);
    collect_codes, when given a callable coords -> int codes, stores the coded
    histogram samples, and collect_m stores the magnetization trace.

    Returns a dict with per-IC iterate arrays (1/s units), optional samples,
    initial energies, the max norm error, and per-IC failure messages.
    """
    initials = np.atleast_2d(initials)
    n = len(initials)
    if seeds is None:
        seeds = [RngSeed(cfg.seed, cfg.stream + i) for i in range(n)]
    gens = [s.generator() for s in seeds]

    steps_per = int(round(cfg.reset_time / dt))
    if abs(steps_per * dt - cfg.reset_time) > 1e-12:
        raise ValueError("reset_time must be an integer multiple of dt")
    if sample_stride:
        if steps_per % sample_stride:
            raise ValueError("sample stride must divide the steps per reset interval")
        per_seg = steps_per // sample_stride
    else:
        per_seg = 0

    coords0, _ = phase_coords_of(initials)
    companions = np.empty_like(coords0)
    failed = [None] * n
    for i in range(n):
        for attempt in range(max_retries + 1):
            u = normals(gens[i], 4)
            u /= np.linalg.norm(u)
            cand = _displace(coords0[i], u, cfg.d0)
            if _coords_valid(cand):
                companions[i] = cand
                break
        else:
            failed[i] = "no valid initial companion direction"
            companions[i] = coords0[i]  # park it; result flagged failed
    comp_states = states_from_phase_coords(companions)

    Z = np.vstack([pack_states(initials), pack_states(comp_states)])
    iterates = np.empty((n, cfg.n_iter))
    codes = np.empty((n, cfg.n_iter * per_seg), dtype=np.uint16) if collect_codes else None
    m_trace = np.empty((n, cfg.n_iter * per_seg)) if collect_m else None
    degenerate_samples = np.zeros(n, dtype=np.int64)
    buf = np.empty((n, per_seg, 6)) if per_seg else None
    max_err = 0.0
    step0 = 0
    for it in range(cfg.n_iter):
        err, step0 = advance_soa(Z, step0, steps_per, dt, params, drive,
                                 sample_stride=sample_stride if per_seg else 0,
                                 n_keep=n if per_seg else 0, out_samples=buf)
        max_err = max(max_err, float(err.max()))
        if per_seg:
            flat = unpack_states(buf.reshape(n * per_seg, 6))
            c, flags = phase_coords_of(flat)
            if collect_codes is not None:
                codes[:, it * per_seg:(it + 1) * per_seg] = \
                    collect_codes(c).reshape(n, per_seg)
                degenerate_samples += flags.reshape(n, per_seg).sum(axis=1)
            if collect_m:
                m_trace[:, it * per_seg:(it + 1) * per_seg] = \
                    c[:, 1].reshape(n, per_seg)

        pc, _ = phase_coords_of(unpack_states(Z[:n]))
        cc, _ = phase_coords_of(unpack_states(Z[n:]))
        v = metric_displacement(pc, cc)
        dist = np.linalg.norm(v, axis=1)
        np.maximum(dist, 1e-300, out=dist)
        iterates[:, it] = np.log(dist / cfg.d0) / cfg.reset_time

        new = _displace(pc, v / dist[:, None], cfg.d0)
        bad = ~_coords_valid(new)
        for i in np.nonzero(bad)[0]:
            if failed[i]:
                continue
            for attempt in range(max_retries):
                u = normals(gens[i], 4)
                u /= np.linalg.norm(u)
                cand = _displace(pc[i], u, cfg.d0)
                if _coords_valid(cand):
                    new[i] = cand
                    break
            else:
                failed[i] = f"companion rescale failed at iteration {it}"
                new[i] = pc[i]  # park it; result flagged failed
        Z[n:] = pack_states(states_from_phase_coords(new))

    return {
        "iterates": iterates,
        "codes": codes,
        "m_trace": m_trace,
        "max_norm_error": max_err,
        "degenerate_samples": degenerate_samples,
        "failed": failed,
    }


def _result_from_iterates(iterates_per_s: np.ndarray, tau_s: float) -> LleResult:
    it = iterates_per_s * tau_s
    lam = float(it.mean())
    stderr = float(it.std(ddof=1) / math.sqrt(len(it))) if len(it) > 1 else 0.0
    return LleResult(lam, stderr, it)


def benettin_lle(initial: SpinorState, params: SystemParams, drive: DriveSpec,
                 cfg: LleConfig, dt: float = DEFAULT_DT) -> LleResult:
    """Largest Lyapunov exponent of one trajectory, in 1/tau_s units."""
    out = benettin_batch(initial.amplitudes[None, :], params, drive, cfg, dt)
    if out["failed"][0]:
        raise DegenerateCompanion(out["failed"][0])
    return _result_from_iterates(out["iterates"][0], params.tau_s)


def lle_trace(initial: SpinorState, params: SystemParams, drive: DriveSpec,
              cfg: LleConfig, sample_period: float = 1e-3,
              dt: float = DEFAULT_DT) -> LleTrace:
    """benettin_lle plus the primary's magnetization trace at sample_period cadence."""
    stride = int(round(sample_period / dt))
    if stride < 1 or abs(stride * dt - sample_period) > 1e-12:
        raise ValueError("sample_period must be a positive integer multiple of dt")
    out = benettin_batch(initial.amplitudes[None, :], params, drive, cfg, dt,
                         sample_stride=stride, collect_m=True)
    if out["failed"][0]:
        raise DegenerateCompanion(out["failed"][0])
    res = _result_from_iterates(out["iterates"][0], params.tau_s)
    m = out["m_trace"][0]
    times = (1 + np.arange(len(m))) * sample_period
    return LleTrace(times, m, res)
