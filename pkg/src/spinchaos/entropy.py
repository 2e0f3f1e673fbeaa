"""Coarse-grained occupation entropy, Haar reference, entropy deficit and coverage fraction.

A trajectory is sampled every T_s onto a fixed rectangular 4-D grid over
(rho0, m, theta_+, theta_-); the Shannon entropy (natural log) of the
occupancy is compared against the entropy of equally many Haar draws under
the identical binning. The coverage fraction is V = exp(-(S_Haar - S)).
"""

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import Trajectory
from .sampling import RngSeed, sample_haar_states


class InsufficientSamples(ValueError):
    """Trajectory carries fewer samples than the histogram spec requires."""


@dataclass(frozen=True)
class HistogramSpec:
    """Binning and sampling plan for occupation entropies.

    Axis ranges are fixed: rho0 in [0,1], m in [-1,1], theta_± in [-pi, pi).
    """

    bins_per_axis: int = 8
    sample_period: float = 1e-3
    n_samples: int = 100_000

    def __post_init__(self):
        if self.bins_per_axis < 1 or self.n_samples < 1 or self.sample_period <= 0:
            raise ValueError("invalid histogram spec")

    @property
    def n_bins(self):
        return self.bins_per_axis ** 4


@dataclass
class CoverageResult:
    """Entropies in nats; V = exp(-(S_haar - S)). Small negative deltaS is sampling noise."""

    S: float
    S_haar: float

    @property
    def deltaS(self):
        return self.S_haar - self.S

    @property
    def V(self):
        return math.exp(-self.deltaS)


def phase_codes(coords: np.ndarray, bins_per_axis: int = 8) -> np.ndarray:
    """Flatten (n, 4) metric coordinates into uint16 cell codes on the rectangular grid."""
    b = bins_per_axis
    i0 = np.clip((coords[:, 0] * b).astype(np.int64), 0, b - 1)
    i1 = np.clip(((coords[:, 1] + 1.0) * 0.5 * b).astype(np.int64), 0, b - 1)
    i2 = np.clip(((coords[:, 2] + math.pi) / (2.0 * math.pi) * b).astype(np.int64), 0, b - 1)
    i3 = np.clip(((coords[:, 3] + math.pi) / (2.0 * math.pi) * b).astype(np.int64), 0, b - 1)
    return (((i0 * b + i1) * b + i2) * b + i3).astype(np.uint16)


def entropy_from_codes(codes: np.ndarray, spec: HistogramSpec) -> float:
    counts = np.bincount(codes, minlength=spec.n_bins)
    return entropy_from_counts(counts)


def entropy_from_counts(counts: np.ndarray) -> float:
    """Shannon entropy (nats) of a histogram; empty cells contribute nothing."""
    n = counts.sum()
    p = counts[counts > 0] / n
    return float(-(p * np.log(p)).sum())


def trajectory_entropy(traj: Trajectory, spec: HistogramSpec) -> float:
    """Occupation entropy of the first n_samples post-t0 samples of a trajectory."""
    coords = traj.phase_coords()
    if len(coords) - 1 < spec.n_samples:
        raise InsufficientSamples(
            f"need {spec.n_samples} samples, trajectory has {len(coords) - 1} past t0")
    dt_s = traj.times[1] - traj.times[0]
    if abs(dt_s - spec.sample_period) > 1e-12:
        raise InsufficientSamples(
            f"trajectory sampled every {dt_s} s, spec wants {spec.sample_period} s")
    codes = phase_codes(coords[1:spec.n_samples + 1], spec.bins_per_axis)
    return entropy_from_codes(codes, spec)


_haar_cache: dict = {}


def haar_entropy(spec: HistogramSpec, rng: RngSeed) -> float:
    """Reference entropy of n_samples Haar draws under the same binning; cached per (spec, rng)."""
    key = (spec.bins_per_axis, spec.n_samples, rng.seed, rng.stream)
    if key not in _haar_cache:
        from .dynamics import phase_coords_of
        states = sample_haar_states(rng, spec.n_samples)
        coords, _ = phase_coords_of(states)
        _haar_cache[key] = entropy_from_codes(phase_codes(coords, spec.bins_per_axis), spec)
    return _haar_cache[key]


def coverage(traj: Trajectory, spec: HistogramSpec, rng: RngSeed) -> CoverageResult:
    """Entropy deficit of a trajectory against the shared Haar reference."""
    return CoverageResult(trajectory_entropy(traj, spec), haar_entropy(spec, rng))


def coverage_from_codes(codes: np.ndarray, spec: HistogramSpec, rng: RngSeed) -> CoverageResult:
    if len(codes) < spec.n_samples:
        raise InsufficientSamples(f"need {spec.n_samples} coded samples, got {len(codes)}")
    return CoverageResult(entropy_from_codes(codes[:spec.n_samples], spec),
                          haar_entropy(spec, rng))
