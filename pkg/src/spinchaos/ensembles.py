"""Ensemble evolution toward Haar statistics: second moments, trace distance, randomization time.

The degree of randomization is the trace distance between the two-copy second
moment of the evolving ensemble and the Haar moment (1 + SWAP)/12. The
finite-size floor 1/sqrt(N_ens) sets both the randomness ratio R and the
first-crossing time tau_r.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .dynamics import (DEFAULT_DT, DriveSpec, SpinorState, SystemParams,
                       advance_soa, pack_states)
from .sampling import RngSeed, perturb_states

HERMITICITY_TOL = 1e-12
EIG_TOL = 1e-12
MAX_SWEEPS = 100


class EigFail(RuntimeError):
    """Jacobi off-diagonal residual failed to converge."""


@dataclass(frozen=True)
class Ensemble:
    """Bag of spinor states with the provenance needed to reproduce it."""

    members: np.ndarray  # (N, 3) complex
    center: np.ndarray = None
    d_i: float = 0.0
    seed: RngSeed = None

    def __post_init__(self):
        members = np.asarray(self.members, dtype=complex)
        if members.ndim != 2 or members.shape[1] != 3 or len(members) < 2:
            raise ValueError("ensemble needs an (N>=2, 3) member array")
        norms = np.linalg.norm(members, axis=1)
        if np.any(np.abs(norms - 1.0) > 1e-9):
            raise ValueError("all members must be normalized")
        object.__setattr__(self, "members", members)

    def __len__(self):
        return len(self.members)


@dataclass(frozen=True)
class SecondMoment:
    """9x9 Hermitian unit-trace matrix: mean of (zeta zeta^dagger)^{⊗2}."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (9, 9):
            raise ValueError("second moment must be 9x9")
        if np.max(np.abs(m - m.conj().T)) > HERMITICITY_TOL:
            raise ValueError("second moment not Hermitian within 1e-12")
        if abs(np.trace(m).real - 1.0) > 1e-10:
            raise ValueError("second moment trace != 1 within 1e-10")
        object.__setattr__(self, "matrix", m)

    def eigenvalues(self):
        return eigvalsh_jacobi(self.matrix)


@dataclass
class RandomizationResult:
    """Trace-distance history with floor, randomness R, and first-crossing time tau_r."""

    times: np.ndarray
    delta2: np.ndarray
    floor: float
    t_f: float
    realized_spread: float = 0.0
    max_norm_error: float = 0.0

    @property
    def R(self):
        return self.floor / self.delta2[-1]

    @property
    def tau_r(self):
        """First sampled time at or below the floor; inf if never reached."""
        hits = np.nonzero(self.delta2 <= self.floor)[0]
        return float(self.times[hits[0]]) if len(hits) else math.inf


def eigvalsh_jacobi(h: np.ndarray, tol: float = EIG_TOL, max_sweeps: int = MAX_SWEEPS) -> np.ndarray:
    """Eigenvalues of a Hermitian matrix via the deterministic cyclic-Jacobi kernel."""
    h = np.ascontiguousarray(h, dtype=complex)
    evals, _, off = _kernels.jacobi_eigvalsh(h, tol * max(1.0, float(np.abs(h).max())), max_sweeps)
    if off > tol * max(1.0, float(np.abs(h).max())):
        raise EigFail(f"off-diagonal residual {off:.3e} after {max_sweeps} sweeps")
    return evals


def trace_norm(h: np.ndarray) -> float:
    return float(np.abs(eigvalsh_jacobi(h)).sum())


def make_ensemble(center: SpinorState, n_ens: int, d_i: float, rng: RngSeed) -> Ensemble:
    """n_ens Gaussian perturbations of the center, spread d_i in the phase-space metric."""
    if n_ens < 2:
        raise ValueError("ensemble needs at least 2 members")
    members = perturb_states(center, d_i, rng, n_ens)
    return Ensemble(members, center.amplitudes, d_i, rng)


def second_moment(ens) -> SecondMoment:
    """Two-copy second moment; accepts an Ensemble or a raw (N, 3) member array."""
    members = ens.members if isinstance(ens, Ensemble) else np.atleast_2d(ens)
    return SecondMoment(_kernels.second_moment_accumulate(pack_states(members)))


def haar_second_moment() -> SecondMoment:
    """Closed form (1 + SWAP)/12, the normalized symmetric-subspace projector."""
    swap = np.zeros((9, 9), dtype=complex)
    for i in range(3):
        for j in range(3):
            swap[i * 3 + j, j * 3 + i] = 1.0
    return SecondMoment((np.eye(9, dtype=complex) + swap) / 12.0)


def trace_distance(a: SecondMoment, b: SecondMoment) -> float:
    """Half the trace norm of the Hermitian difference; in [0, 1]."""
    return 0.5 * trace_norm(a.matrix - b.matrix)


def randomization_run(center: SpinorState, params: SystemParams, drive: DriveSpec,
                      n_ens: int, d_i: float, rng: RngSeed,
                      t_f: float = None, sample_every: float = None,
                      dt: float = DEFAULT_DT) -> RandomizationResult:
    """Evolve a perturbation ensemble and track its trace distance to the Haar moment.

    Defaults: t_f = 90 tau_s with samples every 0.1 tau_s. The floor is
    1/sqrt(N_ens); tau_r is the first sampled time at or below it, with no
    interpolation between samples.
    """
    if t_f is None:
        t_f = 90.0 * params.tau_s
    if sample_every is None:
        sample_every = 0.1 * params.tau_s
    if t_f <= 0:
        raise ValueError("t_f must be positive")
    ens = make_ensemble(center, n_ens, d_i, rng)

    from .lyapunov import metric_displacement
    from .dynamics import phase_coords_of
    cc, _ = phase_coords_of(center.amplitudes[None, :])
    mc, _ = phase_coords_of(ens.members)
    realized = float(np.linalg.norm(metric_displacement(cc, mc), axis=1).mean())

    rho_haar = haar_second_moment()
    steps_per = int(round(sample_every / dt))
    if steps_per < 1:
        raise ValueError("sample_every must be at least dt")
    n_samp = int(round(t_f / (steps_per * dt)))
    Z = pack_states(ens.members)
    delta2 = np.empty(n_samp + 1)
    delta2[0] = trace_distance(second_moment(ens.members), rho_haar)
    max_err = 0.0
    step0 = 0
    for s in range(1, n_samp + 1):
        err, step0 = advance_soa(Z, step0, steps_per, dt, params, drive)
        max_err = max(max_err, float(err.max()))
        moment = SecondMoment(_kernels.second_moment_accumulate(Z))
        delta2[s] = trace_distance(moment, rho_haar)
    times = np.arange(n_samp + 1) * (steps_per * dt)
    return RandomizationResult(times, delta2, 1.0 / math.sqrt(n_ens), t_f,
                               realized, max_err)
