"""Invariant suite behind `spinchaos validate`: conservation, reversibility,
representation and frame equivalence, Haar statistics, eigensolver oracle.

Each check returns (name, passed, detail); run_all aggregates them. The same
functions back the acceptance tests, so the CLI and the test suite cannot
drift apart.
"""

import math

import numpy as np

from . import dynamics, ensembles, sampling
from .dynamics import (DEFAULT_DT, DriveSpec, SpinorState, SystemParams,
                       advance_soa, evolve, evolve_phase, named_state,
                       pack_states, phase_coords_of, to_phase, unpack_states)
from .lyapunov import phase_distance
from .rotating_frame import evolve_rotating
from .sampling import RngSeed, normals, sample_haar_states


def check_conservation(params=SystemParams(), duration=100.0, dt=DEFAULT_DT):
    """Undriven xR/xC for `duration`: max |dE|/eps < 1e-8 along the whole
    trajectory and per-step norm error < 1e-10."""
    drive = DriveSpec.none()
    worst_de = 0.0
    worst_norm = 0.0
    chunk = int(round(1.0 / dt))
    n_chunks = int(round(duration / (chunk * dt)))
    for name in ("xR", "xC"):
        state = named_state(name)
        e0 = dynamics.energy_static(state, params)
        Z = pack_states(state.amplitudes[None, :])
        step0 = 0
        for _ in range(n_chunks):
            err, step0 = advance_soa(Z, step0, chunk, dt, params, drive)
            e1 = float(dynamics.energies_of(unpack_states(Z), params)[0])
            worst_de = max(worst_de, abs(e1 - e0))
            worst_norm = max(worst_norm, float(err[0]))
    ok = worst_de < 1e-8 and worst_norm < 1e-10
    return ("energy/norm conservation", ok,
            f"max |dE|/eps = {worst_de:.2e} (< 1e-8), max per-step norm err = {worst_norm:.2e} (< 1e-10)")


def check_reversibility(params=SystemParams(), duration=1.0, dt=DEFAULT_DT):
    """Forward then backward integration from xR returns within metric distance 1e-8."""
    drive = DriveSpec.none()
    state = named_state("xR")
    Z = pack_states(state.amplitudes[None, :])
    n = int(round(duration / dt))
    advance_soa(Z, 0, n, dt, params, drive)
    # backward leg: t_k = (step0 + k)*dt with dt negated, so step0 = -n walks T -> 0
    advance_soa(Z, -n, n, -dt, params, drive)
    back = SpinorState(unpack_states(Z)[0])
    d = phase_distance(state, back)
    return ("reversibility", d < 1e-8, f"round-trip metric distance = {d:.2e} (< 1e-8)")


def check_representation_equivalence(params=SystemParams(), n_states=10, seed=11,
                                     dt=DEFAULT_DT):
    """Spinor vs coordinate-form integration over 1 tau_s for random interior states."""
    drive = DriveSpec.none()
    gen = RngSeed(seed, sampling.derive_stream(90)).generator()
    worst = 0.0
    count = 0
    while count < n_states:
        z = sample_haar_states(gen, 1)[0]
        c, _ = phase_coords_of(z[None, :])
        rho0, m = c[0, 0], c[0, 1]
        if not (0.05 < rho0 < 0.95 and abs(m) < 0.95 - rho0):
            continue
        count += 1
        state = SpinorState(z)
        point = to_phase(state)
        t1 = params.tau_s
        t1 = round(t1 / dt) * dt
        traj = evolve(state, params, drive, 0.0, t1, t1, dt)
        end_spinor = SpinorState(traj.states[-1])
        end_phase = evolve_phase(point, params, drive, 0.0, t1, dt)
        d = phase_distance(end_spinor, dynamics.from_phase(end_phase))
        worst = max(worst, d)
    return ("representation equivalence", worst < 1e-6,
            f"max metric distance after 1 tau_s over {n_states} states = {worst:.2e} (< 1e-6)")


def check_frame_equivalence(params=SystemParams(), d_tilde=3.0, dt=2e-6):
    """Lab vs rotating frame agree on (rho0, m) within 1e-6 over 5 tau_s, all drive axes.

    Runs at dt = 2e-6: the rotating-frame field oscillates at harmonics of
    D~ w_m, so the two independent integrations need a finer step than the
    production default for their *combined* truncation error to sit below the
    1e-6 equivalence tolerance.
    """
    worst = 0.0
    details = []
    for axis in ("x", "y", "z"):
        amp = d_tilde * 60.0 / params.eps_s_over_h  # hbar*D/eps giving D/w_m = d_tilde
        drive = DriveSpec.axis(axis, amp, 60.0)
        state = named_state("xC")
        stride = max(1, int(round(5.0 * params.tau_s / dt)) // 10)
        t1 = 10 * stride * dt
        sample = stride * dt
        lab = evolve(state, params, drive, 0.0, t1, sample, dt)
        rot = evolve_rotating(state, params, drive, 0.0, t1, sample, dt)
        cl, _ = phase_coords_of(lab.states)
        cr, _ = phase_coords_of(rot.states)
        dev = float(np.max(np.abs(cl[:, :2] - cr[:, :2])))
        details.append(f"{axis}: {dev:.2e}")
        worst = max(worst, dev)
    return ("frame equivalence", worst < 1e-6,
            "max |d(rho0,m)| over 5 tau_s at D~=3 — " + ", ".join(details) + " (< 1e-6)")


def _simplex_chi_square(states: np.ndarray) -> float:
    """Chi-square p-value for population uniformity over 100 equal-area simplex cells."""
    from scipy.stats import chi2
    r = np.abs(states) ** 2
    u = r[:, 0]
    v = r[:, 2]
    i = np.minimum((u * 10).astype(int), 9)
    j = np.minimum((v * 10).astype(int), 9)
    upper = ((u * 10 - i) + (v * 10 - j)) > 1.0
    valid = (i + j) <= 9
    cell = np.where(i + j == 9, 0, upper.astype(int))  # hypotenuse cells have no upper half
    code = (i * 10 + j) * 2 + cell
    counts = np.bincount(code[valid], minlength=200)
    idx = [(a * 10 + b) * 2 + c for a in range(10) for b in range(10 - a)
           for c in ((0, 1) if a + b < 9 else (0,))]
    counts = counts[idx]
    n = counts.sum()
    expected = n / 100.0
    stat = float(((counts - expected) ** 2 / expected).sum())
    return float(chi2.sf(stat, df=99))


def check_haar_statistics(n_samples=100_000, seed=7):
    """Simplex uniformity, first moment 1/3, second moment (1+SWAP)/12 with 1/sqrt(N) scaling."""
    states = sample_haar_states(RngSeed(seed, sampling.derive_stream(91)), n_samples)
    p = _simplex_chi_square(states)
    first = states.T @ states.conj() / n_samples
    d1 = 0.5 * float(np.abs(ensembles.eigvalsh_jacobi(first - np.eye(3) / 3.0)).sum())
    rho_haar = ensembles.haar_second_moment()
    scaling_ok = True
    scale_detail = []
    for n in (256, 1024, 4096):
        m = ensembles.second_moment(states[:n])
        d2 = ensembles.trace_distance(m, rho_haar)
        ratio = d2 * math.sqrt(n)
        scale_detail.append(f"N={n}: sqrt(N)*D2={ratio:.2f}")
        scaling_ok &= (1.0 / 3.0) < ratio < 3.0
    ok = (p > 0.001) and (d1 < 0.01) and scaling_ok
    return ("haar statistics", ok,
            f"simplex chi2 p = {p:.4f} (> 0.001), first-moment distance = {d1:.4f} (< 0.01), "
            + "; ".join(scale_detail) + " (within 3x of 1)")


def check_eigensolver(seed=13):
    """Planted-spectrum reconstruction to 1e-10 and the exact 5/6 single-state distance."""
    gen = RngSeed(seed, sampling.derive_stream(92)).generator()
    worst = 0.0
    for trial in range(5):
        lam = np.sort(normals(gen, 9))
        u = sampling.random_unitary(gen, 9)
        h = (u * lam[None, :]) @ u.conj().T
        h = 0.5 * (h + h.conj().T)
        ev = ensembles.eigvalsh_jacobi(h)
        worst = max(worst, float(np.max(np.abs(ev - lam))))
    z = sample_haar_states(gen, 1)
    single = ensembles.second_moment(z.repeat(2, axis=0))
    d = ensembles.trace_distance(single, ensembles.haar_second_moment())
    err56 = abs(d - 5.0 / 6.0)
    ok = worst < 1e-10 and err56 < 1e-10
    return ("trace-distance oracle", ok,
            f"planted-spectrum max error = {worst:.2e} (< 1e-10), "
            f"|D2(single, Haar) - 5/6| = {err56:.2e} (< 1e-10)")


ALL_CHECKS = (
    check_conservation,
    check_reversibility,
    check_representation_equivalence,
    check_frame_equivalence,
    check_haar_statistics,
    check_eigensolver,
)


def run_all(verbose=True):
    """Run every invariant check; returns True only if all pass."""
    all_ok = True
    for fn in ALL_CHECKS:
        name, ok, detail = fn()
        all_ok &= ok
        if verbose:
            print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}", flush=True)
    return all_ok
