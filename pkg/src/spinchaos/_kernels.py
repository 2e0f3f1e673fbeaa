"""Compiled inner loops: batched RK4 propagation, moment accumulation, Jacobi eigensolver.

States are carried in structure-of-arrays layout, shape (N, 6) float64 with
columns (Re z1, Im z1, Re z0, Im z0, Re z-1, Im z-1), so the per-member loop
stays in registers. All randomness is drawn outside these kernels; every
member's arithmetic is independent of thread count, which keeps results
bit-identical for any `--threads` setting.
"""

import math

import numpy as np
from numba import njit, prange

SQRT2 = math.sqrt(2.0)
INV_SQRT2 = 1.0 / SQRT2


@njit(cache=True, inline="always")
def _field_times_state(z1r, z1i, z0r, z0i, zmr, zmi, om, qh, eh, s, dx, dy, dz):
    """One evaluation of -i(effective field)·zeta, unrolled to real scalars.

    s is the instantaneous drive coefficient D sin(w_m t) in rad/s.
    """
    wr = z1r * z0r + z1i * z0i + z0r * zmr + z0i * zmi
    wi = z1r * z0i - z1i * z0r + z0r * zmi - z0i * zmr
    fx = SQRT2 * wr
    fy = SQRT2 * wi
    fz = (z1r * z1r + z1i * z1i) - (zmr * zmr + zmi * zmi)
    bx = om + eh * fx + s * dx
    by = eh * fy + s * dy
    bz = eh * fz + s * dz
    cr = bx * INV_SQRT2
    ci = -by * INV_SQRT2
    p = bz + qh
    q2 = qh - bz
    t1r = cr * z0r - ci * z0i + p * z1r
    t1i = cr * z0i + ci * z0r + p * z1i
    t0r = cr * z1r + ci * z1i + cr * zmr - ci * zmi
    t0i = cr * z1i - ci * z1r + cr * zmi + ci * zmr
    tmr = cr * z0r + ci * z0i + q2 * zmr
    tmi = cr * z0i - ci * z0r + q2 * zmi
    # multiply by -i: (r, i) -> (i, -r)
    return t1i, -t1r, t0i, -t0r, tmi, -tmr


@njit(cache=True, parallel=True, fastmath=True)
def evolve_batch(Z, n_steps, dt, om, qh, eh, damp, dx, dy, dz,
                 sin_full, sin_half, sample_stride, n_keep, out_samples, out_err):
    """Advance every row of Z by n_steps of fixed-step RK4, renormalizing each step.

    sin_full[k] = sin(w_m t_k) at the step starts (length n_steps+1, the last
    entry serving stage 4); sin_half[k] the midpoint values. Drive amplitude 0
    therefore shares the exact code path with the undriven system.

    If sample_stride > 0, rows j < n_keep store their state every
    sample_stride steps into out_samples[j, s, :]. out_err[j] receives the
    largest pre-renormalization norm error seen by row j.
    """
    N = Z.shape[0]
    h = 0.5 * dt
    w6 = dt / 6.0
    for j in prange(N):
        z1r = Z[j, 0]
        z1i = Z[j, 1]
        z0r = Z[j, 2]
        z0i = Z[j, 3]
        zmr = Z[j, 4]
        zmi = Z[j, 5]
        merr = 0.0
        for k in range(n_steps):
            s1 = damp * sin_full[k]
            s2 = damp * sin_half[k]
            s4 = damp * sin_full[k + 1]

            a1r, a1i, a0r, a0i, amr, ami = _field_times_state(
                z1r, z1i, z0r, z0i, zmr, zmi, om, qh, eh, s1, dx, dy, dz)
            b1r, b1i, b0r, b0i, bmr, bmi = _field_times_state(
                z1r + h * a1r, z1i + h * a1i, z0r + h * a0r, z0i + h * a0i,
                zmr + h * amr, zmi + h * ami, om, qh, eh, s2, dx, dy, dz)
            c1r, c1i, c0r, c0i, cmr, cmi = _field_times_state(
                z1r + h * b1r, z1i + h * b1i, z0r + h * b0r, z0i + h * b0i,
                zmr + h * bmr, zmi + h * bmi, om, qh, eh, s2, dx, dy, dz)
            d1r, d1i, d0r, d0i, dmr, dmi = _field_times_state(
                z1r + dt * c1r, z1i + dt * c1i, z0r + dt * c0r, z0i + dt * c0i,
                zmr + dt * cmr, zmi + dt * cmi, om, qh, eh, s4, dx, dy, dz)

            z1r += w6 * (a1r + 2.0 * (b1r + c1r) + d1r)
            z1i += w6 * (a1i + 2.0 * (b1i + c1i) + d1i)
            z0r += w6 * (a0r + 2.0 * (b0r + c0r) + d0r)
            z0i += w6 * (a0i + 2.0 * (b0i + c0i) + d0i)
            zmr += w6 * (amr + 2.0 * (bmr + cmr) + dmr)
            zmi += w6 * (ami + 2.0 * (bmi + cmi) + dmi)

            n = math.sqrt(z1r * z1r + z1i * z1i + z0r * z0r + z0i * z0i
                          + zmr * zmr + zmi * zmi)
            e = abs(n - 1.0)
            if e > merr:
                merr = e
            inv = 1.0 / n
            z1r *= inv
            z1i *= inv
            z0r *= inv
            z0i *= inv
            zmr *= inv
            zmi *= inv

            if sample_stride > 0 and j < n_keep:
                kk = k + 1
                if kk % sample_stride == 0:
                    s = kk // sample_stride - 1
                    out_samples[j, s, 0] = z1r
                    out_samples[j, s, 1] = z1i
                    out_samples[j, s, 2] = z0r
                    out_samples[j, s, 3] = z0i
                    out_samples[j, s, 4] = zmr
                    out_samples[j, s, 5] = zmi
        Z[j, 0] = z1r
        Z[j, 1] = z1i
        Z[j, 2] = z0r
        Z[j, 3] = z0i
        Z[j, 4] = zmr
        Z[j, 5] = zmi
        out_err[j] = merr


@njit(cache=True)
def second_moment_accumulate(Z):
    """Mean of (zeta zeta^dagger)^{⊗2} over the rows of Z, serial reduction.

    Serial member order makes the result independent of thread count.
    """
    N = Z.shape[0]
    out = np.zeros((9, 9), dtype=np.complex128)
    w = np.empty(9, dtype=np.complex128)
    for n in range(N):
        z1 = complex(Z[n, 0], Z[n, 1])
        z0 = complex(Z[n, 2], Z[n, 3])
        zm = complex(Z[n, 4], Z[n, 5])
        w[0] = z1 * z1
        w[1] = z1 * z0
        w[2] = z1 * zm
        w[3] = z0 * z1
        w[4] = z0 * z0
        w[5] = z0 * zm
        w[6] = zm * z1
        w[7] = zm * z0
        w[8] = zm * zm
        for a in range(9):
            wa = w[a]
            for b in range(9):
                out[a, b] += wa * w[b].conjugate()
    return out / N


@njit(cache=True)
def jacobi_eigvalsh(A, tol, max_sweeps):
    """Eigenvalues of a Hermitian matrix by cyclic Jacobi rotations.

    Returns (sorted eigenvalues, sweeps used, final off-diagonal Frobenius
    residual). The rotation order is fixed (row-major over p < q), so results
    are bit-stable for a given input.
    """
    n = A.shape[0]
    H = A.copy()
    sweeps = 0
    off = 0.0
    for sweep in range(max_sweeps + 1):
        off = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                hr = H[p, q].real
                hi = H[p, q].imag
                off += hr * hr + hi * hi
        off = math.sqrt(2.0 * off)
        sweeps = sweep
        if off <= tol or sweep == max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = H[p, q]
                mag = abs(apq)
                if mag == 0.0:
                    continue
                # phase e^{i phi} = apq / |apq|
                phr = apq.real / mag
                phi = apq.imag / mag
                app = H[p, p].real
                aqq = H[q, q].real
                tau = (aqq - app) / (2.0 * mag)
                if tau >= 0.0:
                    t = 1.0 / (tau + math.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                # column update: M = H J with J[p,p]=c, J[p,q]=s e^{i phi},
                # J[q,p]=-s e^{-i phi}, J[q,q]=c
                ph = complex(phr, phi)
                phc = complex(phr, -phi)
                for k in range(n):
                    hkp = H[k, p]
                    hkq = H[k, q]
                    H[k, p] = c * hkp - s * phc * hkq
                    H[k, q] = s * ph * hkp + c * hkq
                # row update: H <- J^dagger M
                for k in range(n):
                    hpk = H[p, k]
                    hqk = H[q, k]
                    H[p, k] = c * hpk - s * ph * hqk
                    H[q, k] = s * phc * hpk + c * hqk
                # the rotation annihilates the pivot analytically
                H[p, q] = 0.0
                H[q, p] = 0.0
    evals = np.empty(n)
    for k in range(n):
        evals[k] = H[k, k].real
    evals.sort()
    return evals, sweeps, off
