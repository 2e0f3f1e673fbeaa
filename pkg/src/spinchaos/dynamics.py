"""Spin-1 mean-field states, Hamiltonians, equations of motion, and the RK4 propagator.

Internally every energy is an angular frequency (rad/s, i.e. E/hbar);
constructors take the Hz quantities quoted in configuration (q/h, eps_s/h,
Omega/2pi, w_m/2pi) plus the dimensionless drive amplitude hbar*D/eps_s.
Integration happens in the spinor representation, which is regular on the
whole state space; the (rho0, m, theta_s, theta_m) coordinate form is kept as
a cross-validation oracle since it is singular on the population boundary.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels

TWO_PI = 2.0 * math.pi
SQRT2 = math.sqrt(2.0)

#: spin-1 operator matrices
F_X = np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]], dtype=complex) / SQRT2
F_Y = np.array([[0, -1j, 0], [1j, 0, -1j], [0, 1j, 0]], dtype=complex) / SQRT2
F_Z = np.diag([1.0, 0.0, -1.0]).astype(complex)

DEFAULT_DT = 1e-5
DT_MAX = 1e-3
DEGENERATE_POP = 1e-12
BOUNDARY_DELTA = 1e-6


class NormDrift(RuntimeError):
    """Pre-renormalization norm error exceeded tolerance; dt too large or pathological parameters."""


class BoundaryProximity(ValueError):
    """Phase-space point too close to the singular population boundary."""


def wrap_angle(a):
    """Wrap angle(s) to [-pi, pi)."""
    return (a + math.pi) % TWO_PI - math.pi


@dataclass(frozen=True)
class SpinorState:
    """Normalized three-component complex amplitude vector (zeta_1, zeta_0, zeta_-1)."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amp = np.asarray(self.amplitudes, dtype=complex).reshape(3)
        n = np.linalg.norm(amp)
        if not np.isfinite(n) or n == 0.0:
            raise ValueError("spinor amplitudes must be finite and nonzero")
        object.__setattr__(self, "amplitudes", amp / n)

    @property
    def populations(self):
        return np.abs(self.amplitudes) ** 2

    def spin_vector(self):
        """Expectation values (f_x, f_y, f_z)."""
        z = self.amplitudes
        w = np.conj(z[0]) * z[1] + np.conj(z[1]) * z[2]
        fz = abs(z[0]) ** 2 - abs(z[2]) ** 2
        return np.array([SQRT2 * w.real, SQRT2 * w.imag, fz])

    def norm(self):
        return float(np.linalg.norm(self.amplitudes))


@dataclass(frozen=True)
class PhasePoint:
    """Gauge-invariant coordinates (rho0, m, theta_s, theta_m).

    theta_s/theta_m live in [-2pi, 2pi); the independently 2pi-periodic
    combinations theta_± = (theta_s ± theta_m)/2 are used by every metric.
    degenerate marks points where some population vanished and the affected
    angles were set to 0 by convention.
    """

    rho0: float
    m: float
    theta_s: float
    theta_m: float
    degenerate: bool = False

    def __post_init__(self):
        if not (-1e-9 <= self.rho0 <= 1.0 + 1e-9):
            raise ValueError(f"rho0 = {self.rho0} outside [0, 1]")
        if abs(self.m) > 1.0 - self.rho0 + 1e-9:
            raise ValueError(f"|m| = {abs(self.m)} exceeds 1 - rho0 = {1.0 - self.rho0}")

    @property
    def theta_plus(self):
        return 0.5 * (self.theta_s + self.theta_m)

    @property
    def theta_minus(self):
        return 0.5 * (self.theta_s - self.theta_m)

    @classmethod
    def from_plus_minus(cls, rho0, m, theta_plus, theta_minus, degenerate=False):
        tp = wrap_angle(theta_plus)
        tm = wrap_angle(theta_minus)
        return cls(rho0, m, tp + tm, tp - tm, degenerate)

    def as_array(self):
        """(rho0, m, theta_plus, theta_minus) — the metric's native coordinates."""
        return np.array([self.rho0, self.m, self.theta_plus, self.theta_minus])


@dataclass(frozen=True)
class SystemParams:
    """Static energy scales in the Hz units of the configuration tables."""

    q_over_h: float = 45.0
    eps_s_over_h: float = 45.0
    omega_rabi: float = 22.5

    def __post_init__(self):
        for name in ("q_over_h", "eps_s_over_h", "omega_rabi"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.eps_s_over_h <= 0:
            raise ValueError("eps_s_over_h must be positive (tau_s = h/eps_s must exist)")

    @property
    def q_rad(self):
        """q/hbar in rad/s."""
        return TWO_PI * self.q_over_h

    @property
    def eps_rad(self):
        """eps_s/hbar in rad/s."""
        return TWO_PI * self.eps_s_over_h

    @property
    def rabi_rad(self):
        """Omega in rad/s."""
        return TWO_PI * self.omega_rabi

    @property
    def tau_s(self):
        """Characteristic spin-interaction time h/eps_s in seconds."""
        return 1.0 / self.eps_s_over_h


@dataclass(frozen=True)
class DriveSpec:
    """Sinusoidal modulation hbar*D sin(w_m t) (d·f) of the linear field."""

    amplitude_hbarD_over_eps: float = 0.0
    freq_hz: float = 60.0
    direction: tuple = (0.0, 0.0, 1.0)

    def __post_init__(self):
        if self.amplitude_hbarD_over_eps < 0:
            raise ValueError("drive amplitude must be >= 0")
        d = np.asarray(self.direction, dtype=float).reshape(3)
        n = np.linalg.norm(d)
        if abs(n - 1.0) > 1e-12:
            raise ValueError(f"drive direction norm {n} not unit within 1e-12")
        object.__setattr__(self, "direction", tuple(float(x) for x in d))

    @classmethod
    def axis(cls, axis, amplitude_hbarD_over_eps=0.0, freq_hz=60.0):
        vec = {"x": (1.0, 0.0, 0.0), "y": (0.0, 1.0, 0.0), "z": (0.0, 0.0, 1.0)}[axis]
        return cls(amplitude_hbarD_over_eps, freq_hz, vec)

    @classmethod
    def none(cls):
        return cls(0.0, 60.0, (0.0, 0.0, 1.0))

    def amplitude_rad(self, params: SystemParams):
        """D in rad/s."""
        return self.amplitude_hbarD_over_eps * params.eps_rad

    @property
    def omega_m_rad(self):
        return TWO_PI * self.freq_hz

    def d_tilde_for(self, params: SystemParams):
        """D/w_m, the dimensionless Bessel-renormalization index."""
        if self.freq_hz == 0:
            raise ValueError("d_tilde undefined at zero modulation frequency")
        return self.amplitude_rad(params) / self.omega_m_rad


@dataclass
class Trajectory:
    """Uniformly sampled state history; times are k*T_s from the index, never accumulated."""

    times: np.ndarray
    states: np.ndarray  # (n, 3) complex
    max_norm_error: float = 0.0
    _phase: np.ndarray = field(default=None, repr=False)
    _flags: np.ndarray = field(default=None, repr=False)

    def __len__(self):
        return len(self.times)

    def phase_coords(self):
        """(n, 4) array of (rho0, m, theta_plus, theta_minus) plus degeneracy flags."""
        if self._phase is None:
            self._phase, self._flags = phase_coords_of(self.states)
        return self._phase

    def degenerate_flags(self):
        self.phase_coords()
        return self._flags

    def magnetization(self):
        return np.abs(self.states[:, 0]) ** 2 - np.abs(self.states[:, 2]) ** 2

    def energies(self, params: SystemParams):
        return energies_of(self.states, params)


# -- named reference states ------------------------------------------------

def _state_from_coords(rho0, m, theta_s, theta_m):
    return from_phase(PhasePoint(rho0, m, theta_s, theta_m))


#: representative regular / chaotic initial conditions and the polar state
NAMED_STATES = {
    "xR": (0.51, 0.25, 0.85 * math.pi, 0.14 * math.pi),
    "xC": (0.70, 0.28, 0.0, 0.0),
    "polar": (1.0, 0.0, 0.0, 0.0),
}


def named_state(name: str) -> "SpinorState":
    try:
        coords = NAMED_STATES[name]
    except KeyError:
        raise KeyError(f"unknown named state {name!r}; choose from {sorted(NAMED_STATES)}")
    return _state_from_coords(*coords)


# -- conversions -------------------------------------------------------------

def to_phase(state: SpinorState) -> PhasePoint:
    """Project a spinor onto (rho0, m, theta_s, theta_m); gauge invariant.

    Populations below 1e-12 make the affected relative angles undefined; they
    are returned as 0 and the point is flagged degenerate.
    """
    z = state.amplitudes
    r1, r0, rm = np.abs(z) ** 2
    degenerate = bool(min(r1, r0, rm) < DEGENERATE_POP)
    a1 = math.atan2(z[0].imag, z[0].real)
    a0 = math.atan2(z[1].imag, z[1].real)
    am = math.atan2(z[2].imag, z[2].real)
    tp = wrap_angle(a1 - a0) if (r1 >= DEGENERATE_POP and r0 >= DEGENERATE_POP) else 0.0
    tm = wrap_angle(am - a0) if (rm >= DEGENERATE_POP and r0 >= DEGENERATE_POP) else 0.0
    m = r1 - rm
    rho0 = min(max(r0, 0.0), 1.0)
    m = max(-(1.0 - rho0), min(1.0 - rho0, m))
    return PhasePoint(rho0, m, tp + tm, tp - tm, degenerate)


def from_phase(point: PhasePoint) -> SpinorState:
    """Reconstruct a spinor, fixing the gauge by theta_0 = 0."""
    rho0 = point.rho0
    m = point.m
    rp = 0.5 * (1.0 - rho0 + m)
    rm = 0.5 * (1.0 - rho0 - m)
    if rp < -1e-9 or rm < -1e-9:
        raise ValueError(f"point violates |m| <= 1 - rho0: rho_+1={rp}, rho_-1={rm}")
    rp = max(rp, 0.0)
    rm = max(rm, 0.0)
    tp = point.theta_plus
    tm = point.theta_minus
    amp = np.array([
        math.sqrt(rp) * complex(math.cos(tp), math.sin(tp)),
        math.sqrt(max(rho0, 0.0)),
        math.sqrt(rm) * complex(math.cos(tm), math.sin(tm)),
    ])
    return SpinorState(amp)


def phase_coords_of(states: np.ndarray):
    """Vectorized to_phase for an (n, 3) complex array.

    Returns ((n, 4) [rho0, m, theta_plus, theta_minus], (n,) degenerate flags).
    """
    states = np.atleast_2d(states)
    r = np.abs(states) ** 2
    ang = np.angle(states)
    ok1 = r[:, 0] >= DEGENERATE_POP
    ok0 = r[:, 1] >= DEGENERATE_POP
    okm = r[:, 2] >= DEGENERATE_POP
    tp = np.where(ok1 & ok0, wrap_angle(ang[:, 0] - ang[:, 1]), 0.0)
    tm = np.where(okm & ok0, wrap_angle(ang[:, 2] - ang[:, 1]), 0.0)
    out = np.stack([r[:, 1], r[:, 0] - r[:, 2], tp, tm], axis=1)
    return out, ~(ok1 & ok0 & okm)


def states_from_phase_coords(coords: np.ndarray) -> np.ndarray:
    """Vectorized from_phase on (n, 4) [rho0, m, theta_plus, theta_minus] arrays."""
    coords = np.atleast_2d(coords)
    rho0 = coords[:, 0]
    m = coords[:, 1]
    rp = np.maximum(0.5 * (1.0 - rho0 + m), 0.0)
    rm = np.maximum(0.5 * (1.0 - rho0 - m), 0.0)
    out = np.empty((len(coords), 3), dtype=complex)
    out[:, 0] = np.sqrt(rp) * np.exp(1j * coords[:, 2])
    out[:, 1] = np.sqrt(np.maximum(rho0, 0.0))
    out[:, 2] = np.sqrt(rm) * np.exp(1j * coords[:, 3])
    out /= np.linalg.norm(out, axis=1)[:, None]
    return out


# -- Hamiltonians ------------------------------------------------------------

def energy_static(state: SpinorState, params: SystemParams) -> float:
    """Static energy H0(zeta)/eps_s from the spinor form."""
    z = state.amplitudes
    f = state.spin_vector()
    zfz = abs(z[0]) ** 2 + abs(z[2]) ** 2  # <F_z^2>
    e_rad = params.rabi_rad * f[0] + params.q_rad * zfz + 0.5 * params.eps_rad * float(f @ f)
    return e_rad / params.eps_rad


def energy_phase(point: PhasePoint, params: SystemParams) -> float:
    """Static energy from the coordinate form; agrees with energy_static to 1e-10."""
    r0 = point.rho0
    m = point.m
    ts = point.theta_s
    om = params.rabi_rad / params.eps_rad
    q = params.q_rad / params.eps_rad
    rad = max((1.0 - r0) ** 2 - m * m, 0.0)
    e = om * math.sqrt(max(r0, 0.0)) * (
        math.sqrt(max(1.0 - r0 + m, 0.0)) * math.cos(point.theta_plus)
        + math.sqrt(max(1.0 - r0 - m, 0.0)) * math.cos(point.theta_minus)
    )
    e += q * (1.0 - r0)
    e += r0 * (1.0 - r0)
    e += r0 * math.sqrt(rad) * math.cos(ts) + 0.5 * m * m
    return e


def energies_of(states: np.ndarray, params: SystemParams) -> np.ndarray:
    """Vectorized static energy (units eps_s) for an (n, 3) complex array."""
    states = np.atleast_2d(states)
    w = np.conj(states[:, 0]) * states[:, 1] + np.conj(states[:, 1]) * states[:, 2]
    fx = SQRT2 * w.real
    fy = SQRT2 * w.imag
    fz = np.abs(states[:, 0]) ** 2 - np.abs(states[:, 2]) ** 2
    zfz = np.abs(states[:, 0]) ** 2 + np.abs(states[:, 2]) ** 2
    om = params.rabi_rad / params.eps_rad
    q = params.q_rad / params.eps_rad
    return om * fx + q * zfz + 0.5 * (fx * fx + fy * fy + fz * fz)


def effective_field(state: SpinorState, params: SystemParams, drive: DriveSpec, t: float) -> np.ndarray:
    """3x3 Hermitian matrix M(zeta, t) in rad/s with d zeta/dt = -i M zeta.

    M = Omega F_x + (q/hbar) F_z^2 + (eps_s/hbar) f·F + D sin(w_m t) d·F,
    where f is the instantaneous spin vector of the input state.
    """
    f = state.spin_vector()
    b = np.array([params.rabi_rad, 0.0, 0.0]) + params.eps_rad * f
    if drive.amplitude_hbarD_over_eps != 0.0:
        s = drive.amplitude_rad(params) * math.sin(drive.omega_m_rad * t)
        b = b + s * np.asarray(drive.direction)
    return b[0] * F_X + b[1] * F_Y + b[2] * F_Z + params.q_rad * (F_Z @ F_Z)


# -- integration -------------------------------------------------------------

def _sin_tables(step0: int, n_steps: int, omega_m: float, dt: float):
    k = np.arange(n_steps + 1, dtype=np.float64)
    full = np.sin(omega_m * ((step0 + k) * dt))
    half = np.sin(omega_m * ((step0 + k[:-1] + 0.5) * dt))
    return full, half


def pack_states(states: np.ndarray) -> np.ndarray:
    """(n, 3) complex -> (n, 6) SoA float array for the kernels."""
    states = np.atleast_2d(states)
    out = np.empty((states.shape[0], 6))
    out[:, 0::2] = states.real
    out[:, 1::2] = states.imag
    return out


def unpack_states(Z: np.ndarray) -> np.ndarray:
    return Z[:, 0::2] + 1j * Z[:, 1::2]


def advance_soa(Z, step0, n_steps, dt, params, drive,
                sample_stride=0, n_keep=0, out_samples=None):
    """Advance an SoA batch in place through the compiled kernel.

    Returns (per-member max pre-renormalization norm error, new step index).
    Time enters only as (step0 + k) * dt, so long runs accumulate no phase drift.
    """
    damp = drive.amplitude_rad(params)
    omm = drive.omega_m_rad
    dx, dy, dz = drive.direction
    sin_full, sin_half = _sin_tables(step0, n_steps, omm, dt)
    if out_samples is None:
        out_samples = np.empty((1, 1, 6))
        sample_stride = 0
        n_keep = 0
    err = np.empty(Z.shape[0])
    _kernels.evolve_batch(Z, n_steps, dt, params.rabi_rad, params.q_rad, params.eps_rad,
                          damp, dx, dy, dz, sin_full, sin_half,
                          sample_stride, n_keep, out_samples, err)
    return err, step0 + n_steps


def step(state: SpinorState, params: SystemParams, drive: DriveSpec,
         t: float, dt: float) -> SpinorState:
    """Single RK4 step; renormalizes and checks the pre-renormalization norm error."""
    if dt == 0.0 or abs(dt) > DT_MAX:
        raise ValueError(f"need 0 < |dt| <= {DT_MAX}")
    Z = pack_states(state.amplitudes[None, :])
    step0 = int(round(t / dt))
    if abs(step0 * dt - t) > 1e-12 + 1e-9 * abs(t):
        # off-grid start time: fold the offset into the tables via a fractional index
        frac = (t - step0 * dt) / dt
        sin_full = np.sin(drive.omega_m_rad * ((step0 + frac + np.arange(2.0)) * dt))
        sin_half = np.sin(drive.omega_m_rad * ((step0 + frac + 0.5) * dt)) * np.ones(1)
        err = np.empty(1)
        _kernels.evolve_batch(Z, 1, dt, params.rabi_rad, params.q_rad, params.eps_rad,
                              drive.amplitude_rad(params), *drive.direction,
                              sin_full, sin_half, 0, 0, np.empty((1, 1, 6)), err)
    else:
        err, _ = advance_soa(Z, step0, 1, dt, params, drive)
    if err[0] > 1e-6:
        raise NormDrift(f"pre-renormalization norm error {err[0]:.3e} > 1e-6 in one step")
    return SpinorState(unpack_states(Z)[0])


def evolve(state: SpinorState, params: SystemParams, drive: DriveSpec,
           t0: float, t1: float, sample_every: float, dt: float = DEFAULT_DT) -> Trajectory:
    """Propagate from t0 to t1 sampling every sample_every seconds.

    Deterministic: identical inputs produce bit-identical trajectories.
    sample_every must be an integer multiple of dt.
    """
    if t1 <= t0:
        raise ValueError("t1 must exceed t0")
    if dt <= 0 or dt > DT_MAX:
        raise ValueError(f"need 0 < dt <= {DT_MAX}")
    stride = int(round(sample_every / dt))
    if stride < 1 or abs(stride * dt - sample_every) > 1e-12:
        raise ValueError("sample_every must be a positive integer multiple of dt")
    step0 = int(round(t0 / dt))
    if abs(step0 * dt - t0) > 1e-12:
        raise ValueError("t0 must sit on the dt grid")
    n_steps = int(round((t1 - t0) / dt))
    n_samples = n_steps // stride
    states = np.empty((n_samples + 1, 3), dtype=complex)
    states[0] = state.amplitudes
    max_err = 0.0
    Z = pack_states(state.amplitudes[None, :])
    # chunk the run so the sample buffer stays small
    chunk_samples = max(1, min(n_samples, 4096))
    done = 0
    while done < n_samples:
        take = min(chunk_samples, n_samples - done)
        buf = np.empty((1, take, 6))
        err, _ = advance_soa(Z, step0 + done * stride, take * stride, dt, params, drive,
                             sample_stride=stride, n_keep=1, out_samples=buf)
        max_err = max(max_err, float(err[0]))
        states[1 + done:1 + done + take] = unpack_states(buf[0])
        done += take
    rem = n_steps - n_samples * stride
    if rem:
        err, _ = advance_soa(Z, step0 + n_samples * stride, rem, dt, params, drive)
        max_err = max(max_err, float(err[0]))
    if max_err > 1e-6:
        raise NormDrift(f"pre-renormalization norm error {max_err:.3e} > 1e-6")
    times = t0 + np.arange(n_samples + 1) * (stride * dt)
    return Trajectory(times, states, max_err)


# -- coordinate-form equations of motion (validation oracle) -----------------

def _check_interior(rho0, m, delta=BOUNDARY_DELTA):
    if not (delta < rho0 < 1.0 - delta) or abs(m) >= 1.0 - rho0 - delta:
        raise BoundaryProximity(
            f"point (rho0={rho0}, m={m}) within {delta} of the singular boundary")


def phase_eom_rhs(point: PhasePoint, params: SystemParams, drive: DriveSpec, t: float) -> np.ndarray:
    """Analytic (d rho0, d theta_s, d m, d theta_m)/dt from the coordinate Hamiltonian.

    Only z-directed (or zero) drive exists in this representation; the spinor
    path is the production integrator for every other case.
    """
    if drive.amplitude_hbarD_over_eps != 0.0 and tuple(drive.direction) != (0.0, 0.0, 1.0):
        raise ValueError("coordinate-form EOM only supports z-directed drive")
    _check_interior(point.rho0, point.m)
    r0 = point.rho0
    m = point.m
    ts = point.theta_s
    tp = point.theta_plus
    tm = point.theta_minus
    om = params.rabi_rad
    q = params.q_rad
    eps = params.eps_rad

    sq_r0 = math.sqrt(r0)
    sp = math.sqrt(1.0 - r0 + m)
    sm = math.sqrt(1.0 - r0 - m)
    rad = math.sqrt((1.0 - r0) ** 2 - m * m)

    dh_dts = (-0.5 * om * sq_r0 * (sp * math.sin(tp) + sm * math.sin(tm))
              - eps * r0 * rad * math.sin(ts))
    dh_dtm = -0.5 * om * sq_r0 * (sp * math.sin(tp) - sm * math.sin(tm))
    dh_dr0 = (om * (0.5 / sq_r0 * (sp * math.cos(tp) + sm * math.cos(tm))
                    - 0.5 * sq_r0 * (math.cos(tp) / sp + math.cos(tm) / sm))
              - q + eps * (1.0 - 2.0 * r0)
              + eps * (rad - r0 * (1.0 - r0) / rad) * math.cos(ts))
    dh_dm = (0.5 * om * sq_r0 * (math.cos(tp) / sp - math.cos(tm) / sm)
             + eps * (m - r0 * m / rad * math.cos(ts)))
    if drive.amplitude_hbarD_over_eps != 0.0:
        dh_dm += drive.amplitude_rad(params) * math.sin(drive.omega_m_rad * t)

    return np.array([-2.0 * dh_dts, 2.0 * dh_dr0, 2.0 * dh_dtm, -2.0 * dh_dm])


def evolve_phase(point: PhasePoint, params: SystemParams, drive: DriveSpec,
                 t0: float, t1: float, dt: float = DEFAULT_DT) -> PhasePoint:
    """RK4 in the coordinate representation; cross-validation only."""
    y = np.array([point.rho0, point.m, point.theta_s, point.theta_m])
    n_steps = int(round((t1 - t0) / dt))

    def rhs(y, t):
        p = PhasePoint(min(max(y[0], 0.0), 1.0), y[1], y[2], y[3])
        d = phase_eom_rhs(p, params, drive, t)
        # rhs order: (rho0, theta_s, m, theta_m) -> reorder to y layout
        return np.array([d[0], d[2], d[1], d[3]])

    for k in range(n_steps):
        t = t0 + k * dt
        k1 = rhs(y, t)
        k2 = rhs(y + 0.5 * dt * k1, t + 0.5 * dt)
        k3 = rhs(y + 0.5 * dt * k2, t + 0.5 * dt)
        k4 = rhs(y + dt * k3, t + dt)
        y = y + dt / 6.0 * (k1 + 2.0 * (k2 + k3) + k4)
    return PhasePoint.from_plus_minus(y[0], y[1], 0.5 * (y[2] + y[3]), 0.5 * (y[2] - y[3]))
