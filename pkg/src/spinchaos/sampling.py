"""Seeded randomness: Haar-distributed spin-1 states and phase-space Gaussian perturbations.

The generator is numpy's Philox, a counter-based bit generator with period
2^128 and a documented, platform-independent stream, keyed by the pair
(seed, stream) so every trajectory of a sweep owns an independent stream.
Normal variates use the Box-Muller transform of the generator's uniform
doubles; this fixes the variate sequence independent of numpy's internal
(and version-dependent) ziggurat sampler.
"""

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import SpinorState, phase_coords_of, states_from_phase_coords

TWO_PI = 2.0 * math.pi
MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class RngSeed:
    """Reproducible stream identity: same (seed, stream) -> same draws everywhere."""

    seed: int = 0
    stream: int = 0

    def generator(self) -> np.random.Generator:
        return np.random.Generator(np.random.Philox(key=[self.seed & MASK64, self.stream & MASK64]))

    def with_stream(self, stream: int) -> "RngSeed":
        return RngSeed(self.seed, stream)


def derive_stream(tag: int, i: int = 0, j: int = 0) -> int:
    """Stable injective-by-construction stream id for (tag, point index, IC index).

    splitmix64-style finalizer over the packed indices; pure integer math,
    identical on every platform.
    """
    x = ((tag & 0xFFFF) << 48) ^ ((i & 0xFFFFFF) << 24) ^ (j & 0xFFFFFF)
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return (z ^ (z >> 31)) & MASK64


def normals(gen: np.random.Generator, n: int) -> np.ndarray:
    """n standard normals via Box-Muller on gen.random() uniforms."""
    pairs = (n + 1) // 2
    u1 = 1.0 - gen.random(pairs)  # (0, 1]: keeps log finite
    u2 = gen.random(pairs)
    r = np.sqrt(-2.0 * np.log(u1))
    out = np.empty(2 * pairs)
    out[0::2] = r * np.cos(TWO_PI * u2)
    out[1::2] = r * np.sin(TWO_PI * u2)
    return out[:n]


def sample_haar_states(rng: RngSeed | np.random.Generator, n: int) -> np.ndarray:
    """(n, 3) complex array of Haar-random pure spin-1 states.

    Three complex amplitudes from independent standard complex Gaussians,
    normalized; the resulting distribution is unitarily invariant.
    """
    gen = rng.generator() if isinstance(rng, RngSeed) else rng
    g = normals(gen, 6 * n).reshape(n, 6)
    z = g[:, 0::2] + 1j * g[:, 1::2]
    z /= np.linalg.norm(z, axis=1)[:, None]
    return z


def sample_haar(rng: RngSeed | np.random.Generator) -> SpinorState:
    return SpinorState(sample_haar_states(rng, 1)[0])


def perturb_states(center: SpinorState, d_i: float, rng: RngSeed | np.random.Generator,
                   n: int) -> np.ndarray:
    """n states Gaussian-scattered around center in the phase-space metric.

    Each of (rho0, m, theta_+/pi, theta_-/pi) receives independent noise of
    standard deviation d_i/2, making the expected metric distance from the
    center ~ d_i; (rho0, m) are clamped into the physical triangle.
    """
    if d_i <= 0:
        raise ValueError("spread d_i must be positive")
    gen = rng.generator() if isinstance(rng, RngSeed) else rng
    c, _ = phase_coords_of(center.amplitudes[None, :])
    g = normals(gen, 4 * n).reshape(n, 4) * (0.5 * d_i)
    coords = np.empty((n, 4))
    coords[:, 0] = np.clip(c[0, 0] + g[:, 0], 0.0, 1.0)
    mmax = 1.0 - coords[:, 0]
    coords[:, 1] = np.clip(c[0, 1] + g[:, 1], -mmax, mmax)
    coords[:, 2] = c[0, 2] + g[:, 2] * math.pi
    coords[:, 3] = c[0, 3] + g[:, 3] * math.pi
    return states_from_phase_coords(coords)


def perturb(center: SpinorState, d_i: float, rng: RngSeed | np.random.Generator) -> SpinorState:
    return SpinorState(perturb_states(center, d_i, rng, 1)[0])


def random_unitary(gen: np.random.Generator, d: int = 3) -> np.ndarray:
    """Haar-random U(d) via QR of a complex Ginibre matrix with phase fixing."""
    g = normals(gen, 2 * d * d)
    a = (g[0::2] + 1j * g[1::2]).reshape(d, d) / math.sqrt(2.0)
    q, r = np.linalg.qr(a)
    ph = np.diag(r).copy()
    ph /= np.abs(ph)
    return q * ph[None, :]
