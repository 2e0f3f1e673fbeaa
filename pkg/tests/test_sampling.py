import numpy as np
import pytest

from spinchaos.dynamics import from_phase, PhasePoint, phase_coords_of
from spinchaos.entropy import HistogramSpec, entropy_from_codes, phase_codes
from spinchaos.lyapunov import metric_displacement, phase_distance
from spinchaos.sampling import (RngSeed, derive_stream, normals, perturb,
                                perturb_states, random_unitary,
                                sample_haar_states)
from spinchaos.validation import _simplex_chi_square


class TestHaar:
    def test_normalized(self):
        z = sample_haar_states(RngSeed(1, 0), 1000)
        assert np.allclose(np.linalg.norm(z, axis=1), 1.0, atol=1e-12)

    def test_population_simplex_uniform(self):
        z = sample_haar_states(RngSeed(2, 0), 100_000)
        p = _simplex_chi_square(z)
        assert p > 0.001

    def test_mean_first_moment(self):
        z = sample_haar_states(RngSeed(3, 0), 100_000)
        first = z.T @ z.conj() / len(z)
        ev = np.linalg.eigvalsh(first - np.eye(3) / 3)
        assert 0.5 * np.abs(ev).sum() < 0.01

    def test_deterministic(self):
        a = sample_haar_states(RngSeed(4, 7), 1000)
        b = sample_haar_states(RngSeed(4, 7), 1000)
        assert np.array_equal(a, b)
        c = sample_haar_states(RngSeed(4, 8), 1000)
        assert not np.array_equal(a, c)

    def test_unitary_invariance_of_coverage_entropy(self):
        # histogrammed entropy of {U zeta} matches {zeta} within statistical error
        spec = HistogramSpec()
        z = sample_haar_states(RngSeed(5, 0), spec.n_samples)
        u = random_unitary(RngSeed(6, 0).generator())
        coords, _ = phase_coords_of(z)
        coords_u, _ = phase_coords_of(z @ u.T)
        s = entropy_from_codes(phase_codes(coords), spec)
        s_u = entropy_from_codes(phase_codes(coords_u), spec)
        assert abs(s - s_u) < 0.02


class TestNormals:
    def test_moments(self):
        g = normals(RngSeed(7, 0).generator(), 200_000)
        assert abs(g.mean()) < 0.01
        assert abs(g.std() - 1.0) < 0.01

    def test_odd_count(self):
        assert len(normals(RngSeed(7, 1).generator(), 7)) == 7


class TestPerturb:
    def test_mean_distance_band(self, xC):
        # Monte-Carlo oracle: E[d] = (d_i/2) E[chi_4] ≈ 0.94 d_i, asserted in [0.8, 1.2] d_i
        d_i = 5e-3
        members = perturb_states(xC, d_i, RngSeed(8, 0), 10_000)
        cc, _ = phase_coords_of(xC.amplitudes[None, :])
        mc, _ = phase_coords_of(members)
        dist = np.linalg.norm(metric_displacement(cc, mc), axis=1)
        assert 0.8 * d_i < dist.mean() < 1.2 * d_i

    def test_small_spread_limit(self, xC):
        out = perturb(xC, 1e-14, RngSeed(8, 1))
        assert phase_distance(xC, out) < 1e-12

    def test_clamping_at_boundary_center(self):
        polar = from_phase(PhasePoint(1.0, 0.0, 0.0, 0.0))
        members = perturb_states(polar, 0.05, RngSeed(8, 2), 5000)
        coords, _ = phase_coords_of(members)
        assert np.all(coords[:, 0] <= 1.0 + 1e-12)
        assert np.all(np.abs(coords[:, 1]) <= 1.0 - coords[:, 0] + 1e-9)

    def test_rejects_nonpositive_spread(self, xC):
        with pytest.raises(ValueError):
            perturb(xC, 0.0, RngSeed(0, 0))


class TestStreams:
    def test_derive_stream_stable_and_distinct(self):
        a = derive_stream(2, 5, 9)
        assert a == derive_stream(2, 5, 9)
        seen = {derive_stream(t, i, j) for t in range(3) for i in range(20) for j in range(20)}
        assert len(seen) == 3 * 20 * 20
