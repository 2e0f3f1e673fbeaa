import math

import numpy as np
import pytest

from spinchaos.dynamics import DriveSpec
from spinchaos.ensembles import (EigFail, SecondMoment, eigvalsh_jacobi,
                                 haar_second_moment, make_ensemble,
                                 randomization_run, second_moment, trace_distance)
from spinchaos.sampling import RngSeed, normals, random_unitary, sample_haar_states


def _swap_matrix():
    s = np.zeros((9, 9))
    for i in range(3):
        for j in range(3):
            s[i * 3 + j, j * 3 + i] = 1.0
    return s


class TestSecondMoment:
    def test_single_state_rank_one(self):
        z = sample_haar_states(RngSeed(1, 0), 1)
        m = second_moment(z.repeat(4, axis=0)).matrix
        w = np.kron(z[0], z[0])
        assert np.allclose(m, np.outer(w, w.conj()), atol=1e-12)
        ev = eigvalsh_jacobi(m)
        assert ev[-1] == pytest.approx(1.0, abs=1e-10)
        assert np.all(np.abs(ev[:-1]) < 1e-10)

    def test_tensor_factor_swap_symmetry(self):
        z = sample_haar_states(RngSeed(1, 1), 200)
        m = second_moment(z).matrix
        s = _swap_matrix()
        assert np.allclose(s @ m @ s, m, atol=1e-12)

    def test_hermitian_psd_unit_trace(self):
        z = sample_haar_states(RngSeed(1, 2), 500)
        m = second_moment(z)
        assert np.max(np.abs(m.matrix - m.matrix.conj().T)) < 1e-12
        assert np.trace(m.matrix).real == pytest.approx(1.0, abs=1e-10)
        assert eigvalsh_jacobi(m.matrix).min() > -1e-10

    def test_monte_carlo_convergence_to_haar(self):
        rho_haar = haar_second_moment()
        for n in (256, 1024, 4096):
            z = sample_haar_states(RngSeed(1, 3), n)
            d = trace_distance(second_moment(z), rho_haar)
            assert 1 / (3 * math.sqrt(n)) < d < 3 / math.sqrt(n)


class TestHaarMoment:
    def test_closed_form(self):
        m = haar_second_moment().matrix
        assert np.allclose(m, (np.eye(9) + _swap_matrix()) / 12.0, atol=1e-15)
        assert np.trace(m).real == pytest.approx(1.0, abs=1e-15)  # (9 + 3)/12

    def test_eigenvalues_sixth_and_zero(self):
        ev = eigvalsh_jacobi(haar_second_moment().matrix)
        assert np.allclose(ev[:3], 0.0, atol=1e-12)
        assert np.allclose(ev[3:], 1.0 / 6.0, atol=1e-12)


class TestTraceDistance:
    def test_identical_is_zero(self):
        m = haar_second_moment()
        assert trace_distance(m, m) == 0.0

    def test_single_state_vs_haar_exact(self):
        z = sample_haar_states(RngSeed(2, 0), 1)
        single = second_moment(z.repeat(2, axis=0))
        d = trace_distance(single, haar_second_moment())
        assert d == pytest.approx(5.0 / 6.0, abs=1e-10)

    def test_range_bound(self):
        a = sample_haar_states(RngSeed(2, 1), 64)
        b = sample_haar_states(RngSeed(2, 2), 64)
        d = trace_distance(second_moment(a), second_moment(b))
        assert 0.0 <= d <= 1.0 + 1e-10

    def test_global_unitary_invariance(self):
        # applying U (x) U to the ensemble moment leaves distance-to-Haar unchanged
        z = sample_haar_states(RngSeed(2, 3), 128)
        u = random_unitary(RngSeed(2, 4).generator())
        m = second_moment(z)
        mu = SecondMoment(np.kron(u, u) @ m.matrix @ np.kron(u, u).conj().T)
        d1 = trace_distance(m, haar_second_moment())
        d2 = trace_distance(mu, haar_second_moment())
        assert d1 == pytest.approx(d2, abs=1e-10)

    def test_member_relabeling_invariance(self):
        z = sample_haar_states(RngSeed(2, 5), 300)
        perm = np.random.default_rng(0).permutation(300)
        d1 = trace_distance(second_moment(z), haar_second_moment())
        d2 = trace_distance(second_moment(z[perm]), haar_second_moment())
        assert d1 == pytest.approx(d2, abs=1e-12)


class TestJacobi:
    def test_planted_spectrum_reconstruction(self):
        gen = RngSeed(3, 0).generator()
        for n in (3, 9):
            lam = np.sort(normals(gen, n))
            u = random_unitary(gen, n)
            h = (u * lam[None, :]) @ u.conj().T
            h = 0.5 * (h + h.conj().T)
            ev = eigvalsh_jacobi(h)
            assert np.max(np.abs(ev - lam)) < 1e-10

    def test_degenerate_and_diagonal(self):
        assert np.allclose(eigvalsh_jacobi(np.diag([3.0, 1.0, 2.0]).astype(complex)),
                           [1.0, 2.0, 3.0], atol=1e-15)
        assert np.allclose(eigvalsh_jacobi(np.eye(9, dtype=complex)), 1.0, atol=1e-15)

    def test_nonconvergence_raises(self):
        gen = RngSeed(3, 1).generator()
        g = normals(gen, 162)
        h = (g[:81] + 1j * g[81:]).reshape(9, 9)
        h = h + h.conj().T
        with pytest.raises(EigFail):
            eigvalsh_jacobi(h, max_sweeps=0)


class TestEnsembles:
    def test_rejects_single_member(self, xR):
        with pytest.raises(ValueError):
            make_ensemble(xR, 1, 5e-3, RngSeed(0, 0))

    def test_same_seed_identical(self, xR):
        a = make_ensemble(xR, 64, 5e-3, RngSeed(4, 4))
        b = make_ensemble(xR, 64, 5e-3, RngSeed(4, 4))
        assert np.array_equal(a.members, b.members)

    def test_realized_spread_band(self, xC):
        from spinchaos.dynamics import phase_coords_of
        from spinchaos.lyapunov import metric_displacement
        ens = make_ensemble(xC, 128 * 128, 5e-3, RngSeed(4, 5))
        cc, _ = phase_coords_of(xC.amplitudes[None, :])
        mc, _ = phase_coords_of(ens.members)
        d = np.linalg.norm(metric_displacement(cc, mc), axis=1).mean()
        assert 0.8 * 5e-3 < d < 1.2 * 5e-3


class TestRandomizationRun:
    def test_initial_distance_near_single_state_value(self, params, xR):
        res = randomization_run(xR, params, DriveSpec.none(), 256, 5e-3, RngSeed(5, 0),
                                t_f=0.05, sample_every=0.05)
        assert 0.8 <= res.delta2[0] <= 5.0 / 6.0 + 1e-6

    def test_deterministic(self, params, xR):
        drive = DriveSpec.axis("z", 2.2, 60.0)
        r1 = randomization_run(xR, params, drive, 64, 5e-3, RngSeed(5, 1),
                               t_f=0.2, sample_every=0.05)
        r2 = randomization_run(xR, params, drive, 64, 5e-3, RngSeed(5, 1),
                               t_f=0.2, sample_every=0.05)
        assert np.array_equal(r1.delta2, r2.delta2)
        assert r1.R == r2.R and r1.tau_r == r2.tau_r

    def test_tau_r_infinite_when_floor_unreachable(self, params, xR):
        res = randomization_run(xR, params, DriveSpec.none(), 256, 5e-3, RngSeed(5, 2),
                                t_f=0.1, sample_every=0.05)
        assert math.isinf(res.tau_r)
        assert res.R == res.floor / res.delta2[-1]

    def test_floor_value(self, params, xR):
        res = randomization_run(xR, params, DriveSpec.none(), 1024, 5e-3, RngSeed(5, 3),
                                t_f=0.05, sample_every=0.05)
        assert res.floor == pytest.approx(1.0 / 32.0, abs=1e-15)

    def test_thread_count_invariance(self, params, xR):
        # member evolution is disjoint and the moment reduction is serial,
        # so the trace-distance series is bit-identical at any thread count
        import spinchaos
        drive = DriveSpec.axis("z", 2.2, 60.0)
        spinchaos.set_threads(1)
        r1 = randomization_run(xR, params, drive, 64, 5e-3, RngSeed(5, 4),
                               t_f=0.2, sample_every=0.05)
        spinchaos.set_threads(2)
        r2 = randomization_run(xR, params, drive, 64, 5e-3, RngSeed(5, 4),
                               t_f=0.2, sample_every=0.05)
        spinchaos.set_threads()
        assert np.array_equal(r1.delta2, r2.delta2)
