import math

import numpy as np
import pytest
from scipy import special

from spinchaos.dynamics import DriveSpec, evolve, phase_coords_of
from spinchaos.rotating_frame import (OutOfRange, RotatingFrameSpec,
                                      bessel_j, bessel_jn_array, effective_rabi,
                                      evolve_rotating, j1_zeros, jacobi_anger_cos,
                                      jacobi_anger_sin, predict_dips,
                                      rotating_frame_field, truncation_bound)


class TestBessel:
    def test_at_zero(self):
        assert bessel_j(0, 0.0) == 1.0
        assert bessel_j(1, 0.0) == 0.0
        assert bessel_j(7, 0.0) == 0.0

    def test_against_scipy_grid(self):
        # contract window: n <= 30, 0 <= x <= 50, absolute accuracy 1e-12
        xs = np.concatenate([np.linspace(0.01, 11.9, 40), np.linspace(12.0, 50.0, 60)])
        for n in (0, 1, 2, 5, 13, 30):
            for x in xs:
                assert bessel_j(n, float(x)) == pytest.approx(
                    float(special.jv(n, x)), abs=1e-12)

    def test_first_j1_zero_independent_bisection(self):
        # oracle: bisection on mpmath's arbitrary-precision series
        import mpmath
        lo, hi = mpmath.mpf(3), mpmath.mpf(5)
        for _ in range(80):
            mid = (lo + hi) / 2
            if mpmath.besselj(1, lo) * mpmath.besselj(1, mid) <= 0:
                hi = mid
            else:
                lo = mid
        root = float((lo + hi) / 2)
        assert j1_zeros(1)[0] == pytest.approx(root, abs=1e-9)
        assert abs(bessel_j(1, 3.8317)) < 1e-4

    def test_normalization_identity(self):
        # J0(x)^2 + 2 sum_{n>=1} J_n(x)^2 = 1
        orders = bessel_jn_array(60, 5.0)
        total = orders[0] ** 2 + 2.0 * (orders[1:] ** 2).sum()
        assert total == pytest.approx(1.0, abs=1e-10)

    def test_out_of_range(self):
        with pytest.raises(OutOfRange):
            bessel_j(-1, 1.0)
        with pytest.raises(OutOfRange):
            bessel_j(500, 1.0)
        with pytest.raises(OutOfRange):
            bessel_j(0, -1.0)
        with pytest.raises(OutOfRange):
            bessel_j(0, 1e6)


class TestEffectiveRabi:
    def test_no_drive_identity(self):
        assert effective_rabi(22.5, RotatingFrameSpec(0.0)) == 22.5

    def test_first_j0_zero_kills_static_field(self):
        root = float(special.jn_zeros(0, 1)[0])  # 2.404825...
        assert abs(effective_rabi(22.5, RotatingFrameSpec(root))) < 1e-9

    def test_value_at_7_05(self):
        val = effective_rabi(22.5, RotatingFrameSpec(7.05))
        assert val == pytest.approx(22.5 * float(special.jv(0, 7.05)), abs=1e-10)
        assert val == pytest.approx(6.75, abs=0.05)


class TestPredictDips:
    def test_reference_values(self, params):
        dips = predict_dips(params, 60.0, 4)
        assert np.allclose(dips, [5.11, 9.35, 13.56, 17.76], atol=0.01)
        # the reference dip locations 9.4 and 17.8 are matched within 1%
        assert abs(dips[1] - 9.4) / 9.4 < 0.01
        assert abs(dips[3] - 17.8) / 17.8 < 0.01

    def test_empty_and_scaling(self, params):
        assert len(predict_dips(params, 60.0, 0)) == 0
        d60 = predict_dips(params, 60.0, 3)
        d120 = predict_dips(params, 120.0, 3)
        assert np.allclose(d120, 2.0 * d60, rtol=1e-12)

    def test_strictly_increasing(self, params):
        d = predict_dips(params, 60.0, 8)
        assert np.all(np.diff(d) > 0)


class TestJacobiAnger:
    def test_reconstruction_within_1e10(self):
        theta = np.linspace(0.0, 2 * math.pi, 1000)
        for x in (0.5, 3.0, 7.05, 12.0, 20.0):
            c = jacobi_anger_cos(x, theta, 25)
            s = jacobi_anger_sin(x, theta, 25)
            assert np.max(np.abs(c - np.cos(x * np.cos(theta)))) < 1e-10
            assert np.max(np.abs(s - np.sin(x * np.cos(theta)))) < 1e-10

    def test_default_cutoff_bound_small(self):
        # N_h = 20 keeps the truncation bound below 1e-8 * Omega for D~ <= 15
        for x in (5.0, 10.0, 15.0):
            spec = RotatingFrameSpec(x, 20)
            assert truncation_bound(1.0, spec) < 1e-8


class TestRotatingField:
    def test_zero_drive_reduces_to_static(self, params, xC):
        spec = RotatingFrameSpec(0.0)
        from spinchaos.dynamics import effective_field
        m_rot = rotating_frame_field(xC, params, spec, 2 * math.pi * 60, 0.37)
        m_lab = effective_field(xC, params, DriveSpec.none(), 0.37)
        assert np.allclose(m_rot, m_lab, atol=1e-12)

    def test_series_matches_closed_form(self, params, xC):
        spec = RotatingFrameSpec(7.05, 20)
        omm = 2 * math.pi * 60
        period = 1.0 / 60.0
        worst = 0.0
        for t in np.linspace(0.0, period, 64):
            a = rotating_frame_field(xC, params, spec, omm, float(t), use_series=False)
            b = rotating_frame_field(xC, params, spec, omm, float(t), use_series=True)
            worst = max(worst, float(np.max(np.abs(a - b))))
        assert worst < 1e-10 * params.rabi_rad

    def test_frame_equivalence_z_quick(self, params, xC):
        drive = DriveSpec.axis("z", 3.0 * 60 / 45, 60.0)
        dt = 1e-5
        stride = int(round(params.tau_s / dt)) // 4
        t1 = 8 * stride * dt  # 2 tau_s
        lab = evolve(xC, params, drive, 0.0, t1, stride * dt, dt)
        rot = evolve_rotating(xC, params, drive, 0.0, t1, stride * dt, dt)
        cl, _ = phase_coords_of(lab.states)
        cr, _ = phase_coords_of(rot.states)
        assert np.max(np.abs(cl[:, :2] - cr[:, :2])) < 1e-6

    def test_series_path_evolution_consistent(self, params, xC):
        drive = DriveSpec.axis("z", 2.0, 60.0)
        dt = 1e-5
        stride = int(round(0.5 * params.tau_s / dt))
        t1 = 2 * stride * dt
        a = evolve_rotating(xC, params, drive, 0.0, t1, stride * dt, dt, use_series=False)
        b = evolve_rotating(xC, params, drive, 0.0, t1, stride * dt, dt, use_series=True)
        assert np.max(np.abs(a.states - b.states)) < 1e-8
