import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from symreach import certificate as cert
from symreach import euler, sp2
from symreach.errors import DomainError
from symreach.euler import EulerTriple
from symreach.pulse import Pulse
from symreach.sp2 import KX, KZ
from symreach.verify import random_triple

PI = math.pi


class TestXCoords:
    @given(st.lists(st.floats(-100, 100), min_size=4, max_size=4))
    def test_bijective(self, entries):
        X = np.array(entries).reshape(2, 2)
        np.testing.assert_allclose(cert.x_coords(X).matrix(), X, atol=1e-12)

    def test_identity(self):
        assert cert.x_coords(np.eye(2)) == (1.0, 0.0, 0.0, 0.0)


class TestF:
    def test_identity(self):
        assert cert.f_of_matrix(np.eye(2)) == 1.0

    def test_quarter_turn(self):
        assert cert.f_of_matrix([[0, -1], [1, 0]]) == pytest.approx(-1.0)

    def test_drift_only(self, rng):
        for t in rng.uniform(0, 5, 50):
            assert cert.f_of_matrix(sp2.expm(-KX, t)) >= 1.0

    def test_rotations(self):
        for theta in np.linspace(-PI, PI, 721):
            f = cert.f_of_matrix(euler.rotation(theta))
            assert f == pytest.approx(math.cos(2 * theta), abs=1e-14)
            assert f <= 1.0 + 1e-15
            if abs(math.sin(theta)) > 1e-6:
                assert f < 1.0

    def test_rate_formula_against_finite_differences(self, rng):
        h = 1e-6
        for _ in range(1000):
            b = rng.uniform(-1, 1)
            u = rng.uniform(-5, 5)
            X = sp2.expm(cert.normal_form_generator(b, rng.uniform(-5, 5)), rng.uniform(0, 2))
            G = cert.normal_form_generator(b, u)
            fd = (cert.f_of_matrix(sp2.expm(G, h) @ X) - cert.f_of_matrix(sp2.expm(G, -h) @ X)) / (2 * h)
            assert cert.f_rate(X, b) == pytest.approx(fd, rel=1e-5, abs=1e-7)

    @given(st.floats(-0.999, 0.999), st.floats(-50, 50), st.floats(-50, 50))
    def test_rate_non_negative(self, b, p, q):
        X = cert.XCoords(p, q, 0.0, 0.0).matrix()
        assert cert.f_rate(X, b) >= -1e-12 * (p * p + q * q)


class TestG:
    @pytest.mark.parametrize("phi", [0.0, 0.4, PI / 4, 2.0])
    def test_unit_z(self, phi):
        assert cert.g_factor(1.0, phi) == pytest.approx(math.sin(2 * phi), abs=1e-15)
        assert cert.delta(1.0, phi) == pytest.approx(0.0, abs=1e-15)

    def test_value(self):
        assert cert.g_factor(2.0, PI / 4) == pytest.approx(0.25)

    def test_domain(self):
        with pytest.raises(DomainError):
            cert.g_factor(0.5, 0.0)

    @given(st.floats(1 + 1e-6, 100), st.floats(0, PI))
    def test_delta_negative(self, z, phi):
        assert cert.delta(z, phi) < 0


class TestFz:
    def test_identity_limit(self):
        assert cert.fz_of_triple(euler.identity_limit_triple()) == pytest.approx(1.0, abs=1e-15)
        assert cert.f_of_matrix(np.eye(2)) == 1.0

    def test_canonical(self):
        assert cert.fz_of_triple(EulerTriple(0.0, 3.0, 0.0)) == 1.0

    def test_oracle(self, rng):
        for _ in range(20_000):
            e = random_triple(rng)
            assert abs(cert.f_of_matrix(euler.compose(e)) - cert.fz_of_triple(e)) < 1e-10

    def test_compact_form(self, rng):
        for _ in range(2000):
            e = random_triple(rng)
            assert cert.fz_compact(e) == pytest.approx(cert.fz_of_triple(e), abs=1e-9)

    def test_minus_sign_variant_disagrees(self):
        # cos 2(theta - phi) is not equivalent to the direct expansion
        e = EulerTriple(0.3, 1.0, 1.1)
        variant = math.cos(2 * (e.theta - e.phi)) - cert.delta(e.z, e.phi) * math.sin(2 * e.theta)
        assert abs(variant - cert.fz_of_triple(e)) > 0.1


class TestLowerBound:
    def test_values(self):
        assert cert.min_z_for_f(1) == 1.0
        assert cert.min_z_for_f(7) == 2.0

    def test_domain(self):
        with pytest.raises(DomainError):
            cert.min_z_for_f(0.5)

    @pytest.mark.parametrize("d", [1, 2, 3, 7])
    def test_monte_carlo(self, d, rng):
        bound = cert.min_z_for_f(d)
        hits = 0
        for _ in range(20_000):
            e = random_triple(rng, z_max=10.0)
            if cert.fz_of_triple(e) > d:
                hits += 1
                assert e.z > bound - 1e-9
        assert hits > 0

    @pytest.mark.parametrize("z", [1.5, 3.0, 10.0])
    def test_grid_maximum_respects_bound(self, z):
        best = max(
            cert.fz_of_triple(EulerTriple(t, z, p))
            for t in np.linspace(-PI, PI, 181) for p in np.linspace(0, PI, 91)
        )
        assert best > 1.0
        assert z > cert.min_z_for_f(best) - 1e-9


class TestSignCheck:
    def test_positive_region(self):
        e = EulerTriple(-3 * PI / 4 + 0.1, 2.0, 3 * PI / 4)
        assert math.sin(2 * e.theta) > 0
        assert cert.sin2theta_sign_check(e)

    def test_negative_region(self):
        e = EulerTriple(PI / 4 + PI / 2, 2.0, 0.0)
        assert math.sin(2 * e.theta) < 0
        assert cert.fz_of_triple(e) <= cert.fz_of_triple(EulerTriple(e.theta, 1.0, e.phi))
        assert cert.sin2theta_sign_check(e)

    def test_unit_z(self):
        assert cert.sin2theta_sign_check(EulerTriple(0.3, 1.0, 0.2))

    def test_random(self, rng):
        for _ in range(5000):
            assert cert.sin2theta_sign_check(random_triple(rng))


class TestTrajectory:
    def test_drift_only(self):
        f = cert.f_along_trajectory(0.0, Pulse.constant(0.0, 1.0))
        assert f[0] == 1.0
        assert f[-1] == pytest.approx(cert.f_of_matrix(sp2.expm(-KX, 1.0)), rel=1e-12)
        assert f[-1] >= 1.0

    def test_monotone_and_unit_slope(self, rng):
        for _ in range(100):
            b = rng.uniform(-1, 1)
            p = Pulse(rng.uniform(-5, 5, 10), 2.0)
            f = cert.f_along_trajectory(b, p)
            assert f[0] == pytest.approx(1.0, abs=1e-12)
            assert np.min(np.diff(f)) >= -1e-9
            h = 1e-7
            G = cert.normal_form_generator(b, p.values[0])
            slope = (cert.f_of_matrix(sp2.expm(G, h)) - 1.0) / h
            assert slope == pytest.approx(1.0, abs=1e-3)

    def test_sample_count(self):
        times, mats = cert.trajectory_samples(0.2, [0.0, 1.0, -1.0], 1.5, samples_per_slice=7)
        assert len(times) == len(mats) == 22
        assert times[-1] == pytest.approx(1.5)

    def test_z_bound_along_trajectories(self, rng):
        for _ in range(50):
            b = rng.uniform(-1, 1)
            _, mats = cert.trajectory_samples(b, rng.uniform(-5, 5, 10), 2.0, 10)
            for S in mats[1:]:
                f = cert.f_of_matrix(S)
                if f >= 1:
                    assert euler.decompose(S).z >= cert.min_z_for_f(f) - 1e-9

    def test_rejects_b_outside(self):
        with pytest.raises(DomainError):
            cert.f_along_trajectory(1.0, Pulse.constant(0.0, 1.0))

    def test_generator(self):
        np.testing.assert_allclose(cert.normal_form_generator(0.3, 0.0), -KX + 0.3 * KZ)


class TestGrowthBound:
    def test_values(self):
        assert cert.f_lower_bound(0.0, 0.0) == 1.0
        assert cert.f_lower_bound(0.0, 2.0) == pytest.approx(math.e**2)
        assert cert.f_lower_bound(-0.5, 2.0) == pytest.approx(math.e)

    def test_domain(self):
        with pytest.raises(DomainError):
            cert.f_lower_bound(1.0, 1.0)
        with pytest.raises(DomainError):
            cert.f_lower_bound(0.0, -1.0)

    def test_trajectories_respect_bound(self, rng):
        for _ in range(200):
            b = rng.uniform(-1, 1)
            T = rng.uniform(0.1, 4.0)
            times, mats = cert.trajectory_samples(b, rng.uniform(-20, 20, 10), T, 5)
            for t, S in zip(times, mats):
                assert cert.f_of_matrix(S) >= cert.f_lower_bound(b, t) * (1 - 1e-9)

    def test_drift_saturates_for_b_zero(self):
        # the zero-control trajectory at b = 0 is exactly exp(tau)
        for tau in (0.5, 1.0, 3.0):
            assert cert.f_of_matrix(sp2.expm(-KX, tau)) == pytest.approx(math.exp(tau), rel=1e-12)
