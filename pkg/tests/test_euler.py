import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from symreach import euler, sp2
from symreach.errors import NotSymplecticError
from symreach.euler import EulerTriple, RangeOffsets
from symreach.verify import random_symplectic, random_triple

from conftest import COSH1, SINH1

PI = math.pi
BOOST = [[0, -1], [-1, 0]]


class TestDecomposeExamples:
    def test_hyperbolic_boost(self):
        e = euler.decompose(sp2.expm(BOOST, 1.0))
        assert e.theta == pytest.approx(-3 * PI / 4, abs=1e-12)
        assert e.z == pytest.approx(math.e, rel=1e-12)
        assert e.phi == pytest.approx(3 * PI / 4, abs=1e-12)

    def test_identity(self):
        assert euler.decompose(np.eye(2)) == EulerTriple(-PI / 2, 1.0, PI / 2)

    def test_canonical_squeezer(self):
        e = euler.decompose(np.diag([1 / 3, 3]))
        np.testing.assert_allclose(e, (0.0, 3.0, 0.0), atol=1e-14)

    def test_rejects_non_symplectic(self):
        with pytest.raises(NotSymplecticError):
            euler.decompose(2 * np.eye(2))

    @pytest.mark.parametrize("angle", [0.3, -2.0, PI - 1e-3, -PI])
    def test_rotation_uses_phi0(self, angle):
        e = euler.decompose(euler.rotation(angle))
        assert e.z == 1.0 and e.phi == PI / 2
        np.testing.assert_allclose(euler.compose(e), euler.rotation(angle), atol=1e-14)


class TestCompose:
    def test_quarter_turn(self):
        np.testing.assert_allclose(euler.compose(EulerTriple(0, 1, PI / 2)), [[0, -1], [1, 0]], atol=1e-15)

    def test_boost(self):
        np.testing.assert_allclose(
            euler.compose(EulerTriple(-3 * PI / 4, math.e, 3 * PI / 4)),
            [[COSH1, -SINH1], [-SINH1, COSH1]],
            atol=1e-14,
        )

    def test_direct_product(self):
        np.testing.assert_allclose(
            euler.compose(EulerTriple(PI / 4, 2, 0)), euler.rotation(PI / 4) @ np.diag([0.5, 2]), atol=1e-15
        )

    def test_rejects_z_below_one(self):
        with pytest.raises(ValueError):
            euler.compose(EulerTriple(0, 0.5, 0))


class TestIdentityLimit:
    def test_value(self):
        assert euler.identity_limit_triple() == EulerTriple(-3 * PI / 4, 1.0, 3 * PI / 4)

    def test_composes_to_identity(self):
        np.testing.assert_allclose(euler.compose(euler.identity_limit_triple()), np.eye(2), atol=1e-15)

    @pytest.mark.parametrize("n", [10, 100, 1000])
    def test_is_trajectory_limit(self, n):
        e = euler.decompose(sp2.expm(BOOST, 1.0 / n))
        assert e.theta == pytest.approx(-3 * PI / 4, abs=1e-9)
        assert e.phi == pytest.approx(3 * PI / 4, abs=1e-9)

    def test_differs_from_generic_convention(self):
        assert euler.decompose(np.eye(2)) != euler.identity_limit_triple()


class TestProperties:
    def test_round_trip(self, rng):
        for _ in range(10_000):
            e = random_triple(rng)
            if e.z <= 1 + 1e-6:
                continue
            np.testing.assert_allclose(euler.decompose(euler.compose(e)), e, atol=1e-9, rtol=0)

    def test_reconstruction(self, rng):
        for _ in range(10_000):
            S = random_symplectic(rng)
            err = np.linalg.norm(euler.compose(euler.decompose(S)) - S)
            assert err < 1e-10 * np.linalg.norm(S)

    def test_range_containment_with_offsets(self, rng):
        for _ in range(8):
            off = RangeOffsets(*rng.uniform(-PI, PI, 2))
            for _ in range(1250):
                S = random_symplectic(rng)
                e = euler.decompose(S, off)
                assert euler.in_ranges(e, off)
                assert np.linalg.norm(euler.compose(e) - S) < 1e-10 * np.linalg.norm(S)

    def test_z_is_larger_singular_value(self, rng):
        for _ in range(500):
            S = random_symplectic(rng)
            big, small = euler.singular_values(S)
            assert euler.decompose(S).z == pytest.approx(big, rel=1e-10)
            assert big * small == pytest.approx(1.0, rel=1e-10)
            np.testing.assert_allclose(sorted([big, small]), sorted(np.linalg.svd(S)[1]), rtol=1e-10)

    def test_alternative_solutions_leave_ranges(self, rng):
        # every (theta + n pi, phi + m pi) reconstructing S leaves the ranges unless n = m = 0
        for _ in range(500):
            S = random_symplectic(rng)
            e = euler.decompose(S)
            if e.z <= 1 + 1e-6:
                continue
            for n, m in itertools.product(range(-3, 4), repeat=2):
                if n == m == 0:
                    continue
                alt = EulerTriple(e.theta + n * PI, e.z, e.phi + m * PI)
                if np.allclose(euler.compose(alt), S, atol=1e-9 * np.linalg.norm(S)):
                    assert not euler.in_ranges(alt)

    @settings(max_examples=300)
    @given(
        st.floats(-PI + 1e-6, PI - 1e-6),
        st.floats(1 + 1e-6, 100),
        st.floats(1e-6, PI - 1e-6),
    )
    def test_round_trip_hypothesis(self, theta, z, phi):
        # range endpoints are excluded: there a triple and its wrapped twin are equally valid
        e = EulerTriple(theta, z, phi)
        np.testing.assert_allclose(euler.decompose(euler.compose(e)), e, atol=1e-9, rtol=0)

    @settings(max_examples=200)
    @given(
        st.sampled_from([-PI, 0.0, PI / 2]),
        st.floats(1 + 1e-6, 100),
        st.sampled_from([0.0, PI / 2, PI - 1e-15]),
    )
    def test_range_endpoints_reconstruct(self, theta, z, phi):
        S = euler.compose(EulerTriple(theta, z, phi))
        e = euler.decompose(S)
        assert euler.in_ranges(e)
        assert np.linalg.norm(euler.compose(e) - S) < 1e-10 * np.linalg.norm(S)


class TestWrapAngle:
    @pytest.mark.parametrize("a", [-10.0, -PI, 0.0, PI, 7.5])
    def test_half_open(self, a):
        w = euler.wrap_angle(a, -PI, 2 * PI)
        assert -PI <= w < PI
        assert math.isclose(math.cos(w), math.cos(a), abs_tol=1e-12)
