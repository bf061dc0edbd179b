import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gmpc.crypto import field, poly
from gmpc.crypto.field import P

elements = st.integers(min_value=0, max_value=P - 1)


class TestScalarField:
    """Scalar arithmetic agrees with Python big-int arithmetic."""

    @given(elements, elements)
    def test_ring_laws(self, a, b):
        assert field.add(a, b) == (a + b) % P
        assert field.sub(field.add(a, b), b) == a
        assert field.mul(a, b) == a * b % P

    @given(st.integers(min_value=1, max_value=P - 1))
    def test_inverse(self, a):
        assert field.mul(a, field.inv(a)) == 1

    def test_zero_has_no_inverse(self):
        with pytest.raises(ZeroDivisionError):
            field.inv(0)

    @given(elements)
    def test_byte_roundtrip(self, a):
        encoded = field.to_bytes(a)
        assert len(encoded) == 8
        assert field.from_bytes(encoded) == a

    def test_unreduced_encoding_rejected(self):
        with pytest.raises(ValueError):
            field.from_bytes(P.to_bytes(8, "little"))

    @given(st.binary(max_size=50))
    def test_pack_roundtrip(self, data):
        limbs = field.pack_bytes(data)
        assert all(0 <= x < P for x in limbs)
        assert field.unpack_bytes(limbs, len(data)) == data


class TestVectorField:
    """numpy Mersenne reduction matches the scalar reference."""

    @settings(max_examples=50)
    @given(st.lists(st.tuples(elements, elements), min_size=1, max_size=40))
    def test_vmul_matches_scalar(self, pairs):
        a = np.array([x for x, _ in pairs], dtype=np.uint64)
        b = np.array([y for _, y in pairs], dtype=np.uint64)
        assert [int(v) for v in field.vmul(a, b)] == [x * y % P for x, y in pairs]

    def test_vmul_extremes(self):
        edge = np.array([0, 1, P - 1, P - 2, 1 << 60, (1 << 32) - 1, 1 << 32], dtype=np.uint64)
        a, b = np.meshgrid(edge, edge)
        got = field.vmul(a, b)
        for x, y, z in zip(a.ravel(), b.ravel(), got.ravel()):
            assert int(z) == int(x) * int(y) % P

    @settings(max_examples=30)
    @given(st.lists(elements, min_size=0, max_size=70))
    def test_vsum(self, values):
        assert int(field.vsum(np.array(values, dtype=np.uint64))) == sum(values) % P

    def test_vadd_vsub(self, rng):
        a = field.random_vector(rng, 500)
        b = field.random_vector(rng, 500)
        assert [int(v) for v in field.vadd(a, b)] == [(int(x) + int(y)) % P for x, y in zip(a, b)]
        assert [int(v) for v in field.vsub(a, b)] == [(int(x) - int(y)) % P for x, y in zip(a, b)]

    def test_vmatmul(self, rng):
        a = field.random_vector(rng, (6, 9))
        b = field.random_vector(rng, (9, 4))
        got = field.vmatmul(a, b)
        for i in range(6):
            for j in range(4):
                assert int(got[i, j]) == sum(int(a[i, k]) * int(b[k, j]) for k in range(9)) % P


class TestPolynomials:
    """Interpolation and Berlekamp-Welch decoding."""

    @settings(max_examples=30)
    @given(st.lists(elements, min_size=1, max_size=6), st.integers(min_value=0, max_value=4))
    def test_interpolation_recovers_polynomial(self, coeffs, extra):
        xs = list(range(1, len(coeffs) + extra + 1))
        points = [(x, poly.poly_eval(coeffs, x)) for x in xs]
        recovered = poly.interpolate(points)
        assert recovered[: len(coeffs)] == coeffs
        assert all(c == 0 for c in recovered[len(coeffs):])
        assert poly.interpolate_at(points, 0) == coeffs[0]

    def test_duplicate_points_rejected(self):
        with pytest.raises(ValueError):
            poly.interpolate_at([(1, 2), (1, 3)])

    def test_berlekamp_welch_corrects_errors(self, rng):
        coeffs = [field.random_element(rng) for _ in range(3)]
        points = [(x, poly.poly_eval(coeffs, x)) for x in range(1, 10)]
        points[2] = (points[2][0], points[2][1] + 1)
        points[7] = (points[7][0], 12345)
        points[5] = (points[5][0], 0)
        assert poly.berlekamp_welch(points, 2) == coeffs

    def test_berlekamp_welch_gives_up_beyond_radius(self):
        # 5 points of degree 0 with 3 disagreeing values cannot be corrected
        points = [(1, 7), (2, 7), (3, 1), (4, 2), (5, 3)]
        assert poly.berlekamp_welch(points, 0, 2) is None

    def test_parity_check_detects_inconsistency(self, rng):
        xs = tuple(range(1, 11))
        coeffs = [field.random_element(rng) for _ in range(4)]
        ys = np.array([poly.poly_eval(coeffs, x) for x in xs], dtype=np.uint64)
        check = poly.parity_check(xs, 3)
        assert check.shape == (6, 10)
        assert not field.vsum(field.vmul(check, ys[None, :]), axis=1).any()
        ys[4] = field.vadd(ys[4], np.uint64(1))
        assert field.vsum(field.vmul(check, ys[None, :]), axis=1).any()
