"""Interval arithmetic: enclosure, monotonicity, rendering, linear algebra."""
import math
from decimal import Decimal
from fractions import Fraction

import numpy as np
import pytest

from isolat.interval import (
    Box,
    Interval,
    IntervalDivisionError,
    IntervalMatrix,
    SingularMatrixError,
    eval_hessian_interval,
    eval_interval,
    eval_jacobian_interval,
    format_endpoint,
    inf_norm_mat,
    inf_norm_vec,
    invert,
)
from isolat.poly import Polynomial, PolySystem


def random_interval(rng, scale=10.0):
    a, b = sorted(rng.uniform(-scale, scale, size=2))
    return Interval(float(a), float(b))


def sample(rng, iv):
    t = rng.uniform()
    return iv.lo + t * (iv.hi - iv.lo)


class TestIntervalBasics:
    def test_inverted_endpoints_rejected(self):
        with pytest.raises(ValueError):
            Interval(2.0, 1.0)

    def test_nonfinite_endpoints_rejected(self):
        with pytest.raises(ValueError):
            Interval(0.0, math.inf)
        with pytest.raises(ValueError):
            Interval(math.nan, 1.0)

    def test_point_and_measures(self):
        p = Interval.point(3.0)
        assert p.is_point and p.mid == 3.0 and p.rad == 0.0 and p.width == 0.0
        iv = Interval(-2.0, 6.0)
        assert iv.mid == 2.0 and iv.rad == 4.0 and iv.width == 8.0
        assert iv.mag == 6.0
        assert iv.contains(0.0) and iv.contains_zero()
        assert not Interval(1.0, 2.0).contains_zero()

    def test_midrad_encloses(self):
        iv = Interval.midrad(0.1, 0.3)
        assert iv.lo <= 0.1 - 0.3 and iv.hi >= 0.1 + 0.3
        with pytest.raises(ValueError):
            Interval.midrad(0.0, -1.0)

    def test_rad_outer_covers_both_sides(self):
        rng = np.random.default_rng(7)
        for _ in range(500):
            iv = random_interval(rng)
            r = iv.rad_outer
            assert iv.mid - r <= iv.lo and iv.mid + r >= iv.hi

    def test_lattice_predicates(self):
        a = Interval(0.0, 1.0)
        b = Interval(0.5, 2.0)
        assert a.intersect(b) == Interval(0.5, 1.0)
        assert a.intersect(Interval(2.0, 3.0)) is None
        assert Interval(0.25, 0.75).is_interior_of(a)
        assert a.is_subset(a) and not a.is_interior_of(a)


class TestEnclosure:
    """Every pointwise result of an operation lies in the interval result.

    This is the load-bearing property of the whole verifier; it is checked
    on ten thousand random operand/sample combinations.
    """

    def test_arithmetic_enclosure_random(self):
        rng = np.random.default_rng(20240811)
        checked = 0
        while checked < 10_000:
            x_iv = random_interval(rng)
            y_iv = random_interval(rng)
            x = sample(rng, x_iv)
            y = sample(rng, y_iv)
            cases = [
                (x + y, x_iv + y_iv),
                (x - y, x_iv - y_iv),
                (x * y, x_iv * y_iv),
                (-x, -x_iv),
                (2.7 * x, x_iv.scale(2.7)),
                (-0.3 * x, x_iv.scale(-0.3)),
            ]
            if not y_iv.contains_zero():
                cases.append((x / y, x_iv / y_iv))
            k = int(rng.integers(0, 7))
            cases.append((x**k, x_iv.pow_int(k)))
            for value, enclosure in cases:
                assert enclosure.contains(value), (value, enclosure)
                checked += 1

    def test_inclusion_monotonicity_random(self):
        rng = np.random.default_rng(99)
        for _ in range(2000):
            outer_x = random_interval(rng)
            outer_y = random_interval(rng)
            inner_x = Interval(sample(rng, outer_x), outer_x.hi)
            inner_y = Interval(outer_y.lo, sample(rng, outer_y))
            assert (inner_x + inner_y).is_subset(outer_x + outer_y)
            assert (inner_x - inner_y).is_subset(outer_x - outer_y)
            assert (inner_x * inner_y).is_subset(outer_x * outer_y)
            k = int(rng.integers(0, 6))
            assert inner_x.pow_int(k).is_subset(outer_x.pow_int(k))
            if not outer_y.contains_zero():
                assert (inner_x / inner_y).is_subset(outer_x / outer_y)

    def test_outward_rounding_strict(self):
        # 0.1 + 0.2 is not representable; the sum interval must straddle it
        s = Interval.point(0.1) + Interval.point(0.2)
        exact = Fraction(0.1) + Fraction(0.2)
        assert Fraction(s.lo) <= exact <= Fraction(s.hi)
        assert s.lo < s.hi

    def test_pow_even_sharpening(self):
        sq = Interval(-2.0, 1.0).pow_int(2)
        assert sq.lo == 0.0 and sq.hi >= 4.0
        # naive product would give lo = -2.0
        assert Interval(-3.0, -1.0).pow_int(2).lo >= 1.0 - 1e-14

    def test_pow_odd_keeps_sign(self):
        cube = Interval(-2.0, -1.0).pow_int(3)
        assert cube.hi <= -1.0 + 1e-14 and cube.lo <= -8.0 <= cube.hi + 8.0

    def test_pow_edge_exponents(self):
        iv = Interval(-1.5, 2.5)
        assert iv.pow_int(0) == Interval(1.0, 1.0)
        assert iv.pow_int(1) == iv
        with pytest.raises(ValueError):
            iv.pow_int(-1)

    def test_division_by_zero_interval(self):
        with pytest.raises(IntervalDivisionError):
            Interval(1.0, 2.0) / Interval(-1.0, 1.0)
        with pytest.raises(IntervalDivisionError):
            Interval(1.0, 2.0) / Interval.point(0.0)


class TestFormatEndpoint:
    def test_reparse_bit_exact(self):
        rng = np.random.default_rng(5)
        values = [float(v) for v in rng.uniform(-1e6, 1e6, size=400)]
        values += [float(v) for v in rng.standard_normal(400) * 1e-12]
        values += [0.5, -0.5, 1e300, -1e-300, 3.0, math.pi]
        for v in values:
            for direction in ("down", "up"):
                text = format_endpoint(v, direction)
                assert float(text) == v

    def test_directed_decimal(self):
        rng = np.random.default_rng(6)
        for v in (float(x) for x in rng.uniform(-1e3, 1e3, size=300)):
            assert Decimal(format_endpoint(v, "down")) <= Decimal(v)
            assert Decimal(format_endpoint(v, "up")) >= Decimal(v)


class TestBox:
    def test_construction_and_access(self):
        box = Box.midrad([1.0, -2.0], 0.5)
        assert len(box) == 2
        assert box[0].contains(1.0) and box[1].contains(-2.0)
        assert box.contains_point([1.2, -2.4])
        assert not box.contains_point([2.0, -2.0])

    def test_intersect_and_subset(self):
        a = Box.midrad([0.0, 0.0], 1.0)
        b = Box.midrad([0.5, 0.5], 1.0)
        inter = a.intersect(b)
        assert inter is not None
        assert inter.is_subset(a) and inter.is_subset(b)
        assert a.intersect(Box.midrad([5.0, 5.0], 1.0)) is None
        assert Box.midrad([0.0, 0.0], 0.5).is_interior_of(a)

    def test_inflate_grows_every_component(self):
        box = Box(
            (
                Interval(1.0, 2.0),
                Interval.point(3.0),
            )
        )
        grown = box.inflate(0.1)
        for before, after in zip(box, grown):
            assert after.lo < before.lo and after.hi > before.hi

    def test_from_point_round_trip(self):
        box = Box.from_point([0.1, -0.2, 3.0])
        assert all(c.is_point for c in box)
        assert np.allclose(box.mid(), [0.1, -0.2, 3.0])


class TestPolynomialEnclosure:
    def _random_poly(self, rng, nvars):
        coeffs = {}
        for _ in range(int(rng.integers(1, 6))):
            exps = tuple(int(e) for e in rng.integers(0, 4, size=nvars))
            coeffs[exps] = float(rng.uniform(-5, 5))
        poly = Polynomial.from_dict(nvars, coeffs)
        return poly if poly.terms else Polynomial.constant(nvars, 1.0)

    def test_eval_interval_encloses_point_values(self):
        rng = np.random.default_rng(11)
        for _ in range(400):
            nvars = int(rng.integers(1, 4))
            poly = self._random_poly(rng, nvars)
            box = Box(tuple(random_interval(rng, scale=2.0) for _ in range(nvars)))
            for _ in range(5):
                point = [sample(rng, c) for c in box]
                value = poly.eval_real(point)
                assert eval_interval(poly, box).contains(value)

    def test_eval_interval_monotone(self):
        rng = np.random.default_rng(12)
        for _ in range(300):
            nvars = int(rng.integers(1, 4))
            poly = self._random_poly(rng, nvars)
            outer = Box(tuple(random_interval(rng, scale=2.0) for _ in range(nvars)))
            inner = Box(
                tuple(
                    Interval(sample(rng, c), c.hi) for c in outer
                )
            )
            assert eval_interval(poly, inner).is_subset(eval_interval(poly, outer))

    def test_dimension_mismatch(self):
        poly = Polynomial.from_dict(2, {(1, 0): 1.0})
        with pytest.raises(ValueError):
            eval_interval(poly, Box.midrad([0.0], 1.0))

    def test_jacobian_hessian_enclosure(self):
        rng = np.random.default_rng(13)
        system = PolySystem.from_polys(
            [
                Polynomial.from_dict(2, {(2, 1): 1.0, (0, 0): -2.0}),
                Polynomial.from_dict(2, {(1, 1): 3.0, (0, 2): -1.0}),
            ],
            ["x", "y"],
        )
        box = Box.midrad([0.3, -0.7], 0.4)
        jac_iv = eval_jacobian_interval(system, box)
        hess_iv = eval_hessian_interval(system, 0, box)
        assert jac_iv.shape == (2, 2) and hess_iv.shape == (2, 2)
        for _ in range(50):
            point = [sample(rng, c) for c in box]
            jac = system.eval_jacobian(point)
            for i in range(2):
                for j in range(2):
                    assert jac_iv[i][j].contains(jac[i][j])
                    hand = system.hessians[0][i][j].eval_real(point)
                    assert hess_iv[i][j].contains(hand)


class TestLinearAlgebra:
    def test_norms(self):
        assert inf_norm_vec([1.0, -3.0, 2.0]) == 3.0
        assert inf_norm_vec([]) == 0.0
        assert inf_norm_mat([[1.0, -2.0], [3.0, 0.5]]) == 3.5

    def test_invert_hand_case(self):
        m = np.array([[4.0, 7.0], [2.0, 6.0]])
        expected = np.array([[0.6, -0.7], [-0.2, 0.4]])
        assert np.allclose(invert(m), expected, atol=1e-14)

    def test_invert_random_residual(self):
        rng = np.random.default_rng(21)
        for _ in range(100):
            n = int(rng.integers(1, 6))
            m = rng.standard_normal((n, n)) + n * np.eye(n)
            residual = invert(m) @ m - np.eye(n)
            assert float(np.max(np.abs(residual))) < 1e-10

    def test_invert_singular(self):
        with pytest.raises(SingularMatrixError):
            invert(np.array([[1.0, 2.0], [2.0, 4.0]]))
        with pytest.raises(SingularMatrixError):
            invert(np.zeros((3, 3)))

    def test_invert_shape_check(self):
        with pytest.raises(ValueError):
            invert(np.ones((2, 3)))

    def test_interval_matrix_measures(self):
        m = IntervalMatrix.from_rows(
            [
                [Interval(-1.0, 2.0), Interval.point(0.5)],
                [Interval(0.0, 1.0), Interval(-4.0, -3.0)],
            ]
        )
        assert m.mid_matrix()[1][1] == pytest.approx(-3.5)
        assert m.mag_inf_norm() == 5.0
