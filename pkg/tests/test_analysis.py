"""
Unit tests for local analysis, quadrature, asymptotics and pi
"""

import unittest
from fractions import Fraction
import sys
import os

import numpy as np
from hypothesis import given, settings, strategies as st

# Add src directory to path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'src'))

from analysis import (
    QuadratureSpec,
    asymptotic_ratio,
    cosine_compare_samples,
    cosine_form,
    curvature_at_max,
    expected_taylor,
    local_cosine_samples,
    local_k,
    orthogonality_integral,
    orthogonality_matrix,
    pi_approx,
    pi_table,
    quartic_constant,
    taylor_at_zero,
    theta_arctan,
    theta_of_x,
)
from polycore import BigReal, MapParams, eval_map, eval_map_derivatives, working_context
from radicals import critical_points
from utils.validators import DomainError, PreconditionError


A_GRID = [Fraction(1, 2), Fraction(1), Fraction(3, 2), Fraction(2)]


class TestTaylor(unittest.TestCase):

    def test_known_levels(self):
        L = MapParams.lucas()
        self.assertEqual(taylor_at_zero(L, 2), (2, 0, -4))
        self.assertEqual(taylor_at_zero(L, 3), (2, 0, -16))
        self.assertEqual(taylor_at_zero(MapParams.general(1), 2), (1, 0, -8))

    def test_closed_form(self):
        L = MapParams.lucas()
        for n in range(2, 13):
            self.assertEqual(taylor_at_zero(L, n), (2, 0, -4 ** (n - 1)))
        for a in A_GRID:
            params = MapParams.general(a)
            for n in range(2, 9):
                self.assertEqual(taylor_at_zero(params, n), expected_taylor(params, n))


class TestCurvature(unittest.TestCase):

    def test_examples(self):
        self.assertEqual(float(curvature_at_max(2, BigReal.from_value(0, 128))), -8.0)
        self.assertEqual(float(curvature_at_max(3, BigReal.from_value(0, 128))), -32.0)
        ctx = working_context(128)
        value = curvature_at_max(3, BigReal(ctx.sqrt(2), 128))
        self.assertLess(abs(value.value + 64), 2.0 ** -100)

    def test_matches_second_derivative_at_every_maximum(self):
        L = MapParams.lucas()
        for n in range(2, 9):
            for c in critical_points(n).maxima:
                x0 = c.position(192)
                _, _, d2 = eval_map_derivatives(L, n, x0)
                self.assertLess(abs(d2.value - curvature_at_max(n, x0).value), 2.0 ** -64,
                                f"n={n} at {c.location}")

    def test_domain(self):
        with self.assertRaises(DomainError):
            curvature_at_max(3, BigReal.from_value(2, 128))


class TestLocalModel(unittest.TestCase):

    def test_k_values(self):
        self.assertEqual(float(local_k(BigReal.from_value(0, 128)).k), 1.0)
        ctx = working_context(128)
        k = local_k(BigReal(ctx.sqrt(2), 128)).k
        self.assertLess(abs(k.value - ctx.sqrt(2)), 2.0 ** -100)
        self.assertGreater(float(local_k(BigReal.from_value('1.999', 128)).k), 20)

    def test_k_increasing_on_positive_maxima(self):
        for n in range(3, 9):
            maxima = sorted(c.position(128).value for c in critical_points(n).maxima)
            ks = [local_k(BigReal(x, 128)).k.value for x in maxima if x >= 0]
            self.assertEqual(ks[0], 1)
            self.assertTrue(all(a < b for a, b in zip(ks, ks[1:])))
            self.assertTrue(all(k >= 1 for k in ks))

    def test_domain(self):
        with self.assertRaises(DomainError):
            local_k(BigReal.from_value(-2, 128))

    def test_curvature_of_model_matches(self):
        """Second difference of the model at x0 equals the curvature formula"""
        ctx = working_context(128)
        x0 = BigReal(ctx.sqrt(2), 128)
        model = local_k(x0, n=3)
        h = ctx.mpf(2) ** -20
        values = [model.evaluate(BigReal(x0.value + s * h, 128)).value for s in (-1, 0, 1)]
        second = (values[0] - 2 * values[1] + values[2]) / (h * h)
        self.assertLess(abs(second - curvature_at_max(3, x0).value), 1e-4)

    def test_local_samples_third_order(self):
        ctx = working_context(128)
        x0 = BigReal(ctx.sqrt(2), 128)
        rows = local_cosine_samples(3, x0, BigReal.from_value('0.01', 128), 21)
        self.assertEqual(len(rows), 21)
        self.assertLess(rows[10].delta, 1e-30)
        constant = quartic_constant(rows, 0.01, center=float(x0), order=3)
        self.assertTrue(np.isfinite(constant))
        self.assertLess(constant, 1e4)


class TestTheta(unittest.TestCase):

    def test_examples(self):
        ctx = working_context(128)
        self.assertEqual(float(theta_of_x(BigReal.from_value(2, 128))), 0.0)
        self.assertLess(abs(theta_of_x(BigReal.from_value(0, 128)).value - ctx.pi / 2), 2.0 ** -120)
        theta = theta_of_x(BigReal.from_value(1, 128))
        self.assertLess(abs(theta.value - ctx.pi / 3), 2.0 ** -120)
        self.assertLess(abs(cosine_form(MapParams.lucas(), 2, theta).value + 1), 2.0 ** -110)

    @given(st.fractions(min_value=-2, max_value=2, max_denominator=10 ** 6),
           st.integers(min_value=1, max_value=10))
    @settings(max_examples=300, deadline=None)
    def test_cosine_representation(self, x, n):
        L = MapParams.lucas()
        xb = BigReal.from_value(x, 128)
        direct = eval_map(L, n, xb).value
        represented = cosine_form(L, n, theta_of_x(xb)).value
        self.assertLess(abs(direct - represented), 2.0 ** -(128 - 8 * n - 32))

    def test_general_family(self):
        for a in A_GRID:
            params = MapParams.general(a)
            x = BigReal.from_value(Fraction(1, 3) / a, 128)
            theta = theta_of_x(x, params)
            for n in range(0, 8):
                diff = eval_map(params, n, x).value - cosine_form(params, n, theta).value
                self.assertLess(abs(diff), 2.0 ** -(128 - 8 * n - 32))

    def test_arctan_form(self):
        ctx = working_context(128)
        # t > 0: both forms coincide
        x = BigReal.from_value('1.8', 128)
        self.assertLess(abs(theta_of_x(x).value - theta_arctan(x).value), 2.0 ** -110)
        # t < 0: differ by pi/2, invisible to cos(2^n theta) from n = 2 on
        x = BigReal.from_value('0.9', 128)
        self.assertLess(abs(theta_of_x(x).value - theta_arctan(x).value - ctx.pi / 2), 2.0 ** -110)
        L = MapParams.lucas()
        for n in range(2, 8):
            a = cosine_form(L, n, theta_of_x(x)).value
            b = cosine_form(L, n, theta_arctan(x)).value
            self.assertLess(abs(a - b), 2.0 ** -90)

    def test_domain(self):
        with self.assertRaises(DomainError):
            theta_of_x(BigReal.from_value('2.5', 128))
        with self.assertRaises(DomainError):
            theta_arctan(BigReal(working_context(128).sqrt(2), 128))


class TestOrthogonality(unittest.TestCase):

    def test_examples(self):
        ctx = working_context(128)
        spec = QuadratureSpec(16, 128)
        self.assertLess(abs(orthogonality_integral(1, 2, spec).value), 2.0 ** -88)
        self.assertLess(abs(orthogonality_integral(2, 2, spec).value - ctx.pi / 2), 2.0 ** -88)
        self.assertLess(abs(orthogonality_integral(0, 3, spec).value), 2.0 ** -88)

    def test_insufficient_nodes(self):
        with self.assertRaises(PreconditionError):
            orthogonality_integral(5, 5, QuadratureSpec(16, 128))

    def test_matrix_up_to_level_eight(self):
        matrix = orthogonality_matrix(8, QuadratureSpec.for_levels(8, 8, 128))
        self.assertLess(matrix.max_off_diagonal, 2.0 ** -88)
        self.assertLess(matrix.max_diagonal_deviation, 2.0 ** -88)
        self.assertTrue(matrix.within(2.0 ** -88))
        array = matrix.as_array()
        self.assertEqual(array.shape, (9, 9))
        np.testing.assert_allclose(np.diag(array), np.pi / 2)

    def test_matrix_rejects_small_rule(self):
        with self.assertRaises(PreconditionError):
            orthogonality_matrix(4, QuadratureSpec(8, 128))

    def test_node_count_validation(self):
        with self.assertRaises(DomainError):
            QuadratureSpec(0, 128)


class TestAsymptotics(unittest.TestCase):

    def test_examples(self):
        L = MapParams.lucas()
        self.assertLess(abs(float(asymptotic_ratio(L, 3, BigReal.from_value(100, 128))) - 1), 1e-3)
        self.assertLess(abs(float(asymptotic_ratio(L, 2, BigReal.from_value(10 ** 6, 128))) - 1), 1e-10)
        M = MapParams.general(1)
        self.assertLess(abs(float(asymptotic_ratio(M, 2, BigReal.from_value(1000, 128))) - 1), 1e-4)

    def test_ratio_near_one_at_hundred(self):
        for a in A_GRID:
            params = MapParams.general(a)
            for n in range(1, 5):
                ratio = float(asymptotic_ratio(params, n, BigReal.from_value(-100, 128)))
                self.assertLess(abs(ratio - 1), 1e-3)

    def test_domain(self):
        with self.assertRaises(DomainError):
            asymptotic_ratio(MapParams.lucas(), 2, BigReal.from_value(2, 128))


class TestPi(unittest.TestCase):

    def test_values(self):
        self.assertAlmostEqual(float(pi_approx(1, 128)), 3.0614674589, places=9)
        self.assertAlmostEqual(float(pi_approx(4, 128)), 3.1403311570, places=9)

    def test_matches_sine_form(self):
        ctx = working_context(256)
        for n in range(1, 13):
            expected = ctx.ldexp(ctx.sin(ctx.pi / 2 ** (n + 2)), n + 2)
            self.assertLess(abs(pi_approx(n, 256).value - expected), 2.0 ** -200)

    def test_convergence(self):
        rows = pi_table(3, 12, 256)
        values = [r.value.value for r in rows]
        self.assertTrue(all(a < b for a, b in zip(values, values[1:])))
        for row in rows[1:]:
            self.assertGreaterEqual(row.ratio, 0.2375)
            self.assertLessEqual(row.ratio, 0.2625)
        self.assertIsNone(rows[0].ratio)

    def test_ten_levels_six_digits(self):
        ctx = working_context(256)
        self.assertLess(abs(pi_approx(10, 256).value - ctx.pi), 0.5e-6)

    def test_general_family_same_value(self):
        reference = pi_approx(6, 128).value
        for a in A_GRID:
            value = pi_approx(6, 128, MapParams.general(a)).value
            self.assertLess(abs(value - reference), 2.0 ** -100)


class TestCosineSamples(unittest.TestCase):

    def test_origin_and_point_one(self):
        rows = cosine_compare_samples(2, BigReal.from_value('0.1', 128), 3)
        self.assertEqual([float(r.x) for r in rows], [-0.1, 0.0, 0.1])
        self.assertEqual(rows[1].delta, 0.0)
        self.assertLess(rows[2].delta, 1e-3)

    def test_quartic_bound(self):
        for n in (2, 3, 4):
            rows = cosine_compare_samples(n, BigReal.from_value('0.1', 128), 41)
            constant = quartic_constant(rows, 0.1)
            self.assertTrue(np.isfinite(constant))
            self.assertGreater(constant, 0)
            # Shrinking the window keeps the bound
            inner = cosine_compare_samples(n, BigReal.from_value('0.05', 128), 41)
            self.assertLessEqual(quartic_constant(inner, 0.05), constant * 1.01)

    def test_general_family_model(self):
        params = MapParams.general(2)
        rows = cosine_compare_samples(3, BigReal.from_value('0.01', 128), 5, params)
        for row in rows:
            self.assertLess(row.delta, 1e-5)

    def test_count_validation(self):
        with self.assertRaises(DomainError):
            cosine_compare_samples(2, BigReal.from_value(1, 128), 1)


if __name__ == '__main__':
    unittest.main()
