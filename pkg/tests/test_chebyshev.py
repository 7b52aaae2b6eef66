"""
Unit tests for the Chebyshev bridge
"""

import unittest
from fractions import Fraction
import sys
import os

from hypothesis import given, settings, strategies as st

# Add src directory to path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'src'))

from chebyshev import (
    ChebKind,
    cheb_poly,
    compare_polys,
    compose_shift,
    pell_unit_residual,
    sine_quotient_check,
    u_endpoint,
    verify_t_identity,
    verify_u_identity,
)
from polycore import BigReal, ExactPoly, MapParams, build_poly, working_context
from utils.validators import DomainError, SizeLimitError


A_GRID = [Fraction(1, 2), Fraction(1), Fraction(3, 2), Fraction(2)]


class TestChebPoly(unittest.TestCase):

    def test_seeds(self):
        self.assertEqual(cheb_poly(ChebKind.FIRST, 0).coeffs, (1,))
        self.assertEqual(cheb_poly(ChebKind.FIRST, 1).coeffs, (0, 1))
        self.assertEqual(cheb_poly(ChebKind.FIRST, 2).coeffs, (-1, 0, 2))
        self.assertEqual(cheb_poly(ChebKind.SECOND, 0).coeffs, (1,))
        self.assertEqual(cheb_poly(ChebKind.SECOND, 1).coeffs, (0, 2))

    def test_recurrence(self):
        two_x = ExactPoly((0, 2))
        for kind in ChebKind:
            for n in range(2, 65):
                expected = two_x * cheb_poly(kind, n - 1) - cheb_poly(kind, n - 2)
                self.assertEqual(cheb_poly(kind, n).coeffs, expected.coeffs, f"{kind} n={n}")
                self.assertTrue(cheb_poly(kind, n).is_integral())

    def test_cap(self):
        with self.assertRaises(SizeLimitError):
            cheb_poly(ChebKind.FIRST, 33, max_n=5)

    def test_u_endpoints(self):
        self.assertEqual(u_endpoint(0), (1, 1))
        self.assertEqual(u_endpoint(3), (4, -4))
        self.assertEqual(u_endpoint(7), (8, -8))
        for n in range(0, 30):
            self.assertEqual(u_endpoint(n), (n + 1, (-1) ** n * (n + 1)))


class TestComposeShift(unittest.TestCase):

    def test_identity_composition(self):
        shifted = compose_shift(ExactPoly.x(), MapParams.lucas())
        self.assertEqual(shifted.coeffs, (-1, 0, Fraction(1, 2)))

    def test_t2_gives_l2(self):
        shifted = compose_shift(cheb_poly(ChebKind.FIRST, 2), MapParams.lucas())
        self.assertEqual(shifted.scale(2).coeffs, (2, 0, -4, 0, 1))

    def test_cap_applies_to_input_degree(self):
        params = MapParams.lucas()
        shifted = compose_shift(cheb_poly(ChebKind.SECOND, 7), params, max_n=3)
        self.assertEqual(shifted.degree, 14)
        with self.assertRaises(SizeLimitError):
            compose_shift(cheb_poly(ChebKind.SECOND, 9), params, max_n=3)

    def test_general_family_level_one(self):
        params = MapParams.general(1)
        shifted = compose_shift(cheb_poly(ChebKind.FIRST, 1), params)
        self.assertEqual(shifted.scale(params.constant).coeffs, (-1, 0, 2))


class TestIdentities(unittest.TestCase):

    def test_t_identity_lucas(self):
        for n in range(1, 11):
            report = verify_t_identity(MapParams.lucas(), n)
            self.assertTrue(report.holds, report.describe())

    def test_t_identity_grid(self):
        for a in A_GRID:
            for n in range(1, 9):
                self.assertTrue(verify_t_identity(MapParams.general(a), n))

    def test_u_identity_grid(self):
        self.assertTrue(verify_u_identity(MapParams.lucas(), 1))
        for a in A_GRID:
            for n in range(1, 9):
                report = verify_u_identity(MapParams.general(a), n)
                self.assertTrue(report.holds, report.describe())

    def test_negative_control(self):
        """Perturbing one coefficient of L_3 is reported at that index"""
        L = MapParams.lucas()
        coeffs = list(build_poly(L, 3).coeffs)
        coeffs[4] += 1
        with self.assertLogs('chebyshev', level='WARNING'):
            report = verify_t_identity(L, 3, candidate=ExactPoly(tuple(coeffs)))
        self.assertFalse(report.holds)
        self.assertEqual(report.first_mismatch, 4)
        self.assertIn('FAILED', report.describe())

    def test_u_negative_control(self):
        with self.assertLogs('chebyshev', level='WARNING'):
            report = verify_u_identity(MapParams.lucas(), 2, candidate=build_poly(MapParams.lucas(), 2))
        self.assertFalse(report)

    def test_compare_polys_degree_mismatch(self):
        report = compare_polys(ExactPoly((1, 2)), ExactPoly((1, 2, 3)))
        self.assertFalse(report.holds)
        self.assertEqual(report.first_mismatch, 2)
        self.assertEqual((report.lhs_degree, report.rhs_degree), (1, 2))


class TestNumericChecks(unittest.TestCase):

    def test_sine_quotient_pi_over_six(self):
        ctx = working_context(128)
        theta = BigReal(ctx.pi / 6, 128)
        self.assertLess(sine_quotient_check(1, theta, 128).value, 2.0 ** -100)

    def test_sine_quotient_generic(self):
        theta = BigReal.from_value('0.3', 128)
        self.assertLess(sine_quotient_check(3, theta, 128).value, 2.0 ** -80)
        for n in range(1, 9):
            self.assertLess(sine_quotient_check(n, theta, 128).value, 2.0 ** -(128 - 8 * n - 32))

    def test_sine_quotient_quarter_pi(self):
        ctx = working_context(128)
        theta = BigReal(ctx.pi / 4, 128)
        for n in (1, 4, 8):
            self.assertLess(sine_quotient_check(n, theta, 128).value, 2.0 ** -(128 - 8 * n - 32))

    def test_sine_quotient_singular(self):
        with self.assertRaises(DomainError):
            sine_quotient_check(2, BigReal.from_value(0, 128), 128)

    @given(st.fractions(min_value=1, max_value=10, max_denominator=1000))
    @settings(max_examples=50, deadline=None)
    def test_pell_unit(self, t):
        residual = pell_unit_residual(BigReal.from_value(t, 128))
        self.assertLess(residual.value, 2.0 ** -110)

    def test_pell_unit_domain(self):
        with self.assertRaises(DomainError):
            pell_unit_residual(BigReal.from_value('1/2', 128))


if __name__ == '__main__':
    unittest.main()
