#!/usr/bin/env python3
"""
Tests for the exact polynomial field layer
"""

import random
import unittest
from fractions import Fraction
from pathlib import Path
import sys

# Add project root to path
project_root = Path(__file__).parent.parent
sys.path.append(str(project_root))

from app.errors import PolyError, StructureError
from app.hamiltonian.polyfield import (
    SKEW,
    Poly,
    PolyMat3,
    PolyVec3,
    compatibility_residuals,
    compile_poly,
    cross,
    curl,
    divergence,
    dot,
    format_poly,
    grad,
    jacobi_residual,
    parse_poly,
    skew_to_vec,
    vec_to_skew,
)


def random_poly(rng: random.Random, names=("x", "y", "z", "a"), terms: int = 4) -> Poly:
    result = Poly.zero()
    for _ in range(terms):
        coeff = Fraction(rng.randint(-5, 5), rng.randint(1, 4))
        monomial = Poly.constant(coeff)
        for name in names:
            monomial = monomial * Poly.symbol(name) ** rng.randint(0, 2)
        result = result + monomial
    return result


def random_vec(rng: random.Random) -> PolyVec3:
    return PolyVec3(random_poly(rng), random_poly(rng), random_poly(rng))


class TestParseAndFormat(unittest.TestCase):
    def test_canonical_display_order(self):
        self.assertEqual(format_poly(parse_poly("-1/2*g*z + 2*z^2")), "2*z^2 - 1/2*g*z")
        self.assertEqual(format_poly(parse_poly("1/2*d*g - g*y")), "-g*y + 1/2*d*g")

    def test_compact_form(self):
        self.assertEqual(format_poly(parse_poly("g - b - a"), spaced=False), "-a-b+g")

    def test_parameter_denominator(self):
        p = parse_poly("(y^2*L*C + x^2)/(L*C)")
        self.assertEqual(format_poly(p), "(C*L*y^2 + x^2)/(C*L)")
        self.assertEqual(p.denominator, {"C": 1, "L": 1})

    def test_zero(self):
        self.assertEqual(format_poly(parse_poly("x - x")), "0")
        self.assertTrue(parse_poly("x*y - y*x").is_zero)

    def test_parse_error_reports_position(self):
        with self.assertRaises(PolyError) as ctx:
            parse_poly("x + * y")
        self.assertEqual(ctx.exception.position, 4)
        self.assertIn("parse error at position 4", str(ctx.exception))

    def test_unexpected_character(self):
        with self.assertRaises(PolyError) as ctx:
            parse_poly("x + $")
        self.assertEqual(ctx.exception.position, 4)

    def test_empty_text(self):
        with self.assertRaises(PolyError):
            parse_poly("   ")

    def test_variable_symbols(self):
        x = Poly.symbol("x")
        self.assertEqual(x, parse_poly("x"))
        self.assertEqual(format_poly(x), "x")
        self.assertEqual(x.symbols, frozenset({"x"}))
        self.assertEqual(format_poly(parse_poly("x*y*z")), "x*y*z")

    def test_coefficient_without_star(self):
        self.assertEqual(parse_poly("2x"), parse_poly("2*x"))
        self.assertEqual(parse_poly("1/2 g*z"), parse_poly("1/2*g*z"))
        self.assertEqual(parse_poly("3x^2 - 1/4 a*y"), parse_poly("3*x^2 - 1/4*a*y"))

    def test_variable_denominator_rejected(self):
        with self.assertRaises(PolyError):
            parse_poly("(x^2 + 1)/y")


class TestArithmetic(unittest.TestCase):
    def test_exact_rational_coefficients(self):
        self.assertEqual(parse_poly("1/3*x") * 3, parse_poly("x"))
        self.assertEqual(parse_poly("1/3*x") + parse_poly("2/3*x"), parse_poly("x"))

    def test_product_expands(self):
        self.assertEqual(parse_poly("x + 1") * parse_poly("x - 1"), parse_poly("x^2 - 1"))

    def test_division_by_parameter_cancels(self):
        self.assertEqual(parse_poly("a*x") / parse_poly("a"), parse_poly("x"))
        self.assertEqual((parse_poly("x") / parse_poly("a")) * parse_poly("a"), parse_poly("x"))

    def test_division_by_variable_rejected(self):
        with self.assertRaises(PolyError):
            parse_poly("x") / parse_poly("y")

    def test_radical_reduces(self):
        self.assertEqual(parse_poly("s^2"), parse_poly("1 - D^2"))
        self.assertEqual(parse_poly("s^3"), parse_poly("s - D^2*s"))

    def test_equality_ignores_factor_order(self):
        a, b = Poly.symbol("a"), Poly.symbol("b")
        self.assertEqual(b * a, a * b)
        self.assertEqual(hash(b * a), hash(a * b))
        self.assertEqual(parse_poly("y*x*k2*a"), parse_poly("a*k2*x*y"))
        self.assertEqual(parse_poly("s^3") - parse_poly("s - D^2*s"), Poly.zero())

    def test_equality_is_canonical(self):
        rng = random.Random(11)
        for _ in range(20):
            p, q = random_poly(rng), random_poly(rng)
            self.assertEqual(p + q, q + p)
            self.assertEqual(p * q, q * p)
            self.assertEqual(hash(p * q), hash(q * p))
            self.assertTrue((p - p).is_zero)

    def test_differentiating_by_parameter_rejected(self):
        with self.assertRaises(PolyError):
            parse_poly("a*x").diff("a")


class TestEvaluation(unittest.TestCase):
    def test_exact_evaluation(self):
        value = parse_poly("1/2*x^2 + a").evaluate({"x": 1, "a": Fraction(1, 3)})
        self.assertEqual(value, Fraction(5, 6))

    def test_unbound_symbol(self):
        with self.assertRaises(PolyError) as ctx:
            parse_poly("x + a").evaluate({"x": 1})
        self.assertEqual(ctx.exception.symbol, "a")

    def test_zero_denominator(self):
        with self.assertRaises(PolyError):
            parse_poly("(x)/a").evaluate({"x": 1, "a": 0})

    def test_compiled_matches_exact(self):
        rng = random.Random(3)
        for _ in range(10):
            p = random_poly(rng)
            state = (0.3, -0.7, 1.1)
            exact = p.evaluate({"x": 0.3, "y": -0.7, "z": 1.1, "a": 0.5})
            compiled = compile_poly(p, {"a": 0.5})(state)
            self.assertAlmostEqual(exact, compiled, places=10)


class TestVectorCalculus(unittest.TestCase):
    def test_curl_of_gradient_vanishes(self):
        rng = random.Random(5)
        for _ in range(10):
            self.assertTrue(curl(grad(random_poly(rng))).is_zero)

    def test_divergence_of_curl_vanishes(self):
        rng = random.Random(6)
        for _ in range(10):
            self.assertTrue(divergence(curl(random_vec(rng))).is_zero)

    def test_cross_product_properties(self):
        rng = random.Random(8)
        for _ in range(5):
            u, v = random_vec(rng), random_vec(rng)
            self.assertEqual(cross(u, v), -cross(v, u))
            self.assertTrue(dot(u, cross(u, v)).is_zero)

    def test_skew_vector_isomorphism(self):
        v = PolyVec3.of("x", "y*z", "a")
        m = vec_to_skew(v)
        self.assertEqual(m.kind, SKEW)
        self.assertEqual(skew_to_vec(m), v)
        w = PolyVec3.of("y", "x^2", "1")
        self.assertEqual(m.mat_vec(w), cross(v, w))

    def test_skew_matrix_acts_as_cross_product_on_gradients(self):
        rng = random.Random(10)
        for _ in range(5):
            v = random_vec(rng)
            h = random_poly(rng)
            self.assertEqual(vec_to_skew(v).mat_vec(grad(h)), cross(v, grad(h)))

    def test_jacobi_residual(self):
        self.assertTrue(jacobi_residual(PolyVec3.of("x", "y", "z")).is_zero)
        self.assertEqual(jacobi_residual(PolyVec3.of("y", "z", "x")), parse_poly("-x - y - z"))
        self.assertFalse(jacobi_residual(PolyVec3.of("y", "x*z", 0)).is_zero)

    def test_compatibility_residuals(self):
        rng = random.Random(9)
        for _ in range(5):
            first, second = compatibility_residuals(grad(random_poly(rng)), grad(random_poly(rng)))
            self.assertTrue(first.is_zero and second.is_zero)
        first, second = compatibility_residuals(PolyVec3.of(0, 0, "x*y"), PolyVec3.of("z^2", 0, 0))
        self.assertTrue(first.is_zero)
        self.assertEqual(second, parse_poly("x*z^2"))

    def test_three_wave_pair_with_polynomial_gradient(self):
        N = PolyVec3.of(0, "2*z^2 - 1/2*g*z", "-g*y + 1/2*d*g")
        first, second = compatibility_residuals(N, grad(parse_poly("x^2 + y^2 + z")))
        self.assertTrue(first.is_zero)
        self.assertEqual(second, parse_poly("-g*x - 8*x*z"))

    def test_matrix_kind_is_checked(self):
        with self.assertRaises(StructureError):
            PolyMat3.from_rows([[0, 1, 0], [1, 0, 0], [0, 0, 0]], SKEW)
        with self.assertRaises(StructureError):
            skew_to_vec(PolyMat3.identity())


if __name__ == "__main__":
    unittest.main()
