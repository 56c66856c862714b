#!/usr/bin/env python3
"""
Tests for the system registry and the resistive-Hamiltonian identities
"""

import unittest
from fractions import Fraction
from pathlib import Path
import sys

# Add project root to path
project_root = Path(__file__).parent.parent
sys.path.append(str(project_root))

from app.errors import SourceTermError, StructureError, UnknownSystemError
from app.hamiltonian.polyfield import Poly, PolyVec3, parse_poly, vec_to_skew
from app.hamiltonian.systems import (
    assemble,
    describe,
    divergence_split,
    energy_rate,
    field_divergence,
    get_system,
    list_systems,
    poisson_bracket,
    resolve_name,
    specialize,
    symmetric_bracket,
    verify_system,
)

EXPECTED_SYSTEMS = [
    "reduced_three_wave",
    "rabinovich",
    "chen",
    "lu",
    "modified_lu",
    "qi",
    "rlc_circuit",
    "euler_rotor",
    "euler_rotor_dissipative",
]


class TestRegistry(unittest.TestCase):
    def test_registry_contents(self):
        self.assertEqual(list_systems(), EXPECTED_SYSTEMS)

    def test_alias(self):
        self.assertEqual(resolve_name("three_wave"), "reduced_three_wave")
        self.assertIs(get_system("three_wave"), get_system("reduced_three_wave"))

    def test_unknown_system(self):
        with self.assertRaises(UnknownSystemError):
            get_system("lorenz")

    def test_every_entry_verifies(self):
        for name in EXPECTED_SYSTEMS:
            report = verify_system(get_system(name))
            self.assertTrue(report.passed, f"{name}: {report.lines()}")

    def test_resistance_denominator_is_parameter_monomial(self):
        for name in EXPECTED_SYSTEMS:
            s = get_system(name)
            coeff, _, den = s.r_denominator.as_parameter_monomial()
            self.assertEqual(coeff, 1, name)
            self.assertEqual(den, {}, name)
            self.assertEqual(s.R.kind, "symmetric", name)

    def test_describe(self):
        text = describe(get_system("chen"))
        self.assertIn("name: chen", text)
        self.assertIn("parameters: a=35, b=3, g=28", text)
        self.assertIn("spelling: a=α, b=β, g=γ", text)


class TestIdentities(unittest.TestCase):
    def test_chen_values(self):
        chen = get_system("chen")
        self.assertEqual(energy_rate(chen), parse_poly("-a*x^2 + a*b*z"))
        self.assertEqual(field_divergence(chen), parse_poly("-a - b + g"))
        lines = verify_system(chen).lines()
        self.assertIn("PASS div.match value=-a-b+g", lines)
        self.assertIn("PASS jacobi.J", lines)
        self.assertIn("PASS rhs.match", lines)

    def test_qi_divergence(self):
        qi = get_system("qi")
        self.assertEqual(field_divergence(qi), parse_poly("-a - b - 1"))
        instantiated = specialize(qi, qi.defaults)
        self.assertEqual(field_divergence(instantiated), Poly.constant(Fraction(-41, 3)))

    def test_three_wave_rates(self):
        sys3 = get_system("three_wave")
        self.assertEqual(energy_rate(sys3), parse_poly("2*g*x^2 + 2*g*y^2 - 2*z"))
        self.assertEqual(field_divergence(sys3), parse_poly("2*g - 2"))

    def test_energy_rate_is_symmetric_bracket(self):
        for name in ("rabinovich", "lu", "modified_lu", "euler_rotor_dissipative"):
            s = get_system(name)
            self.assertEqual(energy_rate(s), -symmetric_bracket(s.H, s.H, s.R), name)

    def test_hamiltonian_part_conserves_energy(self):
        for name in EXPECTED_SYSTEMS:
            s = get_system(name)
            self.assertTrue(poisson_bracket(s.H, s.H, s.J).is_zero, name)

    def test_divergence_split_sums(self):
        for name in EXPECTED_SYSTEMS:
            s = get_system(name)
            hamiltonian, resistive = divergence_split(s)
            self.assertEqual(hamiltonian + resistive, field_divergence(s), name)

    def test_rlc_port(self):
        rlc = get_system("rlc_circuit")
        self.assertEqual(rlc.dimension, 2)
        self.assertEqual(assemble(rlc), PolyVec3.of("y", "(C*V - C*R*y - x)/(C*L)", 0))
        with self.assertRaises(SourceTermError):
            energy_rate(rlc)

    def test_dissipative_rotor_energy_rate(self):
        rotor = get_system("euler_rotor_dissipative")
        expected = parse_poly("(-x^2)/(2*Ix^2)") + parse_poly("(-y^2)/(2*Iy^2)") + parse_poly("(-z^2)/(2*Iz^2)")
        self.assertEqual(energy_rate(rotor), expected)
        self.assertTrue(energy_rate(get_system("euler_rotor")).is_zero)

    def test_canonical_pair(self):
        # m[0][1] = -J_z, so the vector (0, 0, -1) gives the canonical pair
        self.assertEqual(poisson_bracket("x", "y", vec_to_skew(PolyVec3.of(0, 0, -1))), Poly.one())
        self.assertEqual(poisson_bracket("x", "y", vec_to_skew(PolyVec3.of(0, 0, 1))), -Poly.one())
        self.assertEqual(poisson_bracket("x", "1/2*x^2 - a*z", get_system("chen").J), parse_poly("a*y"))

    def test_symmetric_bracket_is_symmetric_and_leibniz(self):
        R = get_system("rabinovich").R
        f, g, h = parse_poly("x*y + z"), parse_poly("y^2 - x*z"), parse_poly("x + y*z^2")
        self.assertEqual(symmetric_bracket(f, g, R), symmetric_bracket(g, f, R))
        self.assertEqual(
            symmetric_bracket(f * g, h, R),
            f * symmetric_bracket(g, h, R) + g * symmetric_bracket(f, h, R),
        )

    def test_bracket_needs_matching_kind(self):
        chen = get_system("chen")
        with self.assertRaises(StructureError):
            symmetric_bracket(chen.H, chen.H, chen.J)
        with self.assertRaises(StructureError):
            poisson_bracket(chen.H, chen.H, chen.R)


if __name__ == "__main__":
    unittest.main()
