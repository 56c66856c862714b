#!/usr/bin/env python3
"""
Tests for the verification catalogue
"""

import unittest
from fractions import Fraction
from pathlib import Path
import sys

# Add project root to path
project_root = Path(__file__).parent.parent
sys.path.append(str(project_root))

from app.errors import PolyError, UnknownSystemError
from app.models import CheckResult, SystemReport
from app.services.verification import report_table, run_all, run_checks


def statuses(report: SystemReport) -> dict:
    return {check.check_id: check.status for check in report.checks}


class TestRunChecks(unittest.TestCase):
    def test_three_wave_exactness(self):
        report = run_checks("three_wave")
        found = statuses(report)
        self.assertEqual(found["exactness.closedform"], "PASS")
        self.assertEqual(found["exactness.lastmultiplier"], "PASS")
        self.assertEqual(found["n.prop41"], "PASS")
        self.assertEqual(found["conformal.match"], "PASS")
        self.assertTrue(report.passed, report.lines())

    def test_symbolic_mode_skips_sampling(self):
        found = statuses(run_checks("three_wave", symbolic=True))
        self.assertEqual(found["exactness.closedform"], "INFO")
        self.assertNotIn("exactness.lastmultiplier", found)

    def test_euler_checks(self):
        found = statuses(run_checks("euler_rotor"))
        self.assertEqual(found["factorize.euler"], "PASS")
        self.assertEqual(found["exactness.closedform"], "PASS")
        self.assertEqual(found["biham.compatible"], "PASS")

    def test_instantiated_parameters(self):
        report = run_checks("rabinovich", params={"k2": Fraction(-1), "k3": Fraction(1)})
        found = statuses(report)
        self.assertNotIn("n.prop41", found)
        self.assertTrue(report.passed, report.lines())
        self.assertIn("INFO n.jacobi zero", report.lines())

    def test_unknown_parameter(self):
        with self.assertRaises(PolyError):
            run_checks("chen", params={"k1": Fraction(1)})

    def test_unknown_system(self):
        with self.assertRaises(UnknownSystemError):
            run_checks("lorenz")


class TestReport(unittest.TestCase):
    def test_verify_all(self):
        reports = run_all(workers=2)
        self.assertEqual([r.system for r in reports][-1], "generic")
        self.assertEqual(len(reports), 10)
        for report in reports:
            self.assertTrue(report.passed, f"{report.system}: {report.lines()}")

    def test_table_layout(self):
        reports = [
            SystemReport(system="alpha", checks=[CheckResult.of("jacobi.J", True), CheckResult.of("rhs.match", False)]),
            SystemReport(system="b", checks=[CheckResult.info("n.jacobi", "zero")]),
        ]
        lines = report_table(reports).splitlines()
        self.assertEqual(lines[0], "system  jacobi.J  rhs.match  n.jacobi")
        self.assertEqual(lines[1], "alpha   PASS      FAIL       -")
        self.assertEqual(lines[2], "b       -         -          INFO")


if __name__ == "__main__":
    unittest.main()
