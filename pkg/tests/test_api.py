#!/usr/bin/env python3
"""
Tests for the HTTP endpoints, called directly
"""

import asyncio
import unittest
from pathlib import Path
import sys

# Add project root to path
project_root = Path(__file__).parent.parent
sys.path.append(str(project_root))

from fastapi import HTTPException
from fastapi.responses import JSONResponse

from app import main
from app.models import DeriveRequest, SimulateRequest


class TestEndpoints(unittest.TestCase):
    def test_root_and_health(self):
        self.assertEqual(asyncio.run(main.root())["systems"], 9)
        self.assertEqual(asyncio.run(main.health_check())["status"], "healthy")

    def test_systems(self):
        listing = asyncio.run(main.systems())["systems"]
        self.assertEqual(listing[2]["name"], "chen")
        self.assertEqual(listing[2]["parameters"], {"a": "35", "b": "3", "g": "28"})

    def test_unknown_system_is_404(self):
        with self.assertRaises(HTTPException) as ctx:
            asyncio.run(main.system_detail("lorenz"))
        self.assertEqual(ctx.exception.status_code, 404)

    def test_verify(self):
        response = asyncio.run(main.verify("lu", symbolic=False))
        self.assertTrue(response.passed)
        ids = [check.check_id for check in response.checks]
        self.assertIn("exactness.closedform", ids)
        self.assertIn("conformal.div3a", ids)

    def test_derive(self):
        response = asyncio.run(main.derive_system(DeriveRequest(system="three_wave", G="x^2 + y^2 + z")))
        self.assertEqual(response.source, "reduced_three_wave")
        self.assertEqual(len(response.rhs), 3)
        self.assertTrue(response.text.startswith("# source=reduced_three_wave"))

    def test_derive_bad_polynomial(self):
        response = asyncio.run(main.derive_system(DeriveRequest(system="lu", G="x^")))
        self.assertIsInstance(response, JSONResponse)
        self.assertEqual(response.status_code, 422)

    def test_simulate(self):
        request = SimulateRequest(system="euler_rotor", x0=[1.0, 1.0, 1.0], t1=0.1, dt=0.01)
        payload = asyncio.run(main.simulate(request))
        self.assertFalse(payload["diverged"])
        self.assertIn("Gbar", payload["drift"])
        self.assertAlmostEqual(payload["times"][-1], 0.1)

    def test_simulate_bad_window(self):
        request = SimulateRequest(system="chen", x0=[1.0, 1.0, 1.0], t0=1.0, t1=0.5)
        response = asyncio.run(main.simulate(request))
        self.assertEqual(response.status_code, 422)


if __name__ == "__main__":
    unittest.main()
