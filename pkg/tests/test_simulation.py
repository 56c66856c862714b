#!/usr/bin/env python3
"""
Tests for trajectory integration and export
"""

import json
import shutil
import tempfile
import unittest
from pathlib import Path
import sys

# Add project root to path
project_root = Path(__file__).parent.parent
sys.path.append(str(project_root))

from pydantic import ValidationError

from app.errors import IntegrationError, UnknownChannelError
from app.hamiltonian.polyfield import PolyVec3, parse_poly
from app.models import IntegratorConfig
from app.services.simulation import (
    conservation_report,
    integrate,
    simulate_derived,
    simulate_system,
    write_csv,
    write_json,
)


class TestIntegrators(unittest.TestCase):
    def test_rk4_lands_on_end(self):
        cfg = IntegratorConfig(method="rk4", step=0.3, t_start=0.0, t_end=1.0)
        traj = integrate(PolyVec3.of("-x", 0, 0), [1.0, 0.0, 0.0], cfg)
        self.assertAlmostEqual(traj.times[-1], 1.0)
        self.assertEqual(len(traj.times), 5)

    def test_rk4_accuracy(self):
        cfg = IntegratorConfig(method="rk4", step=1e-2, t_start=0.0, t_end=1.0)
        traj = integrate(PolyVec3.of("-x", "y", 0), [1.0, 1.0, 0.0], cfg)
        self.assertAlmostEqual(traj.states[-1][0], 0.36787944117144233, places=8)
        self.assertAlmostEqual(traj.states[-1][1], 2.718281828459045, places=7)

    def test_rk45_accuracy(self):
        cfg = IntegratorConfig(method="rk45", step=1e-2, t_start=0.0, t_end=1.0, abs_tol=1e-10, rel_tol=1e-10)
        traj = integrate(PolyVec3.of("-x", 0, 0), [1.0, 0.0, 0.0], cfg)
        self.assertAlmostEqual(traj.times[-1], 1.0)
        self.assertAlmostEqual(traj.states[-1][0], 0.36787944117144233, places=7)

    def test_blow_up_is_flagged(self):
        cfg = IntegratorConfig(method="rk4", step=1e-3, t_start=0.0, t_end=2.0)
        traj = integrate(PolyVec3.of("x^2", 0, 0), [1.0, 0.0, 0.0], cfg)
        self.assertTrue(traj.diverged)
        self.assertLess(traj.times[-1], 1.1)

    def test_unbound_parameter(self):
        cfg = IntegratorConfig(t_end=1.0)
        with self.assertRaises(IntegrationError):
            integrate(PolyVec3.of("a*x", 0, 0), [1.0, 0.0, 0.0], cfg)

    def test_config_validation(self):
        with self.assertRaises(ValidationError):
            IntegratorConfig(t_start=1.0, t_end=0.5)
        with self.assertRaises(ValidationError):
            IntegratorConfig(step=-1.0)


class TestConservation(unittest.TestCase):
    def test_euler_rotor_invariants(self):
        cfg = IntegratorConfig(method="rk4", step=1e-3, t_start=0.0, t_end=10.0)
        traj = simulate_system("euler_rotor", [1.0, 1.0, 1.0], cfg)
        self.assertLess(conservation_report(traj, "H"), 1e-6)
        self.assertLess(conservation_report(traj, "Gbar"), 1e-6)
        self.assertTrue(all(v == 0.0 for v in traj.channel("analytic_divergence")))

    def test_dissipative_rotor_loses_energy(self):
        cfg = IntegratorConfig(method="rk4", step=1e-2, t_start=0.0, t_end=5.0)
        energy = simulate_system("euler_rotor_dissipative", [1.0, 1.0, 1.0], cfg).channel("H")
        self.assertTrue(all(b <= a + 1e-12 for a, b in zip(energy, energy[1:])))
        self.assertLess(energy[-1], energy[0])

    def test_derived_three_wave_conserves_G(self):
        cfg = IntegratorConfig(method="rk4", step=1e-3, t_start=0.0, t_end=5.0)
        traj = simulate_derived("three_wave", [0.3, 0.4, 0.5], cfg, G="x^2 + y^2 + z")
        self.assertFalse(traj.diverged)
        self.assertLess(conservation_report(traj, "G"), 1e-6)
        self.assertIn("Gbar", traj.channels)

    def test_parameter_override(self):
        cfg = IntegratorConfig(method="rk4", step=1e-2, t_start=0.0, t_end=0.1)
        traj = simulate_system("qi", [1.0, 1.0, 1.0], cfg, params={"a": 5.0})
        self.assertEqual(traj.config.param_bindings["a"], 5.0)
        self.assertAlmostEqual(traj.channel("analytic_divergence")[0], -5.0 - 8.0 / 3.0 - 1.0)

    def test_rk4_is_fourth_order(self):
        drift = {}
        for step in (0.1, 0.05):
            cfg = IntegratorConfig(method="rk4", step=step, t_start=0.0, t_end=10.0)
            traj = simulate_system("euler_rotor", [1.0, 1.0, 1.0], cfg)
            drift[step] = conservation_report(traj, "H")
        ratio = drift[0.1] / drift[0.05]
        self.assertGreater(ratio, 10.0)
        self.assertLess(ratio, 22.0)

    def test_energy_rate_residual_bound(self):
        step = 1e-3
        cfg = IntegratorConfig(method="rk4", step=step, t_start=0.0, t_end=10.0)
        for name, x0 in (("euler_rotor", [1.0, 1.0, 1.0]), ("rlc_circuit", [1.0, 0.0, 0.0])):
            with self.subTest(system=name):
                residual = simulate_system(name, x0, cfg).channel("energy_rate_residual")
                self.assertLess(max(residual), 10 * step ** 2)

    def test_divergence_channel_is_constant(self):
        cfg = IntegratorConfig(method="rk4", step=1e-3, t_start=0.0, t_end=0.05)
        for name in ("reduced_three_wave", "rabinovich", "chen", "lu", "modified_lu", "qi"):
            with self.subTest(system=name):
                values = simulate_system(name, [0.3, 0.4, 0.5], cfg).channel("analytic_divergence")
                for value in values:
                    self.assertAlmostEqual(value, values[0], places=12)
        chen = simulate_system("chen", [0.3, 0.4, 0.5], cfg).channel("analytic_divergence")
        self.assertAlmostEqual(chen[0], -10.0)

    def test_unknown_channel(self):
        cfg = IntegratorConfig(method="rk4", step=1e-2, t_start=0.0, t_end=0.1)
        traj = simulate_system("chen", [1.0, 1.0, 1.0], cfg)
        with self.assertRaises(UnknownChannelError):
            traj.channel("Gbar")


class TestExport(unittest.TestCase):
    def setUp(self):
        self.temp_dir = tempfile.mkdtemp()
        cfg = IntegratorConfig(method="rk4", step=1e-2, t_start=0.0, t_end=0.05)
        self.traj = simulate_system("euler_rotor", [1.0, 1.0, 1.0], cfg)

    def tearDown(self):
        shutil.rmtree(self.temp_dir)

    def test_csv(self):
        path = Path(self.temp_dir) / "rotor.csv"
        write_csv(self.traj, path)
        content = path.read_bytes().decode()
        self.assertNotIn("\r", content)
        lines = content.splitlines()
        self.assertEqual(lines[0], "t,x,y,z,H,G,Gbar,div,energy_rate_residual")
        self.assertEqual(len(lines), len(self.traj.times) + 1)
        self.assertEqual(lines[1].split(",")[:4], ["0", "1", "1", "1"])

    def test_json(self):
        path = Path(self.temp_dir) / "rotor.json"
        write_json(self.traj, path)
        payload = json.loads(path.read_text())
        self.assertEqual(set(payload), {"times", "states", "channels", "config"})
        self.assertEqual(payload["config"]["method"], "rk4")
        self.assertEqual(len(payload["states"]), len(payload["times"]))


if __name__ == "__main__":
    unittest.main()
