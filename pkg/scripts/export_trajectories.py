#!/usr/bin/env python3
"""
Export reference trajectories for every registry system (CSV for plotting)
"""
import argparse
import logging
import sys
from pathlib import Path

# Add project root to path
sys.path.append(str(Path(__file__).parent.parent))

from app.errors import ResistiveHamiltonianError
from app.hamiltonian.systems import list_systems
from app.models import IntegratorConfig
from app.services.simulation import conservation_report, simulate_derived, simulate_system, write_csv

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)

INITIAL_STATES = {
    "reduced_three_wave": [0.3, 0.4, 0.5],
    "rlc_circuit": [1.0, 0.0, 0.0],
}


def main():
    parser = argparse.ArgumentParser(description="Write one trajectory CSV per registry system")
    parser.add_argument("--out-dir", default="trajectories")
    parser.add_argument("--t1", type=float, default=10.0)
    parser.add_argument("--dt", type=float, default=1e-3)
    parser.add_argument("--method", choices=["rk4", "rk45"], default="rk4")
    args = parser.parse_args()

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    cfg = IntegratorConfig(method=args.method, step=args.dt, t_start=0.0, t_end=args.t1)

    failures = 0
    for name in list_systems():
        x0 = INITIAL_STATES.get(name, [1.0, 1.0, 1.0])
        try:
            traj = simulate_system(name, x0, cfg)
            write_csv(traj, out_dir / f"{name}.csv")
            if traj.diverged:
                logger.warning(f"{name}: trajectory diverged at t={traj.times[-1]}")
        except ResistiveHamiltonianError as e:
            logger.error(f"{name} failed: {e}")
            failures += 1

    traj = simulate_derived("three_wave", INITIAL_STATES["reduced_three_wave"], cfg)
    write_csv(traj, out_dir / "three_wave_biham.csv")
    logger.info(f"three_wave_biham: G drift {conservation_report(traj, 'G'):.3e}")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
