#!/usr/bin/env python3
"""
Command-line frontend: list, describe, verify, simulate, derive and report
"""
import argparse
import logging
import sys
from fractions import Fraction
from typing import Dict, List, Optional, Sequence

from pydantic import ValidationError

from app.config import get_settings
from app.errors import (
    IntegrationError,
    NotPoissonError,
    PolyError,
    ResistiveHamiltonianError,
    StructureError,
    UnknownSystemError,
)
from app.hamiltonian.systems import describe, get_system, list_systems
from app.models import DeriveRequest, IntegratorConfig
from app.services.derivation import KINDS, derive
from app.services.simulation import simulate_derived, simulate_system, write_csv, write_json
from app.services.verification import report_table, run_all, run_checks

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2


def _parse_params(items: Optional[List[str]], exact: bool) -> Dict[str, object]:
    """k=v pairs; rationals stay exact for symbolic checks, numeric runs get floats"""
    params: Dict[str, object] = {}
    for item in items or []:
        key, sep, value = item.partition("=")
        if not sep or not key.strip():
            raise PolyError(f"--param expects k=v, got '{item}'")
        try:
            number = Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise PolyError(f"--param {key.strip()} needs a number, got '{value}'")
        params[key.strip()] = number if exact else float(number)
    return params


def _parse_state(text: str) -> List[float]:
    try:
        values = [float(part) for part in text.split(",")]
    except ValueError:
        raise IntegrationError(f"--x0 expects three comma-separated numbers, got '{text}'")
    if len(values) != 3:
        raise IntegrationError(f"--x0 expects three components, got {len(values)}")
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="resham", description="Resistive-Hamiltonian systems toolkit")
    parser.add_argument("--log-level", default=None, help="logging level (default from RESHAM_LOG_LEVEL)")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("list", help="registered systems, one per line")

    p = sub.add_parser("describe", help="print a registry entry")
    p.add_argument("system")

    p = sub.add_parser("verify", help="run the check catalogue")
    p.add_argument("system", help="system name or 'all'")
    p.add_argument("--symbolic", action="store_true", help="skip numeric sampling checks")
    p.add_argument("--param", action="append", metavar="K=V")

    p = sub.add_parser("simulate", help="integrate a system and write its trajectory")
    p.add_argument("system")
    p.add_argument("--x0", required=True, help="initial state a,b,c")
    p.add_argument("--param", action="append", metavar="K=V")
    p.add_argument("--t0", type=float, default=0.0)
    p.add_argument("--t1", type=float, default=10.0)
    p.add_argument("--dt", type=float, default=None)
    p.add_argument("--method", choices=["rk4", "rk45"], default=None)
    p.add_argument("--derive", choices=["biham"], default=None, help="integrate the derived system instead")
    p.add_argument("--G", default=None, help="first Hamiltonian for --derive")
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=["csv", "json"], default="csv")

    p = sub.add_parser("derive", help="print a derived system")
    p.add_argument("system")
    p.add_argument("--kind", choices=list(KINDS), default="biham")
    p.add_argument("--G", default=None)
    p.add_argument("--delta", default=None)

    sub.add_parser("report", help="systems x checks table")
    return parser


def _verify(args) -> int:
    if args.system == "all":
        if args.param:
            raise PolyError("--param cannot be combined with 'verify all'")
        reports = run_all(symbolic=args.symbolic)
    else:
        reports = [run_checks(args.system, symbolic=args.symbolic, params=_parse_params(args.param, exact=True))]
    for report in reports:
        if len(reports) > 1:
            print(f"# system={report.system}")
        for line in report.lines():
            print(line)
    return EXIT_OK if all(report.passed for report in reports) else EXIT_FAILED


def _simulate(args) -> int:
    settings = get_settings()
    get_system(args.system)
    cfg = IntegratorConfig(
        method=args.method or settings.method,
        step=args.dt or settings.step,
        t_start=args.t0,
        t_end=args.t1,
    )
    x0 = _parse_state(args.x0)
    params = _parse_params(args.param, exact=False)
    if args.derive:
        traj = simulate_derived(args.system, x0, cfg, G=args.G, params=params)
    else:
        traj = simulate_system(args.system, x0, cfg, params=params)
    if args.format == "csv":
        write_csv(traj, args.out)
    else:
        write_json(traj, args.out)
    if traj.diverged:
        logger.error(f"Trajectory left the bounded region at t={traj.times[-1]}")
        return EXIT_FAILED
    return EXIT_OK


def _derive(args) -> int:
    response = derive(DeriveRequest(system=args.system, kind=args.kind, G=args.G, delta=args.delta))
    sys.stdout.write(response.text)
    return EXIT_OK


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK

    logging.basicConfig(level=(args.log_level or get_settings().log_level).upper(), stream=sys.stderr)
    try:
        if args.command == "list":
            for name in list_systems():
                print(name)
            return EXIT_OK
        if args.command == "describe":
            print(describe(get_system(args.system)))
            return EXIT_OK
        if args.command == "verify":
            return _verify(args)
        if args.command == "simulate":
            return _simulate(args)
        if args.command == "derive":
            return _derive(args)
        if args.command == "report":
            reports = run_all()
            sys.stdout.write(report_table(reports))
            return EXIT_OK if all(report.passed for report in reports) else EXIT_FAILED
    except (UnknownSystemError, PolyError, IntegrationError, StructureError, NotPoissonError, ValidationError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ResistiveHamiltonianError as e:
        logger.error(f"{args.command} failed: {e}")
        return EXIT_FAILED
    return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
