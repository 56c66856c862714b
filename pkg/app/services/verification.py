"""
Check catalogue behind `verify`, `report` and the /verify endpoints
"""
import logging
import time
from concurrent.futures import ThreadPoolExecutor, as_completed
from fractions import Fraction
from typing import Dict, List, Mapping, Optional

import numpy as np

from app.config import get_settings
from app.errors import PolyError
from app.hamiltonian.bihamiltonian import (
    PROP41,
    classify_prop41,
    compatibility_of,
    derive_system,
    euler_factorization,
    generic_pair,
    induced_n,
    jordan_anticommutator,
    jordan_identity_check,
    jordan_resistance,
    last_multiplier_residual,
    n_components,
    three_wave_closed_forms,
    three_wave_samples,
    verify_exactness,
    verify_exactness_symbolic,
)
from app.hamiltonian.conformal import DECOMPOSITIONS, verify_decomposition
from app.hamiltonian.polyfield import format_poly, jacobi_residual, skew_to_vec
from app.hamiltonian.systems import ResistiveSystem, get_system, list_systems, resolve_name, specialize, verify_system
from app.models import CheckResult, SystemReport

logger = logging.getLogger(__name__)

LAMBDAS = (Fraction(1, 2), Fraction(1), Fraction(2))


def _n_checks(name: str, sys: ResistiveSystem, instantiated: bool) -> List[CheckResult]:
    checks = []
    R = jordan_resistance(sys)
    by_formula = n_components(sys.J_vector, R)
    by_product = skew_to_vec(jordan_anticommutator(sys.J, R))
    checks.append(CheckResult.of("n.paths", by_formula == by_product))
    if name in PROP41:
        residual = jacobi_residual(by_formula)
        checks.append(CheckResult.info("n.jacobi", "zero" if residual.is_zero else "nonzero"))
        if not instantiated:
            result = classify_prop41(name)
            detail = f"expectation={result.expectation}"
            if result.constraint:
                detail += f" constraint={result.constraint}"
            checks.append(CheckResult.of("n.prop41", result.passed, detail))
    return checks


def _jordan_check(sys: ResistiveSystem) -> CheckResult:
    report = jordan_identity_check(sys.J, sys.R)
    failed = [name for name, ok in report.identities.items() if not ok]
    return CheckResult.of("jordan.identity", report.passed, "readings=matrix,jordan" if not failed else f"failed={','.join(failed)}")


def _three_wave_exactness(sys: ResistiveSystem, defaults: Mapping[str, float]) -> List[CheckResult]:
    g, d = defaults["g"], defaults["d"]
    Gbar, M = three_wave_closed_forms()
    N = skew_to_vec(jordan_anticommutator(sys.J, sys.R))
    samples = three_wave_samples(g, d)
    tol = get_settings().exactness_tol

    worst, ok, induced = 0.0, True, []
    for lam in LAMBDAS:
        bindings = {**defaults, "lam": float(lam)}
        report = verify_exactness(N, Gbar, M, samples, bindings)
        worst = max(worst, report.max_relative_error)
        ok = ok and report.passed
        induced.append(induced_n(Gbar, M, samples, bindings))
    spread = max(float(np.max(np.abs(n - induced[0]))) for n in induced)
    scale = max(float(np.max(np.abs(induced[0]))), 1e-300)
    ok = ok and spread / scale < tol
    lam_text = ",".join(str(lam) for lam in LAMBDAS)
    checks = [
        CheckResult.of(
            "exactness.closedform",
            ok,
            f"lam={lam_text} samples={len(samples)} max_rel={worst:.2e} lam_spread={spread / scale:.2e}",
        )
    ]

    derived = derive_system(sys.name)
    residual = last_multiplier_residual(derived.rhs, M.bind({**defaults, "lam": 1.0}), samples, defaults)
    checks.append(CheckResult.of("exactness.lastmultiplier", residual < tol, f"max_rel={residual:.2e}"))
    return checks


def _polynomial_exactness(name: str) -> List[CheckResult]:
    derived = derive_system(name)
    ok = verify_exactness_symbolic(derived.N, derived.Gbar, derived.M)
    checks = [CheckResult.of("exactness.closedform", ok, f"symbolic M={format_poly(derived.M, spaced=False)}")]
    first, second = compatibility_of(derived)
    checks.append(CheckResult.of("biham.compatible", first.is_zero and second.is_zero))
    checks.append(CheckResult.of("biham.conserved", derived.conserved_exactly))
    return checks


def _exactness_checks(
    name: str, sys: ResistiveSystem, bindings: Mapping[str, float], symbolic: bool, instantiated: bool
) -> List[CheckResult]:
    if name == "reduced_three_wave":
        if symbolic:
            return [CheckResult.info("exactness.closedform", "skipped numeric check")]
        return _three_wave_exactness(sys, bindings)
    if name in ("lu", "euler_rotor", "euler_rotor_dissipative"):
        if instantiated:
            return [CheckResult.info("exactness.closedform", "skipped for instantiated parameters")]
        return _polynomial_exactness(name)
    return []


def run_checks(
    sys_name: str,
    symbolic: bool = False,
    params: Optional[Mapping[str, Fraction]] = None,
) -> SystemReport:
    """Every check that applies to one registry entry"""
    name = resolve_name(sys_name)
    sys = get_system(name)
    params = dict(params or {})
    unknown = sorted(set(params) - set(sys.parameter_names))
    if unknown:
        raise PolyError(f"system {name} has no parameter '{unknown[0]}'", symbol=unknown[0])
    bindings = {key: float(value) for key, value in {**sys.defaults, **params}.items()}
    instantiated = bool(params)
    if instantiated:
        sys = specialize(sys, params)

    start = time.time()
    report = verify_system(sys)
    report.extend(_n_checks(name, sys, instantiated))
    report.add(_jordan_check(sys))
    report.extend(_exactness_checks(name, sys, bindings, symbolic, instantiated))
    if name in DECOMPOSITIONS and not instantiated:
        report.extend(verify_decomposition(name))
    if name.startswith("euler_rotor"):
        report.add(CheckResult.of("factorize.euler", euler_factorization(name), "R=I/2"))
    logger.info(f"Verified {name} in {time.time() - start:.2f}s: {'pass' if report.passed else 'FAIL'}")
    return report


def generic_jordan_report() -> SystemReport:
    J, R = generic_pair()
    report = SystemReport(system="generic")
    result = jordan_identity_check(J, R)
    failed = [name for name, ok in result.identities.items() if not ok]
    report.add(
        CheckResult.of(
            "jordan.identity",
            result.passed,
            "symbols=9 readings=matrix,jordan" if not failed else f"failed={','.join(failed)}",
        )
    )
    return report


def run_all(symbolic: bool = False, workers: Optional[int] = None) -> List[SystemReport]:
    """Per-system checks fanned out over a thread pool, returned in registry order"""
    workers = workers or get_settings().verify_workers
    names = list_systems()
    results: Dict[str, SystemReport] = {}
    with ThreadPoolExecutor(max_workers=workers) as executor:
        future_to_name = {executor.submit(run_checks, name, symbolic): name for name in names}
        future_to_name[executor.submit(generic_jordan_report)] = "generic"
        for future in as_completed(future_to_name):
            name = future_to_name[future]
            try:
                results[name] = future.result()
            except Exception as e:
                logger.error(f"Verification of {name} failed: {e}")
                results[name] = SystemReport(system=name, checks=[CheckResult.of("verify.run", False, str(e))])
    return [results[name] for name in names + ["generic"]]


def report_table(reports: List[SystemReport]) -> str:
    """Systems x checks matrix as aligned text"""
    columns: List[str] = []
    for report in reports:
        for check in report.checks:
            if check.check_id not in columns:
                columns.append(check.check_id)
    cells = []
    for report in reports:
        status = {}
        for check in report.checks:
            previous = status.get(check.check_id)
            if previous != "FAIL":
                status[check.check_id] = check.status
        cells.append([report.system] + [status.get(column, "-") for column in columns])
    header = ["system"] + columns
    widths = [max(len(row[i]) for row in [header] + cells) for i in range(len(header))]
    lines = ["  ".join(value.ljust(widths[i]) for i, value in enumerate(header)).rstrip()]
    for row in cells:
        lines.append("  ".join(value.ljust(widths[i]) for i, value in enumerate(row)).rstrip())
    return "\n".join(lines) + "\n"
