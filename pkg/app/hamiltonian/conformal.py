"""
Conformal Hamiltonian vector fields X_H + a * (x, y, z) on three-dimensional Poisson structures
"""
import logging
from dataclasses import dataclass
from typing import Dict, Mapping, Optional, Tuple

from app.errors import NotPoissonError, StructureError
from app.hamiltonian.polyfield import (
    Poly,
    PolyLike,
    PolyVec3,
    as_poly,
    cross,
    divergence,
    dot,
    format_poly,
    grad,
    jacobi_residual,
    parse_poly,
    variables,
)
from app.hamiltonian.systems import get_system, resolve_name
from app.models import CheckResult

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ConformalDecomposition:
    system: str
    J: PolyVec3
    H: Poly
    a: Poly
    constraint: Tuple[Tuple[str, Poly], ...] = ()

    @property
    def bindings(self) -> Dict[str, Poly]:
        return dict(self.constraint)


def euler_operator(p: PolyLike) -> Poly:
    """x dp/dx + y dp/dy + z dp/dz"""
    return dot(PolyVec3(*variables()), grad(as_poly(p)))


def conservative_field(d: ConformalDecomposition) -> PolyVec3:
    residual = jacobi_residual(d.J)
    if not residual.is_zero:
        raise NotPoissonError(f"J is not a Poisson vector: Jacobi residual {residual}", residual)
    field = cross(d.J, grad(d.H))
    div = divergence(field)
    if not div.is_zero:
        raise StructureError(f"volume-preserving hypothesis violated: div = {div}")
    return field


def conformal_field(d: ConformalDecomposition) -> PolyVec3:
    return conservative_field(d) + PolyVec3(*variables()).scale(d.a)


def euler_energy_rate(d: ConformalDecomposition) -> Poly:
    rate = d.a * euler_operator(d.H)
    if rate != dot(grad(d.H), conformal_field(d)):
        raise StructureError("internal error: a * Euler operator disagrees with grad H . field")
    return rate


def _decomposition(system: str, J: Tuple[str, str, str], H: str, a: str, constraint: Mapping[str, str]) -> ConformalDecomposition:
    return ConformalDecomposition(
        system=system,
        J=PolyVec3.of(*J),
        H=parse_poly(H),
        a=parse_poly(a),
        constraint=tuple((name, parse_poly(value)) for name, value in constraint.items()),
    )


DECOMPOSITIONS: Dict[str, ConformalDecomposition] = {
    "reduced_three_wave": _decomposition(
        "reduced_three_wave", ("0", "z", "y - 1/2*d"), "x^2 + y^2 + z", "-2", {"g": "-2"}
    ),
    "chen": _decomposition("chen", ("-x", "-y", "g - z"), "1/2*x^2 - a*z", "-a", {"b": "a", "g": "-a"}),
    "lu": _decomposition("lu", ("0", "-y", "-z"), "1/2*x^2 - a*z", "-a", {"b": "a", "g": "-a"}),
}


def registered_decomposition(sys_name: str) -> Optional[ConformalDecomposition]:
    return DECOMPOSITIONS.get(resolve_name(sys_name))


def render_conformal(d: ConformalDecomposition) -> str:
    """Constrained conformal field in the derive text format"""
    field = conformal_field(d).substitute(d.bindings)
    lines = [f"# source={d.system}"]
    if d.constraint:
        constraint = ",".join(f"{name}={format_poly(value, spaced=False)}" for name, value in d.constraint)
        lines.append(f"# constraint={constraint}")
    lines += [
        f"# J={d.J.substitute(d.bindings)}",
        f"# H={format_poly(d.H.substitute(d.bindings))}",
        f"# a={format_poly(d.a.substitute(d.bindings))}",
    ]
    for var, component in zip("xyz", field):
        lines.append(f"d{var}/dt = {format_poly(component)}")
    return "\n".join(lines) + "\n"


def verify_decomposition(
    sys_name: str,
    d: Optional[ConformalDecomposition] = None,
    apply_constraint: bool = True,
) -> list:
    """Compare the conformal field with the registry field under the decomposition's constraint"""
    name = resolve_name(sys_name)
    d = d if d is not None else DECOMPOSITIONS.get(name)
    if d is None:
        return [CheckResult.info("conformal.match", "no decomposition registered")]

    sys = get_system(name)
    bindings = d.bindings if apply_constraint else {}
    checks = []
    try:
        field = conformal_field(d).substitute(bindings)
    except (NotPoissonError, StructureError) as e:
        return [CheckResult.of("conformal.match", False, str(e))]

    reference = sys.reference_rhs.substitute(bindings)
    difference = reference - field
    checks.append(
        CheckResult.of("conformal.match", difference.is_zero, "" if difference.is_zero else f"diff={difference}")
    )

    three_a = (d.a * 3).substitute(bindings)
    field_div = divergence(field)
    system_div = divergence(reference)
    ok = field_div == three_a and system_div == three_a
    checks.append(
        CheckResult.of(
            "conformal.div3a",
            ok,
            f"div={format_poly(field_div, spaced=False)} 3a={format_poly(three_a, spaced=False)}",
        )
    )
    try:
        euler_energy_rate(d)
        checks.append(CheckResult.of("conformal.eulerrate", True))
    except StructureError as e:
        checks.append(CheckResult.of("conformal.eulerrate", False, str(e)))
    logger.debug(f"Conformal decomposition of {name}: {[c.status for c in checks]}")
    return checks
