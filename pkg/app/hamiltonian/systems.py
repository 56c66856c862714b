"""
Registry of resistive- and port-Hamiltonian systems
Every entry stores (J, R, H, V) and the printed right-hand side it must reproduce
"""
import logging
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import cached_property
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from app.errors import SourceTermError, StructureError, UnknownSystemError
from app.hamiltonian.polyfield import (
    PARAMETER_SPELLINGS,
    SKEW,
    SYMMETRIC,
    Poly,
    PolyLike,
    PolyMat3,
    PolyVec3,
    as_poly,
    curl,
    divergence,
    dot,
    format_poly,
    grad,
    jacobi_residual,
    parse_poly,
    skew_to_vec,
)
from app.models import CheckResult, SystemReport

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Parameter:
    name: str
    default: Optional[Fraction] = None


@dataclass(frozen=True)
class ResistiveSystem:
    """Resistive-Hamiltonian system, optionally with a source column V"""
    name: str
    J: PolyMat3
    r_matrix: PolyMat3
    r_denominator: Poly
    H: Poly
    V: PolyVec3
    params: Tuple[Parameter, ...]
    reference_rhs: PolyVec3
    dimension: int = 3
    expected_energy_rate: Optional[Poly] = None
    expected_divergence: Optional[Poly] = None
    irrotational: Optional[bool] = None
    title: str = ""

    @cached_property
    def R(self) -> PolyMat3:
        return self.r_matrix.divide(self.r_denominator)

    @cached_property
    def J_vector(self) -> PolyVec3:
        return skew_to_vec(self.J)

    @property
    def has_source(self) -> bool:
        return not self.V.is_zero

    @property
    def defaults(self) -> Dict[str, Fraction]:
        return {p.name: p.default for p in self.params if p.default is not None}

    @property
    def parameter_names(self) -> List[str]:
        return [p.name for p in self.params]


def hamiltonian_part(sys: ResistiveSystem) -> PolyVec3:
    """J grad H"""
    return sys.J.mat_vec(grad(sys.H))


def resistive_part(sys: ResistiveSystem) -> PolyVec3:
    """-R grad H"""
    return -sys.R.mat_vec(grad(sys.H))


def assemble(sys: ResistiveSystem) -> PolyVec3:
    """(J - R) grad H + V"""
    return hamiltonian_part(sys) + resistive_part(sys) + sys.V


def without_source(sys: ResistiveSystem) -> ResistiveSystem:
    if not sys.has_source:
        return sys
    return replace(sys, V=PolyVec3.zero(), reference_rhs=sys.reference_rhs - sys.V)


def energy_rate(sys: ResistiveSystem) -> Poly:
    if sys.has_source:
        raise SourceTermError(
            f"{sys.name} has a source term; evaluate dot(grad H, assemble(sys)) directly"
        )
    return dot(grad(sys.H), assemble(sys))


def field_divergence(sys: ResistiveSystem) -> Poly:
    return divergence(assemble(sys))


def divergence_split(sys: ResistiveSystem) -> Tuple[Poly, Poly]:
    """Divergence attributed to the Hamiltonian part and to the resistive part"""
    return divergence(hamiltonian_part(sys)), divergence(resistive_part(sys))


def poisson_bracket(f: PolyLike, g: PolyLike, J: PolyMat3) -> Poly:
    if J.kind != SKEW:
        raise StructureError("Poisson bracket needs a skew matrix")
    return dot(grad(as_poly(f)), J.mat_vec(grad(as_poly(g))))


def symmetric_bracket(f: PolyLike, g: PolyLike, R: PolyMat3) -> Poly:
    if R.kind != SYMMETRIC:
        raise StructureError("symmetric bracket needs a symmetric matrix")
    return dot(grad(as_poly(f)), R.mat_vec(grad(as_poly(g))))


def specialize(sys: ResistiveSystem, bindings: Mapping[str, PolyLike]) -> ResistiveSystem:
    """Substitute parameters in every field of a system"""
    if not bindings:
        return sys

    def sub(p: Optional[Poly]) -> Optional[Poly]:
        return None if p is None else p.substitute(bindings)

    return ResistiveSystem(
        name=sys.name,
        J=sys.J.substitute(bindings),
        r_matrix=sys.r_matrix.substitute(bindings),
        r_denominator=sys.r_denominator.substitute(bindings),
        H=sys.H.substitute(bindings),
        V=sys.V.substitute(bindings),
        params=tuple(p for p in sys.params if p.name not in bindings),
        reference_rhs=sys.reference_rhs.substitute(bindings),
        dimension=sys.dimension,
        expected_energy_rate=sub(sys.expected_energy_rate),
        expected_divergence=sub(sys.expected_divergence),
        irrotational=sys.irrotational,
        title=sys.title,
    )


def verify_system(sys: ResistiveSystem) -> SystemReport:
    report = SystemReport(system=sys.name)

    try:
        PolyMat3(sys.J.entries, SKEW)
        report.add(CheckResult.of("skew.J", True))
    except StructureError as e:
        report.add(CheckResult.of("skew.J", False, str(e)))
    try:
        PolyMat3(sys.R.entries, SYMMETRIC)
        report.add(CheckResult.of("symmetric.R", True))
    except StructureError as e:
        report.add(CheckResult.of("symmetric.R", False, str(e)))

    residual = jacobi_residual(skew_to_vec(sys.J.with_kind(SKEW)))
    report.add(CheckResult.of("jacobi.J", residual.is_zero, "" if residual.is_zero else f"residual={residual}"))

    rhs = assemble(sys)
    mismatch = rhs - sys.reference_rhs
    report.add(CheckResult.of("rhs.match", mismatch.is_zero, "" if mismatch.is_zero else f"diff={mismatch}"))

    unforced = without_source(sys)
    rate = energy_rate(unforced)
    dissipation = -symmetric_bracket(unforced.H, unforced.H, unforced.R)
    if sys.expected_energy_rate is not None:
        ok = rate == sys.expected_energy_rate and rate == dissipation
        report.add(CheckResult.of("energyrate.match", ok, f"value={format_poly(rate, spaced=False)}"))

    div = field_divergence(sys)
    if sys.expected_divergence is not None:
        ok = div == sys.expected_divergence
        report.add(CheckResult.of("div.match", ok, f"value={format_poly(div, spaced=False)}"))
    hamiltonian_div, resistive_div = divergence_split(sys)
    report.add(
        CheckResult.info(
            "div.split",
            f"hamiltonian={format_poly(hamiltonian_div, spaced=False)} "
            f"resistive={format_poly(resistive_div, spaced=False)}",
        )
    )

    if sys.irrotational is not None:
        irrotational = curl(sys.J_vector).is_zero
        report.add(
            CheckResult.of(
                "curl.J",
                irrotational == sys.irrotational,
                f"irrotational={str(irrotational).lower()}",
            )
        )
    return report


def describe(sys: ResistiveSystem) -> str:
    params = ", ".join(
        p.name if p.default is None else f"{p.name}={_format_fraction(p.default)}" for p in sys.params
    )
    spellings = ", ".join(
        f"{p.name}={PARAMETER_SPELLINGS[p.name]}" for p in sys.params if p.name in PARAMETER_SPELLINGS
    )
    lines = [
        f"name: {sys.name}",
        f"dimension: {sys.dimension}",
        f"parameters: {params}",
        f"spelling: {spellings}",
        f"H: {format_poly(sys.H)}",
        f"J: {sys.J}",
        f"R: {sys.R}",
        f"V: {sys.V}",
        f"rhs: {sys.reference_rhs}",
    ]
    return "\n".join(lines)


def _format_fraction(value: Fraction) -> str:
    return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"


# registry


def _p(text: str) -> Poly:
    return parse_poly(text)


def _rows(rows: Sequence[Sequence[str]], kind: str) -> PolyMat3:
    return PolyMat3.from_rows([[_p(entry) for entry in row] for row in rows], kind)


def _vec(x: PolyLike, y: PolyLike, z: PolyLike) -> PolyVec3:
    return PolyVec3.of(x, y, z)


def _params(**defaults) -> Tuple[Parameter, ...]:
    return tuple(Parameter(name, None if value is None else Fraction(value)) for name, value in defaults.items())


_EULER_J = [["0", "-z", "y"], ["z", "0", "-x"], ["-y", "x", "0"]]
_EULER_K = "(Iy*Iz*x^2 + Ix*Iz*y^2 + Ix*Iy*z^2)/(2*Ix*Iy*Iz)"
_EULER_RHS = (
    "(Iy*y*z - Iz*y*z)/(Iy*Iz)",
    "(Iz*x*z - Ix*x*z)/(Ix*Iz)",
    "(Ix*x*y - Iy*x*y)/(Ix*Iy)",
)
_LU_J = [["0", "z", "-y"], ["-z", "0", "0"], ["y", "0", "0"]]
_MODIFIED_LU_J = [
    ["0", "z", "(-2*a*y - y*z)/(2*a)"],
    ["-z", "0", "0"],
    ["(2*a*y + y*z)/(2*a)", "0", "0"],
]


def _build_registry() -> Dict[str, ResistiveSystem]:
    entries = [
        ResistiveSystem(
            name="reduced_three_wave",
            title="reduced three-wave interaction",
            J=_rows([["0", "-y + 1/2*d", "z"], ["y - 1/2*d", "0", "0"], ["-z", "0", "0"]], SKEW),
            r_matrix=PolyMat3.diagonal(_p("-1/2*g"), _p("-1/2*g"), _p("2*z")),
            r_denominator=Poly.one(),
            H=_p("x^2 + y^2 + z"),
            V=PolyVec3.zero(),
            params=_params(g=1, d=1),
            reference_rhs=_vec("-2*y^2 + g*x + z + d*y", "2*x*y + g*y - d*x", "-2*x*z - 2*z"),
            expected_energy_rate=_p("2*g*x^2 + 2*g*y^2 - 2*z"),
            expected_divergence=_p("2*g - 2"),
            irrotational=True,
        ),
        ResistiveSystem(
            name="rabinovich",
            title="Rabinovich wave interaction",
            J=_rows([["0", "0", "0"], ["0", "0", "-1/2*x"], ["0", "1/2*x", "0"]], SKEW),
            r_matrix=_rows([["k1", "-q", "-y"], ["-q", "k2", "1/2*x"], ["-y", "1/2*x", "k3"]], SYMMETRIC),
            r_denominator=Poly.one(),
            H=_p("1/2*x^2 + 1/2*y^2 + 1/2*z^2"),
            V=PolyVec3.zero(),
            params=_params(q=1, k1=1, k2=1, k3=1),
            reference_rhs=_vec("q*y - k1*x + y*z", "q*x - k2*y - x*z", "-k3*z + x*y"),
            expected_energy_rate=_p("-k1*x^2 - k2*y^2 - k3*z^2 + 2*q*x*y + x*y*z"),
            expected_divergence=_p("-k1 - k2 - k3"),
            irrotational=True,
        ),
        ResistiveSystem(
            name="chen",
            title="Chen system",
            J=_rows(_LU_J, SKEW),
            r_matrix=_rows([["a^2", "a^2 - a*g", "0"], ["a^2 - a*g", "0", "g*y"], ["0", "g*y", "-b*z"]], SYMMETRIC),
            r_denominator=_p("a"),
            H=_p("1/2*x^2 - a*z"),
            V=PolyVec3.zero(),
            params=_params(a=35, b=3, g=28),
            reference_rhs=_vec("a*y - a*x", "g*x - a*x + g*y - x*z", "x*y - b*z"),
            expected_energy_rate=_p("-a*x^2 + a*b*z"),
            expected_divergence=_p("-a - b + g"),
            irrotational=True,
        ),
        ResistiveSystem(
            name="lu",
            title="Lü system",
            J=_rows(_LU_J, SKEW),
            r_matrix=_rows([["a^2", "0", "0"], ["0", "0", "g*y"], ["0", "g*y", "-b*z"]], SYMMETRIC),
            r_denominator=_p("a"),
            H=_p("1/2*x^2 - a*z"),
            V=PolyVec3.zero(),
            params=_params(a=36, b=3, g=20),
            reference_rhs=_vec("a*y - a*x", "g*y - x*z", "x*y - b*z"),
            expected_energy_rate=_p("-a*x^2 + a*b*z"),
            expected_divergence=_p("-a - b + g"),
            irrotational=True,
        ),
        ResistiveSystem(
            name="modified_lu",
            title="modified Lü system",
            J=_rows(_MODIFIED_LU_J, SKEW),
            r_matrix=_rows(
                [["a^2", "0", "1/2*y*z"], ["0", "0", "g*y"], ["1/2*y*z", "g*y", "-b*z"]], SYMMETRIC
            ),
            r_denominator=_p("a"),
            H=_p("1/2*x^2 - a*z"),
            V=PolyVec3.zero(),
            params=_params(a=36, b=3, g=20),
            reference_rhs=_vec("a*y - a*x + y*z", "g*y - x*z", "x*y - b*z"),
            expected_energy_rate=_p("-a*x^2 + a*b*z + x*y*z"),
            expected_divergence=_p("-a - b + g"),
            irrotational=False,
        ),
        ResistiveSystem(
            name="qi",
            title="Qi system",
            J=_rows(_MODIFIED_LU_J, SKEW),
            r_matrix=_rows(
                [["a^2", "-a*g", "1/2*y*z"], ["-a*g", "0", "-y"], ["1/2*y*z", "-y", "-b*z"]], SYMMETRIC
            ),
            r_denominator=_p("a"),
            H=_p("1/2*x^2 - a*z"),
            V=PolyVec3.zero(),
            params=_params(a=10, b=Fraction(8, 3), g=28),
            reference_rhs=_vec("a*y - a*x + y*z", "g*x - x*z - y", "x*y - b*z"),
            expected_energy_rate=_p("-a*x^2 + a*b*z + x*y*z"),
            expected_divergence=_p("-a - b - 1"),
            irrotational=False,
        ),
        ResistiveSystem(
            name="rlc_circuit",
            title="series RLC circuit (x = charge, y = current)",
            J=_rows([["0", "1", "0"], ["-1", "0", "0"], ["0", "0", "0"]], SKEW),
            r_matrix=_rows([["0", "0", "0"], ["0", "R", "0"], ["0", "0", "0"]], SYMMETRIC),
            r_denominator=_p("L"),
            H=_p("(C*L*y^2 + x^2)/(2*C*L)"),
            V=_vec(0, "(V)/L", 0),
            params=_params(R=1, L=1, C=1, V=0),
            reference_rhs=_vec("y", "(C*V - C*R*y - x)/(C*L)", 0),
            dimension=2,
            expected_energy_rate=_p("(-R*y^2)/L"),
            expected_divergence=_p("(-R)/L"),
        ),
        ResistiveSystem(
            name="euler_rotor",
            title="free Euler rotor (x, y, z = angular momentum)",
            J=_rows(_EULER_J, SKEW),
            r_matrix=PolyMat3.zero(SYMMETRIC),
            r_denominator=Poly.one(),
            H=_p(_EULER_K),
            V=PolyVec3.zero(),
            params=_params(Ix=1, Iy=2, Iz=3),
            reference_rhs=_vec(*_EULER_RHS),
            expected_energy_rate=Poly.zero(),
            expected_divergence=Poly.zero(),
            irrotational=True,
        ),
        ResistiveSystem(
            name="euler_rotor_dissipative",
            title="Euler rotor with isotropic damping",
            J=_rows(_EULER_J, SKEW),
            r_matrix=PolyMat3.identity(Fraction(1, 2)),
            r_denominator=Poly.one(),
            H=_p(_EULER_K),
            V=PolyVec3.zero(),
            params=_params(Ix=1, Iy=2, Iz=3),
            reference_rhs=_vec(
                _p(_EULER_RHS[0]) - _p("(x)/(2*Ix)"),
                _p(_EULER_RHS[1]) - _p("(y)/(2*Iy)"),
                _p(_EULER_RHS[2]) - _p("(z)/(2*Iz)"),
            ),
            expected_energy_rate=_p("(-x^2)/(2*Ix^2)") + _p("(-y^2)/(2*Iy^2)") + _p("(-z^2)/(2*Iz^2)"),
            expected_divergence=_p("(-1)/(2*Ix)") + _p("(-1)/(2*Iy)") + _p("(-1)/(2*Iz)"),
            irrotational=True,
        ),
    ]
    registry = {}
    for sys in entries:
        _check_entry(sys)
        registry[sys.name] = sys
    logger.info(f"Loaded {len(registry)} systems into the registry")
    return registry


def _check_entry(sys: ResistiveSystem) -> None:
    if sys.J.kind != SKEW or sys.R.kind != SYMMETRIC:
        raise StructureError(f"{sys.name}: J must be skew and R symmetric")
    residual = jacobi_residual(sys.J_vector)
    if not residual.is_zero:
        raise StructureError(f"{sys.name}: J fails the Jacobi identity, residual {residual}")
    mismatch = assemble(sys) - sys.reference_rhs
    if not mismatch.is_zero:
        raise StructureError(f"{sys.name}: assembled field differs from the reference by {mismatch}")


REGISTRY: Dict[str, ResistiveSystem] = _build_registry()

ALIASES = {"three_wave": "reduced_three_wave"}


def resolve_name(name: str) -> str:
    name = ALIASES.get(name, name)
    if name not in REGISTRY:
        raise UnknownSystemError(f"unknown system '{name}'; known systems: {', '.join(REGISTRY)}")
    return name


def get_system(name: str) -> ResistiveSystem:
    return REGISTRY[resolve_name(name)]


def list_systems() -> List[str]:
    return list(REGISTRY)
