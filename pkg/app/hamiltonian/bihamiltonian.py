"""
Jordan-product Poisson matrices N = JR + RJ and the bi-Hamiltonian systems they generate
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
import sympy

from app.config import get_settings
from app.errors import NotPoissonError, PolyError, StructureError
from app.hamiltonian.closed_form import ClosedForm, as_mapping, sample_points
from app.hamiltonian.polyfield import (
    RADICAL,
    RADICAL_BASE,
    SKEW,
    SYMMETRIC,
    Poly,
    PolyLike,
    PolyMat3,
    PolyVec3,
    as_poly,
    compile_field,
    compile_poly,
    compatibility_residuals,
    cross,
    divergence,
    dot,
    format_poly,
    grad,
    jacobi_residual,
    parse_poly,
    skew_to_vec,
    vec_to_skew,
)
from app.hamiltonian.systems import ResistiveSystem, get_system, resolve_name
from app.models import ExactnessReport, JordanIdentityReport, Prop41Report

logger = logging.getLogger(__name__)

Scalar = Union[Poly, ClosedForm]


def jordan_product(a: PolyMat3, b: PolyMat3) -> PolyMat3:
    """Unscaled symmetrized product ab + ba"""
    return (a @ b) + (b @ a)


def jordan_anticommutator(J: PolyMat3, R: PolyMat3) -> PolyMat3:
    if J.kind != SKEW or R.kind != SYMMETRIC:
        raise StructureError("the anticommutator needs a skew J and a symmetric R")
    try:
        return jordan_product(J, R).with_kind(SKEW)
    except StructureError as e:
        raise StructureError(f"internal error: JR + RJ is not skew-symmetric ({e})")


def n_components(J: PolyVec3, R: PolyMat3) -> PolyVec3:
    """Component formulas for the Poisson vector of JR + RJ"""
    if R.kind != SYMMETRIC:
        raise StructureError("n_components needs a symmetric R")
    r1, r2, r3 = R[0][0], R[1][1], R[2][2]
    a, b, c = R[0][1], R[0][2], R[1][2]
    return PolyVec3(
        J.x * (r2 + r3) - J.y * a - J.z * b,
        J.y * (r1 + r3) - J.x * a - J.z * c,
        J.z * (r1 + r2) - J.x * b - J.y * c,
    )


# The free rotor has R = 0; its Nambu form uses the factorization with R = I/2.
_FACTORIZED_RESISTANCE = {
    "euler_rotor": PolyMat3.identity(Fraction(1, 2)),
}


def jordan_resistance(sys: ResistiveSystem) -> PolyMat3:
    return _FACTORIZED_RESISTANCE.get(sys.name, sys.R)


def n_vector(sys: ResistiveSystem) -> PolyVec3:
    return n_components(sys.J_vector, jordan_resistance(sys))


def n_jacobi_residual(sys_name: str) -> Poly:
    return jacobi_residual(n_vector(get_system(sys_name)))


@dataclass(frozen=True)
class Prop41Expectation:
    kind: str
    constraint: Dict[str, str] = field(default_factory=dict)
    generic_point: Dict[str, Fraction] = field(default_factory=dict)


PROP41: Dict[str, Prop41Expectation] = {
    "reduced_three_wave": Prop41Expectation("unconditional"),
    "lu": Prop41Expectation("unconditional"),
    "rabinovich": Prop41Expectation("constrained", {"k2": "-k3"}, {"k2": Fraction(1), "k3": Fraction(1)}),
    "chen": Prop41Expectation("constrained", {"g": "a"}, {"a": Fraction(2), "g": Fraction(1)}),
    "modified_lu": Prop41Expectation("never", {}, {"a": Fraction(2), "b": Fraction(3), "g": Fraction(5)}),
    "qi": Prop41Expectation("never", {}, {"a": Fraction(2), "b": Fraction(3), "g": Fraction(5)}),
}


def _format_bindings(bindings: Mapping[str, PolyLike]) -> str:
    return ",".join(f"{name}={format_poly(as_poly(value), spaced=False)}" for name, value in bindings.items())


def classify_prop41(sys_name: str) -> Prop41Report:
    """Reproduce the Jacobi classification by substituting each constraint and testing a generic point"""
    name = resolve_name(sys_name)
    if name not in PROP41:
        raise StructureError(f"no Jacobi classification recorded for {name}")
    expected = PROP41[name]
    residual = n_jacobi_residual(name)
    report = dict(
        system=name,
        expectation=expected.kind,
        residual=format_poly(residual, spaced=False),
        generic_point={k: str(v) for k, v in expected.generic_point.items()},
    )
    if expected.kind == "unconditional":
        return Prop41Report(**report, passed=residual.is_zero)

    nonzero = not residual.substitute(expected.generic_point).is_zero
    if expected.kind == "constrained":
        collapsed = residual.substitute(expected.constraint).is_zero
        return Prop41Report(
            **report,
            constraint=_format_bindings(expected.constraint),
            zero_under_constraint=collapsed,
            nonzero_at_generic=nonzero,
            passed=(not residual.is_zero) and collapsed and nonzero,
        )
    return Prop41Report(**report, nonzero_at_generic=nonzero, passed=nonzero)


def generate_biham(N: PolyVec3, G: PolyLike) -> PolyVec3:
    """N x grad G, checked against the matrix form"""
    residual = jacobi_residual(N)
    if not residual.is_zero:
        raise NotPoissonError(f"N is not a Poisson vector: Jacobi residual {residual}", residual)
    gradient = grad(as_poly(G))
    rhs = cross(N, gradient)
    if rhs != vec_to_skew(N).mat_vec(gradient):
        raise StructureError("internal error: cross product and skew matrix disagree")
    return rhs


def nambu_bracket(F: PolyLike, Gbar: PolyLike, G: PolyLike, M: PolyLike = 1) -> Poly:
    M = as_poly(M)
    if M.is_zero or M.depends_on_variables:
        raise PolyError("the Nambu bracket needs a nonzero constant multiplier; evaluate numerically instead")
    triple = dot(grad(as_poly(F)), cross(grad(as_poly(Gbar)), grad(as_poly(G))))
    return triple / M


def second_poisson_vector(G: PolyLike, M: PolyLike = 1) -> PolyVec3:
    """grad G / M for a constant multiplier"""
    M = as_poly(M)
    if M.is_zero or M.depends_on_variables:
        raise PolyError("second Poisson vector needs a nonzero constant multiplier")
    return grad(as_poly(G)).divide(M)


def factorize_check(N: PolyMat3, J: PolyMat3, R: PolyMat3) -> bool:
    return N == jordan_anticommutator(J, R)


def euler_factorization(sys_name: str = "euler_rotor") -> bool:
    """The rotor's Nambu matrix grad(L^2)/2 equals J R + R J with R = I/2"""
    sys = get_system(sys_name)
    nambu = vec_to_skew(grad(parse_poly("x^2 + y^2 + z^2")).divide(2))
    return factorize_check(nambu, sys.J, PolyMat3.identity(Fraction(1, 2)))


# exactness


def verify_exactness_symbolic(N: PolyVec3, Gbar: Poly, M: Poly) -> bool:
    """M N = grad Gbar as an exact polynomial identity"""
    return N.scale(M) == grad(Gbar)


def verify_exactness(
    N: PolyVec3,
    Gbar: Scalar,
    M: Scalar,
    samples: Sequence[Sequence[float]],
    bindings: Optional[Mapping[str, float]] = None,
    tolerance: Optional[float] = None,
) -> ExactnessReport:
    tolerance = get_settings().exactness_tol if tolerance is None else tolerance
    gbar = Gbar if isinstance(Gbar, ClosedForm) else ClosedForm.from_poly(Gbar)
    multiplier = M if isinstance(M, ClosedForm) else ClosedForm.from_poly(M)
    components = [compile_poly(p, {k: v for k, v in (bindings or {}).items()}) for p in N]
    worst, evaluated, skipped = 0.0, 0, []
    for sample in samples:
        point = as_mapping(sample, bindings)
        m = multiplier.evaluate(point)
        g = gbar.evaluate_gradient(point)
        if not np.isfinite(m) or not np.all(np.isfinite(g)) or m == 0.0:
            skipped.append(f"singular at ({sample[0]:.6g}, {sample[1]:.6g}, {sample[2]:.6g})")
            continue
        n = np.array([c(sample) for c in components])
        scale = max(float(np.max(np.abs(g))), 1e-300)
        worst = max(worst, float(np.max(np.abs(m * n - g))) / scale)
        evaluated += 1
    if skipped:
        logger.warning(f"Skipped {len(skipped)} singular sample points")
    return ExactnessReport(
        max_relative_error=worst,
        tolerance=tolerance,
        evaluated=evaluated,
        skipped=skipped,
        passed=evaluated > 0 and worst < tolerance,
    )


def induced_n(Gbar: ClosedForm, M: ClosedForm, samples: Sequence[Sequence[float]], bindings: Mapping[str, float]) -> np.ndarray:
    """grad Gbar / M at every sample"""
    rows = []
    for sample in samples:
        point = as_mapping(sample, bindings)
        rows.append(Gbar.evaluate_gradient(point) / M.evaluate(point))
    return np.array(rows)


def last_multiplier_residual(
    rhs: PolyVec3,
    M: ClosedForm,
    samples: Sequence[Sequence[float]],
    bindings: Mapping[str, float],
) -> float:
    """Largest relative value of div(M rhs) = grad M . rhs + M div rhs over the samples"""
    field_fn = compile_field(rhs, bindings)
    div_fn = compile_poly(divergence(rhs), bindings)
    worst = 0.0
    for sample in samples:
        point = as_mapping(sample, bindings)
        flow = field_fn(0.0, sample)
        transport = float(np.dot(M.evaluate_gradient(point), flow))
        source = M.evaluate(point) * div_fn(sample)
        scale = abs(transport) + abs(source)
        if scale == 0.0 or not np.isfinite(scale):
            continue
        worst = max(worst, abs(transport + source) / scale)
    return worst


@lru_cache()
def three_wave_closed_forms() -> Tuple[ClosedForm, ClosedForm]:
    """Separated solution Gbar and last multiplier M of the three-wave Poisson vector (real branch)"""
    y, z, g, d, lam = sympy.symbols("y z g d lam")
    u = 2 * y - d
    w = 1 - g / (4 * z)
    v = g * z - 4 * z ** 2
    p, r = -lam / g, 2 * lam / g
    gbar = sympy.Abs(u) ** p * sympy.Abs(w) ** r
    gbar_form = ClosedForm(
        gbar,
        [sympy.Integer(0), gbar * p * 2 / u, gbar * r * g / (4 * z ** 2) / w],
        "|2*y - d|^(-lam/g)*|1 - g/(4*z)|^(2*lam/g)",
    )
    m = 4 * lam * gbar / (g * v * u)
    m_form = ClosedForm(
        m,
        [sympy.Integer(0), m * (2 * p / u - 2 / u), m * (r * g / (4 * z ** 2 * w) - (g - 8 * z) / v)],
        "4*lam*Gbar/(g*(g*z - 4*z^2)*(2*y - d))",
    )
    bindings = {"g": 1.0, "d": 1.0, "lam": 1.0}
    points = [as_mapping(s, bindings) for s in three_wave_samples(1.0, 1.0, count=12, margin=0.05)]
    gbar_form.validate(points)
    m_form.validate(points)
    return gbar_form, m_form


def three_wave_samples(
    g: float, d: float, count: Optional[int] = None, margin: float = 1e-3
) -> List[np.ndarray]:
    def singular(point: np.ndarray) -> bool:
        _, y, z = point
        return abs(2 * y - d) < margin or abs(z) < margin or abs(z - g / 4) < margin

    return sample_points(count=count, exclude=singular)


# Jordan identity and Jordan-like transformations


def jordan_identity_check(J: PolyMat3, R: PolyMat3) -> JordanIdentityReport:
    """Check the Jordan-like identity with juxtaposition read as matrix product and as Jordan product"""
    JJ, RR = J @ J, R @ R
    jJJ, jRR = jordan_product(J, J), jordan_product(R, R)
    return JordanIdentityReport(
        identities={
            "matrix.first": (J @ R) @ JJ == J @ (R @ JJ),
            "matrix.second": (R @ J) @ RR == R @ (J @ RR),
            "jordan.first": jordan_product(jordan_product(J, R), jJJ) == jordan_product(J, jordan_product(R, jJJ)),
            "jordan.second": jordan_product(jordan_product(R, J), jRR) == jordan_product(R, jordan_product(J, jRR)),
        }
    )


def generic_pair() -> Tuple[PolyMat3, PolyMat3]:
    """Skew J and symmetric R whose nine entries are independent symbols"""
    jx, jy, jz, r1, r2, r3, ra, rb, rc = (Poly.symbol(n) for n in ("jx", "jy", "jz", "r1", "r2", "r3", "ra", "rb", "rc"))
    J = vec_to_skew(PolyVec3(jx, jy, jz))
    R = PolyMat3(((r1, ra, rb), (ra, r2, rc), (rb, rc, r3)), SYMMETRIC)
    return J, R


@dataclass(frozen=True)
class OrthoMat3:
    matrix: PolyMat3

    def __post_init__(self):
        if self.matrix.transpose() @ self.matrix != PolyMat3.identity():
            raise StructureError("transformation matrix is not orthogonal")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[PolyLike]]) -> "OrthoMat3":
        return cls(PolyMat3.from_rows(rows))

    def conjugate(self, m: PolyMat3) -> PolyMat3:
        """T m T^T"""
        return self.matrix @ m @ self.matrix.transpose()


def delta_rotation() -> OrthoMat3:
    """Rotation in the y-z plane with cosine D and sine s = sqrt(1 - D^2)"""
    return OrthoMat3.from_rows([[1, 0, 0], [0, RADICAL_BASE, f"-{RADICAL}"], [0, RADICAL, RADICAL_BASE]])


def jordan_transform(J: PolyMat3, R: PolyMat3, T: OrthoMat3) -> Tuple[PolyMat3, PolyMat3, PolyMat3]:
    Jp = T.conjugate(J).with_kind(SKEW)
    Rp = T.conjugate(R).with_kind(SYMMETRIC)
    Np = jordan_anticommutator(Jp, Rp)
    if Np != T.conjugate(jordan_anticommutator(J, R)):
        raise StructureError("internal error: transformed anticommutator differs from T N T^T")
    return Jp, Rp, Np


def delta_bindings(delta: Fraction) -> Dict[str, Fraction]:
    """Values of D and, when rational, of s = sqrt(1 - D^2)"""
    delta = Fraction(delta)
    if abs(delta) > 1:
        raise StructureError("delta must lie in [-1, 1]")
    square = 1 - delta ** 2
    root = sympy.sqrt(sympy.Rational(square.numerator, square.denominator))
    bindings = {RADICAL_BASE: delta}
    if root.is_Rational:
        bindings[RADICAL] = Fraction(int(root.p), int(root.q))
    return bindings


# derived systems


@dataclass(frozen=True)
class DerivedBiHamiltonian:
    source: str
    kind: str
    N: PolyVec3
    G: Poly
    Gbar: Optional[Scalar]
    M: Optional[Scalar]
    rhs: PolyVec3
    constraint: Tuple[Tuple[str, Poly], ...] = ()

    @property
    def conserved_exactly(self) -> bool:
        if not dot(grad(self.G), self.rhs).is_zero:
            return False
        if isinstance(self.Gbar, Poly) and isinstance(self.M, Poly) and not self.M.depends_on_variables:
            return dot(grad(self.Gbar), self.rhs).is_zero
        return True


@dataclass(frozen=True)
class _Derivation:
    constraint: Dict[str, str] = field(default_factory=dict)
    G: Optional[str] = None
    Gbar: Optional[str] = None
    M: Optional[str] = None
    closed_form: bool = False


_DERIVATIONS: Dict[str, _Derivation] = {
    "reduced_three_wave": _Derivation(G="x^2 + y^2 + z", closed_form=True),
    "lu": _Derivation(
        constraint={"g": "b"},
        G="1/2*x^2 - a*z",
        Gbar="(-a^2*y^2 - a^2*z^2 + 2*b*y^2*z)/(2*a)",
        M="1",
    ),
    "rabinovich": _Derivation(constraint={"k2": "-k3"}),
    "chen": _Derivation(constraint={"g": "a"}),
    "euler_rotor": _Derivation(Gbar="x^2 + y^2 + z^2", M="2"),
    "euler_rotor_dissipative": _Derivation(Gbar="x^2 + y^2 + z^2", M="2"),
}


def default_G(sys_name: str) -> Poly:
    name = resolve_name(sys_name)
    recipe = _DERIVATIONS.get(name)
    if recipe is not None and recipe.G is not None:
        return parse_poly(recipe.G)
    return get_system(name).H


def _base_derivation(name: str, G: Optional[PolyLike]):
    sys = get_system(name)
    recipe = _DERIVATIONS.get(name, _Derivation())
    constraint = {k: parse_poly(v) for k, v in recipe.constraint.items()}
    N = n_vector(sys).substitute(constraint)
    G = default_G(name) if G is None else as_poly(G)
    G = G.substitute(constraint)
    if recipe.closed_form:
        Gbar, M = three_wave_closed_forms()
    else:
        Gbar = parse_poly(recipe.Gbar) if recipe.Gbar else None
        M = parse_poly(recipe.M) if recipe.M else None
    return sys, constraint, N, G, Gbar, M


def derive_system(
    sys_name: str,
    G: Optional[PolyLike] = None,
    kind: str = "biham",
    delta: Optional[Fraction] = None,
) -> DerivedBiHamiltonian:
    """Bi-Hamiltonian system N x grad G of a registry entry, optionally after the Jordan-like rotation"""
    name = resolve_name(sys_name)
    sys, constraint, N, G, Gbar, M = _base_derivation(name, G)
    if kind == "jordan":
        T = delta_rotation()
        R = jordan_resistance(sys).substitute(constraint)
        _, _, Np = jordan_transform(sys.J.substitute(constraint), R, T)
        rotated = skew_to_vec(Np)
        if delta is not None:
            rotated = rotated.substitute(delta_bindings(delta))
        if rotated != N:
            Gbar, M = None, None
        N = rotated
    elif kind != "biham":
        raise StructureError(f"unknown derivation kind '{kind}'")
    rhs = generate_biham(N, G)
    derived = DerivedBiHamiltonian(
        source=name,
        kind=kind,
        N=N,
        G=G,
        Gbar=Gbar,
        M=M,
        rhs=rhs,
        constraint=tuple(constraint.items()),
    )
    if not derived.conserved_exactly:
        raise StructureError(f"internal error: derived system of {name} does not conserve its Hamiltonians")
    logger.info(f"Derived {kind} system from {name}")
    return derived


def _format_scalar(value: Optional[Scalar]) -> str:
    if value is None:
        return "n/a"
    return format_poly(value) if isinstance(value, Poly) else str(value)


def render_derived(derived: DerivedBiHamiltonian) -> str:
    lines = [f"# source={derived.source}"]
    if derived.constraint:
        lines.append(f"# constraint={_format_bindings(dict(derived.constraint))}")
    if any(RADICAL in p.symbols for p in derived.rhs):
        lines.append(f"# {RADICAL}=sqrt(1-{RADICAL_BASE}^2)")
    lines += [
        f"# N={derived.N}",
        f"# G={format_poly(derived.G)}",
        f"# Gbar={_format_scalar(derived.Gbar)}",
        f"# M={_format_scalar(derived.M)}",
    ]
    for var, component in zip("xyz", derived.rhs):
        lines.append(f"d{var}/dt = {format_poly(component)}")
    return "\n".join(lines) + "\n"


def compatibility_of(derived: DerivedBiHamiltonian) -> Tuple[Poly, Poly]:
    """Compatibility residuals of N with the second Poisson vector grad G"""
    return compatibility_residuals(derived.N, second_poisson_vector(derived.G))
