"""
Derived-system requests shared by the CLI and the HTTP API
"""
import logging
from fractions import Fraction
from typing import Optional, Union

from app.errors import PolyError, StructureError
from app.hamiltonian.bihamiltonian import derive_system, render_derived
from app.hamiltonian.conformal import conformal_field, registered_decomposition, render_conformal
from app.hamiltonian.polyfield import format_poly, parse_poly
from app.hamiltonian.systems import resolve_name
from app.models import DeriveRequest, DerivedSystemResponse

logger = logging.getLogger(__name__)

KINDS = ("biham", "jordan", "conformal")


def parse_delta(text: Optional[Union[str, Fraction]]) -> Optional[Fraction]:
    if text is None or isinstance(text, Fraction):
        return text
    try:
        delta = Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise PolyError(f"delta must be a rational number, got '{text}'")
    if abs(delta) > 1:
        raise PolyError(f"delta must lie in [-1, 1], got {delta}")
    return delta


def _conformal(name: str) -> DerivedSystemResponse:
    decomposition = registered_decomposition(name)
    if decomposition is None:
        raise StructureError(f"no conformal decomposition registered for {name}")
    field = conformal_field(decomposition).substitute(decomposition.bindings)
    return DerivedSystemResponse(
        source=name,
        kind="conformal",
        G=format_poly(decomposition.H.substitute(decomposition.bindings)),
        rhs=[format_poly(p) for p in field],
        text=render_conformal(decomposition),
    )


def derive(request: DeriveRequest) -> DerivedSystemResponse:
    name = resolve_name(request.system)
    if request.kind == "conformal":
        return _conformal(name)
    G = parse_poly(request.G) if request.G else None
    derived = derive_system(name, G=G, kind=request.kind, delta=parse_delta(request.delta))
    return DerivedSystemResponse(
        source=derived.source,
        kind=derived.kind,
        N=str(derived.N),
        G=format_poly(derived.G),
        Gbar=None if derived.Gbar is None else str(derived.Gbar),
        M=None if derived.M is None else str(derived.M),
        rhs=[format_poly(p) for p in derived.rhs],
        text=render_derived(derived),
    )
