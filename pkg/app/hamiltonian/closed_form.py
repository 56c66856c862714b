"""
Closed-form scalar functions that are not polynomials (separation-of-variables answers)
Evaluated in floating point through sympy.lambdify, gradients supplied analytically
"""
import logging
from typing import Callable, Iterable, List, Mapping, Optional, Sequence

import numpy as np
import sympy
from scipy.stats import qmc

from app.config import get_settings
from app.errors import PolyError, StructureError
from app.hamiltonian.polyfield import VARIABLES, Poly, format_poly, grad

logger = logging.getLogger(__name__)

_VARIABLE_SYMBOLS = tuple(sympy.Symbol(name) for name in VARIABLES)


class ClosedForm:
    """Scalar expression with an analytic gradient"""

    def __init__(self, expr: sympy.Expr, gradient: Optional[Sequence[sympy.Expr]] = None, label: Optional[str] = None):
        self.expr = sympy.sympify(expr)
        if gradient is None:
            gradient = [sympy.diff(self.expr, symbol) for symbol in _VARIABLE_SYMBOLS]
        if len(gradient) != 3:
            raise StructureError("a closed form needs exactly three gradient components")
        self.gradient = tuple(sympy.sympify(g) for g in gradient)
        self.label = label or sympy.sstr(self.expr)
        free = set(self.expr.free_symbols)
        for g in self.gradient:
            free |= g.free_symbols
        self.symbols = tuple(sorted(str(s) for s in free | set(_VARIABLE_SYMBOLS)))
        args = [sympy.Symbol(name) for name in self.symbols]
        self._value = sympy.lambdify(args, self.expr, modules="numpy")
        self._gradient = [sympy.lambdify(args, g, modules="numpy") for g in self.gradient]

    @classmethod
    def from_poly(cls, p: Poly) -> "ClosedForm":
        return cls(p.to_expr(), [component.to_expr() for component in grad(p)], format_poly(p))

    def __str__(self) -> str:
        return self.label

    def __repr__(self) -> str:
        return f"ClosedForm('{self.label}')"

    def _args(self, point: Mapping[str, float]) -> List[float]:
        missing = [name for name in self.symbols if name not in point]
        if missing:
            raise PolyError(f"unbound symbol '{missing[0]}' in {self.label}", symbol=missing[0])
        return [float(point[name]) for name in self.symbols]

    def evaluate(self, point: Mapping[str, float]) -> float:
        with np.errstate(all="ignore"):
            return float(self._value(*self._args(point)))

    def evaluate_gradient(self, point: Mapping[str, float]) -> np.ndarray:
        args = self._args(point)
        with np.errstate(all="ignore"):
            return np.array([float(g(*args)) for g in self._gradient])

    def bind(self, bindings: Mapping[str, float]) -> "ClosedForm":
        """Fix parameter values, leaving x, y, z free"""
        values = {sympy.Symbol(name): sympy.nsimplify(value) for name, value in bindings.items()}
        return ClosedForm(
            self.expr.xreplace(values),
            [g.xreplace(values) for g in self.gradient],
            self.label,
        )

    def finite_difference_error(self, point: Mapping[str, float], step: float = 1e-5) -> float:
        """Largest relative disagreement between the analytic gradient and central differences"""
        analytic = self.evaluate_gradient(point)
        scale = max(float(np.max(np.abs(analytic))), 1e-300)
        worst = 0.0
        for i, name in enumerate(VARIABLES):
            h = step * max(1.0, abs(float(point[name])))
            ahead = dict(point, **{name: float(point[name]) + h})
            behind = dict(point, **{name: float(point[name]) - h})
            numeric = (self.evaluate(ahead) - self.evaluate(behind)) / (2 * h)
            worst = max(worst, abs(numeric - analytic[i]) / scale)
        return worst

    def validate(self, points: Iterable[Mapping[str, float]], rel_tol: float = 1e-6) -> float:
        worst = 0.0
        for point in points:
            error = self.finite_difference_error(point)
            if not np.isfinite(error):
                continue
            worst = max(worst, error)
            if error > rel_tol:
                raise StructureError(
                    f"gradient of {self.label} disagrees with finite differences at {dict(point)} "
                    f"(relative error {error:.3e})"
                )
        logger.debug(f"Validated gradient of {self.label}: max relative error {worst:.3e}")
        return worst


def sample_points(
    count: Optional[int] = None,
    seed: Optional[int] = None,
    low: float = 0.1,
    high: float = 2.0,
    exclude: Optional[Callable[[np.ndarray], bool]] = None,
) -> List[np.ndarray]:
    """Deterministic scrambled-Halton points in the cube [low, high]^3"""
    settings = get_settings()
    count = settings.sample_count if count is None else count
    seed = settings.sample_seed if seed is None else seed
    sampler = qmc.Halton(d=3, scramble=True, seed=seed)
    points: List[np.ndarray] = []
    while len(points) < count:
        batch = qmc.scale(sampler.random(64), [low] * 3, [high] * 3)
        for point in batch:
            if exclude is not None and exclude(point):
                continue
            points.append(point)
            if len(points) == count:
                break
    return points


def as_mapping(point: Sequence[float], bindings: Optional[Mapping[str, float]] = None) -> dict:
    mapping = dict(bindings or {})
    mapping.update({name: float(value) for name, value in zip(VARIABLES, point)})
    return mapping
