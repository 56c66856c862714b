"""
Exact polynomial field over the dynamical variables x, y, z and named parameters
Polynomials, 3-vectors and 3x3 matrices with the vector calculus shared by the whole package
"""
import logging
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
import sympy

from app.config import get_settings
from app.errors import PolyError, StructureError

logger = logging.getLogger(__name__)

VARIABLES = ("x", "y", "z")
_VARIABLE_SYMBOLS = tuple(sympy.Symbol(name) for name in VARIABLES)

# s stands for sqrt(1 - D^2); canonical forms never carry s^2 or higher
RADICAL = "s"
RADICAL_BASE = "D"

# ASCII spelling used on the command line and in every text output
PARAMETER_SPELLINGS: Dict[str, str] = {
    "a": "α",
    "b": "β",
    "g": "γ",
    "d": "δ",
    "k1": "k₁",
    "k2": "k₂",
    "k3": "k₃",
    "q": "q",
    "D": "Δ",
    "lam": "λ",
    "s": "√(1−Δ²)",
    "R": "R",
    "L": "L",
    "C": "C",
    "V": "V",
    "Ix": "I_x",
    "Iy": "I_y",
    "Iz": "I_z",
}

MAX_TERMS = get_settings().max_terms

_NAME = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")

GENERAL = "general"
SKEW = "skew"
SYMMETRIC = "symmetric"
_KINDS = (GENERAL, SKEW, SYMMETRIC)

Scalar = Union[int, Fraction]
Monomial = Tuple[Tuple[str, int], ...]


def _gens(parameters: Iterable[str]) -> Tuple[sympy.Symbol, ...]:
    extra = sorted(set(parameters) - set(VARIABLES))
    return _VARIABLE_SYMBOLS + tuple(sympy.Symbol(name) for name in extra)


def _zero_rep() -> sympy.Poly:
    return sympy.Poly(0, *_VARIABLE_SYMBOLS, domain=sympy.QQ)


def _monomial_rep(exponents: Mapping[str, int], coefficient: Fraction = Fraction(1)) -> sympy.Poly:
    gens = _gens(exponents)
    names = [str(g) for g in gens]
    monom = tuple(exponents.get(name, 0) for name in names)
    value = sympy.Rational(coefficient.numerator, coefficient.denominator)
    return sympy.Poly.from_dict({monom: value}, *gens, domain=sympy.QQ)


def _reduce_radical(num: sympy.Poly) -> sympy.Poly:
    symbol = sympy.Symbol(RADICAL)
    if symbol not in num.gens or num.degree(symbol) < 2:
        return num
    idx = num.gens.index(symbol)
    square = sympy.Poly(1 - sympy.Symbol(RADICAL_BASE) ** 2, *_gens([RADICAL_BASE]), domain=sympy.QQ)
    reduced = _zero_rep()
    for monom, coeff in num.as_dict().items():
        power = monom[idx]
        base = sympy.Poly.from_dict(
            {monom[:idx] + (power % 2,) + monom[idx + 1:]: coeff}, *num.gens, domain=sympy.QQ
        )
        reduced = reduced + base * square ** (power // 2)
    return reduced


def _divide_out(num: sympy.Poly, name: str, power: int) -> sympy.Poly:
    idx = num.gens.index(sympy.Symbol(name))
    data = {m[:idx] + (m[idx] - power,) + m[idx + 1:]: c for m, c in num.as_dict().items()}
    return sympy.Poly.from_dict(data, *num.gens, domain=sympy.QQ)


def _min_exponent(num: sympy.Poly, name: str) -> int:
    symbol = sympy.Symbol(name)
    if symbol not in num.gens:
        return 0
    idx = num.gens.index(symbol)
    return min(m[idx] for m in num.monoms())


class Poly:
    """Exact polynomial in x, y, z with rational coefficients and an optional parameter-monomial denominator"""

    __slots__ = ("_num", "_den", "_key")

    def __init__(self, num: sympy.Poly, den: Optional[Mapping[str, int]] = None):
        num = _reduce_radical(num)
        denominator = {name: e for name, e in (den or {}).items() if e}
        if num.is_zero:
            denominator = {}
        for name in list(denominator):
            power = min(denominator[name], _min_exponent(num, name))
            if power:
                num = _divide_out(num, name, power)
                denominator[name] -= power
                if not denominator[name]:
                    del denominator[name]
        if num.length() > MAX_TERMS:
            raise PolyError(f"polynomial exceeds {MAX_TERMS} terms")
        self._num = num
        self._den: Monomial = tuple(sorted(denominator.items()))
        self._key = None

    # construction

    @classmethod
    def constant(cls, value: Scalar) -> "Poly":
        value = Fraction(value)
        if value == 0:
            return cls(_zero_rep())
        return cls(_monomial_rep({}, value))

    @classmethod
    def symbol(cls, name: str) -> "Poly":
        if not _NAME.match(name):
            raise PolyError(f"invalid symbol name '{name}'", symbol=name)
        return cls(_monomial_rep({name: 1}))

    @classmethod
    def zero(cls) -> "Poly":
        return cls(_zero_rep())

    @classmethod
    def one(cls) -> "Poly":
        return cls.constant(1)

    # canonical data

    def _canonical_key(self) -> Tuple[Tuple[Tuple[Monomial, Tuple[int, int]], ...], Monomial]:
        if self._key is None:
            names = [str(g) for g in self._num.gens]
            items = []
            if not self._num.is_zero:
                for monom, coeff in self._num.terms():
                    if coeff == 0:
                        continue
                    mono = tuple(sorted((names[i], e) for i, e in enumerate(monom) if e))
                    items.append((mono, (int(coeff.p), int(coeff.q))))
            self._key = (tuple(sorted(items)), self._den)
        return self._key

    def terms(self) -> List[Tuple[Dict[str, int], Fraction]]:
        """Numerator terms as (exponent map, coefficient)"""
        return [(dict(mono), Fraction(p, q)) for mono, (p, q) in self._canonical_key()[0]]

    @property
    def denominator(self) -> Dict[str, int]:
        return dict(self._den)

    @property
    def numerator(self) -> "Poly":
        return Poly(self._num)

    @property
    def is_zero(self) -> bool:
        return self._num.is_zero

    @property
    def symbols(self) -> frozenset:
        names = {name for mono, _ in self._canonical_key()[0] for name, _ in mono}
        return frozenset(names | {name for name, _ in self._den})

    @property
    def parameters(self) -> frozenset:
        return frozenset(name for name in self.symbols if name not in VARIABLES)

    @property
    def depends_on_variables(self) -> bool:
        return any(name in VARIABLES for name in self.symbols)

    @property
    def is_constant(self) -> bool:
        return not self.symbols

    def length(self) -> int:
        return len(self._canonical_key()[0])

    def total_degree(self) -> int:
        return max((sum(e for _, e in mono) for mono, _ in self._canonical_key()[0]), default=0)

    def constant_value(self) -> Fraction:
        if not self.is_constant:
            raise PolyError(f"{format_poly(self)} is not a rational constant")
        terms = self.terms()
        return terms[0][1] if terms else Fraction(0)

    def as_parameter_monomial(self) -> Tuple[Fraction, Dict[str, int], Dict[str, int]]:
        """Split a single-term parameter expression into (coefficient, numerator exps, denominator exps)"""
        terms = self.terms()
        if len(terms) != 1 or any(name in VARIABLES for name in terms[0][0]):
            raise PolyError(f"{format_poly(self)} is not a parameter monomial")
        exps, coeff = terms[0]
        return coeff, exps, self.denominator

    # arithmetic

    @staticmethod
    def _coerce(other) -> "Poly":
        if isinstance(other, Poly):
            return other
        if isinstance(other, (int, Fraction)):
            return Poly.constant(other)
        if isinstance(other, str):
            return parse_poly(other)
        raise TypeError(f"cannot combine Poly with {type(other).__name__}")

    def __add__(self, other) -> "Poly":
        other = self._coerce(other)
        if self._den == other._den:
            return Poly(self._num + other._num, dict(self._den))
        mine, theirs = dict(self._den), dict(other._den)
        common = {name: max(mine.get(name, 0), theirs.get(name, 0)) for name in set(mine) | set(theirs)}
        lift_mine = {name: e - mine.get(name, 0) for name, e in common.items()}
        lift_theirs = {name: e - theirs.get(name, 0) for name, e in common.items()}
        num = self._num * _monomial_rep(lift_mine) + other._num * _monomial_rep(lift_theirs)
        return Poly(num, common)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly(-self._num, dict(self._den))

    def __sub__(self, other) -> "Poly":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "Poly":
        return self._coerce(other) + (-self)

    def __mul__(self, other) -> "Poly":
        other = self._coerce(other)
        den = dict(self._den)
        for name, e in other._den:
            den[name] = den.get(name, 0) + e
        return Poly(self._num * other._num, den)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Poly":
        other = self._coerce(other)
        if other.is_zero:
            raise PolyError("division by zero")
        coeff, exps, den_exps = other.as_parameter_monomial()
        den = dict(self._den)
        for name, e in exps.items():
            den[name] = den.get(name, 0) + e
        num = self._num * _monomial_rep(den_exps, 1 / coeff)
        return Poly(num, den)

    def __rtruediv__(self, other) -> "Poly":
        return self._coerce(other) / self

    def __pow__(self, exponent: int) -> "Poly":
        if not isinstance(exponent, int) or exponent < 0:
            raise PolyError("polynomial powers must be non-negative integers")
        result, base = Poly.one(), self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction, str)):
            other = self._coerce(other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self._canonical_key() == other._canonical_key()

    def __hash__(self) -> int:
        return hash(self._canonical_key())

    def __repr__(self) -> str:
        return f"Poly('{format_poly(self)}')"

    def __str__(self) -> str:
        return format_poly(self)

    # calculus and evaluation

    def diff(self, var: str) -> "Poly":
        if var not in VARIABLES:
            raise PolyError(f"cannot differentiate by parameter '{var}'", symbol=var)
        symbol = sympy.Symbol(var)
        if symbol not in self._num.gens:
            return Poly.zero()
        return Poly(self._num.diff(symbol), dict(self._den))

    def substitute(self, bindings: Mapping[str, Union[Scalar, "Poly", str]]) -> "Poly":
        """Replace symbols by rationals or polynomials; every denominator must stay a parameter monomial"""
        if not bindings:
            return self
        values = {name: self._coerce(value) for name, value in bindings.items()}

        def power_product(exps: Mapping[str, int]) -> Poly:
            result = Poly.one()
            for name, e in exps.items():
                factor = values[name] if name in values else Poly.symbol(name)
                result = result * factor ** e
            return result

        num = Poly.zero()
        for exps, coeff in self.terms():
            num = num + power_product(exps) * coeff
        den = power_product(self.denominator)
        if den.is_zero:
            raise PolyError("denominator parameter bound to 0")
        return num / den

    def evaluate(self, point: Mapping[str, Union[Scalar, float]]) -> Union[Fraction, float]:
        """Exact value for rational bindings, float value as soon as one binding is a float"""
        missing = sorted(self.symbols - set(point))
        if missing:
            raise PolyError(f"unbound symbol '{missing[0]}'", symbol=missing[0])
        float_mode = any(isinstance(v, float) for v in point.values())
        convert = float if float_mode else Fraction
        den = convert(1)
        for name, e in self._den:
            den *= convert(point[name]) ** e
        if den == 0:
            raise PolyError(f"denominator parameter bound to 0 in {format_poly(self)}")
        values = []
        for exps, coeff in self.terms():
            value = convert(coeff)
            for name, e in exps.items():
                value *= convert(point[name]) ** e
            values.append(value)
        total = math.fsum(values) if float_mode else sum(values, Fraction(0))
        return total / den

    def to_expr(self) -> sympy.Expr:
        den = sympy.Mul(*[sympy.Symbol(name) ** e for name, e in self._den])
        return self._num.as_expr() / den


PolyLike = Union[Poly, Scalar, str]


def as_poly(value: PolyLike) -> Poly:
    return Poly._coerce(value)


def variables() -> Tuple[Poly, Poly, Poly]:
    return tuple(Poly.symbol(name) for name in VARIABLES)


def parameters(names: str) -> Tuple[Poly, ...]:
    return tuple(Poly.symbol(name) for name in names.split())


def arith(p: Poly, q: Poly, op: str) -> Poly:
    if op == "add":
        return p + q
    if op == "sub":
        return p - q
    if op == "mul":
        return p * q
    raise PolyError(f"unknown arithmetic operation '{op}'")


def diff(p: Poly, var: str) -> Poly:
    return p.diff(var)


def evaluate(p: Poly, point: Mapping[str, Union[Scalar, float]]) -> Union[Fraction, float]:
    return p.evaluate(point)


def substitute(p: Poly, bindings: Mapping[str, PolyLike]) -> Poly:
    return p.substitute(bindings)


@dataclass(frozen=True)
class PolyVec3:
    x: Poly
    y: Poly
    z: Poly

    @classmethod
    def of(cls, x: PolyLike, y: PolyLike, z: PolyLike) -> "PolyVec3":
        return cls(as_poly(x), as_poly(y), as_poly(z))

    @classmethod
    def zero(cls) -> "PolyVec3":
        return cls(Poly.zero(), Poly.zero(), Poly.zero())

    def __iter__(self) -> Iterator[Poly]:
        return iter((self.x, self.y, self.z))

    def __getitem__(self, index: int) -> Poly:
        return (self.x, self.y, self.z)[index]

    def __add__(self, other: "PolyVec3") -> "PolyVec3":
        return PolyVec3(self.x + other.x, self.y + other.y, self.z + other.z)

    def __sub__(self, other: "PolyVec3") -> "PolyVec3":
        return PolyVec3(self.x - other.x, self.y - other.y, self.z - other.z)

    def __neg__(self) -> "PolyVec3":
        return PolyVec3(-self.x, -self.y, -self.z)

    def scale(self, factor: PolyLike) -> "PolyVec3":
        factor = as_poly(factor)
        return PolyVec3(self.x * factor, self.y * factor, self.z * factor)

    def divide(self, factor: PolyLike) -> "PolyVec3":
        return PolyVec3(self.x / factor, self.y / factor, self.z / factor)

    def map(self, fn: Callable[[Poly], Poly]) -> "PolyVec3":
        return PolyVec3(fn(self.x), fn(self.y), fn(self.z))

    def substitute(self, bindings: Mapping[str, PolyLike]) -> "PolyVec3":
        return self.map(lambda p: p.substitute(bindings))

    @property
    def is_zero(self) -> bool:
        return all(p.is_zero for p in self)

    @property
    def parameters(self) -> frozenset:
        return frozenset().union(*(p.parameters for p in self))

    def __str__(self) -> str:
        return "(" + ", ".join(format_poly(p) for p in self) + ")"


@dataclass(frozen=True, eq=False)
class PolyMat3:
    """3x3 polynomial matrix; the kind tag is checked against the entries on construction"""
    entries: Tuple[Tuple[Poly, Poly, Poly], Tuple[Poly, Poly, Poly], Tuple[Poly, Poly, Poly]]
    kind: str = GENERAL

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise StructureError(f"unknown matrix kind '{self.kind}'")
        if len(self.entries) != 3 or any(len(row) != 3 for row in self.entries):
            raise StructureError("matrix must be 3x3")
        m = self.entries
        if self.kind == SKEW:
            for i in range(3):
                if not m[i][i].is_zero:
                    raise StructureError(f"matrix is not skew-symmetric: diagonal entry {i} is {m[i][i]}")
                for j in range(i + 1, 3):
                    if m[i][j] != -m[j][i]:
                        raise StructureError(f"matrix is not skew-symmetric at ({i}, {j})")
        elif self.kind == SYMMETRIC:
            for i in range(3):
                for j in range(i + 1, 3):
                    if m[i][j] != m[j][i]:
                        raise StructureError(f"matrix is not symmetric at ({i}, {j})")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[PolyLike]], kind: str = GENERAL) -> "PolyMat3":
        return cls(tuple(tuple(as_poly(value) for value in row) for row in rows), kind)

    @classmethod
    def identity(cls, scale: PolyLike = 1) -> "PolyMat3":
        return cls.diagonal(scale, scale, scale)

    @classmethod
    def diagonal(cls, a: PolyLike, b: PolyLike, c: PolyLike) -> "PolyMat3":
        return cls.from_rows([[a, 0, 0], [0, b, 0], [0, 0, c]], SYMMETRIC)

    @classmethod
    def zero(cls, kind: str = GENERAL) -> "PolyMat3":
        return cls.from_rows([[0] * 3] * 3, kind)

    def __getitem__(self, index: int) -> Tuple[Poly, Poly, Poly]:
        return self.entries[index]

    def __eq__(self, other) -> bool:
        if not isinstance(other, PolyMat3):
            return NotImplemented
        return self.entries == other.entries

    def __hash__(self) -> int:
        return hash(self.entries)

    def with_kind(self, kind: str) -> "PolyMat3":
        return PolyMat3(self.entries, kind)

    def map(self, fn: Callable[[Poly], Poly], kind: Optional[str] = None) -> "PolyMat3":
        rows = tuple(tuple(fn(p) for p in row) for row in self.entries)
        return PolyMat3(rows, self.kind if kind is None else kind)

    def transpose(self) -> "PolyMat3":
        rows = tuple(tuple(self.entries[j][i] for j in range(3)) for i in range(3))
        return PolyMat3(rows, self.kind)

    def __add__(self, other: "PolyMat3") -> "PolyMat3":
        kind = self.kind if self.kind == other.kind else GENERAL
        rows = tuple(tuple(self.entries[i][j] + other.entries[i][j] for j in range(3)) for i in range(3))
        return PolyMat3(rows, kind)

    def __sub__(self, other: "PolyMat3") -> "PolyMat3":
        return self + other.scale(-1)

    def scale(self, factor: PolyLike) -> "PolyMat3":
        factor = as_poly(factor)
        return self.map(lambda p: p * factor)

    def divide(self, factor: PolyLike) -> "PolyMat3":
        return self.map(lambda p: p / factor)

    def substitute(self, bindings: Mapping[str, PolyLike]) -> "PolyMat3":
        return self.map(lambda p: p.substitute(bindings))

    def __matmul__(self, other):
        if isinstance(other, PolyVec3):
            return self.mat_vec(other)
        rows = tuple(
            tuple(sum((self.entries[i][k] * other.entries[k][j] for k in range(3)), Poly.zero()) for j in range(3))
            for i in range(3)
        )
        return PolyMat3(rows)

    def mat_vec(self, v: PolyVec3) -> PolyVec3:
        comps = [sum((self.entries[i][k] * v[k] for k in range(3)), Poly.zero()) for i in range(3)]
        return PolyVec3(*comps)

    @property
    def is_zero(self) -> bool:
        return all(p.is_zero for row in self.entries for p in row)

    @property
    def parameters(self) -> frozenset:
        return frozenset().union(*(p.parameters for row in self.entries for p in row))

    def __str__(self) -> str:
        return "[" + ", ".join("[" + ", ".join(format_poly(p) for p in row) + "]" for row in self.entries) + "]"


# vector calculus


def grad(p: Poly) -> PolyVec3:
    return PolyVec3(p.diff("x"), p.diff("y"), p.diff("z"))


def curl(v: PolyVec3) -> PolyVec3:
    return PolyVec3(
        v.z.diff("y") - v.y.diff("z"),
        v.x.diff("z") - v.z.diff("x"),
        v.y.diff("x") - v.x.diff("y"),
    )


def divergence(v: PolyVec3) -> Poly:
    return v.x.diff("x") + v.y.diff("y") + v.z.diff("z")


def dot(u: PolyVec3, v: PolyVec3) -> Poly:
    return u.x * v.x + u.y * v.y + u.z * v.z


def cross(u: PolyVec3, v: PolyVec3) -> PolyVec3:
    return PolyVec3(
        u.y * v.z - u.z * v.y,
        u.z * v.x - u.x * v.z,
        u.x * v.y - u.y * v.x,
    )


def skew_to_vec(m: PolyMat3) -> PolyVec3:
    """m[0][1] = -J_z, m[0][2] = J_y, m[1][2] = -J_x"""
    if m.kind != SKEW:
        raise StructureError(f"expected a skew matrix, got kind '{m.kind}'")
    return PolyVec3(-m[1][2], m[0][2], -m[0][1])


def vec_to_skew(v: PolyVec3) -> PolyMat3:
    zero = Poly.zero()
    return PolyMat3(
        (
            (zero, -v.z, v.y),
            (v.z, zero, -v.x),
            (-v.y, v.x, zero),
        ),
        SKEW,
    )


def jacobi_residual(J: PolyVec3) -> Poly:
    """J . (curl J); zero certifies the Jacobi identity of the associated bracket"""
    return dot(J, curl(J))


def compatibility_residuals(J: PolyVec3, Jbar: PolyVec3) -> Tuple[Poly, Poly]:
    return dot(J, curl(Jbar)), dot(Jbar, curl(J))


# text grammar

_TOKEN = re.compile(r"\s*(?:(?P<int>\d+)|(?P<name>[A-Za-z][A-Za-z0-9_]*)|(?P<op>[-+*/^()]))")


class _Parser:
    """Recursive-descent reader for the polynomial grammar"""

    def __init__(self, text: str):
        self.text = text
        self.tokens: List[Tuple[str, str, int]] = []
        pos = 0
        while pos < len(text):
            if text[pos:].strip() == "":
                break
            match = _TOKEN.match(text, pos)
            if not match:
                offset = pos + len(text[pos:]) - len(text[pos:].lstrip())
                raise PolyError(f"unexpected character '{text[offset]}'", position=offset)
            kind = match.lastgroup
            self.tokens.append((kind, match.group(kind), match.start(kind)))
            pos = match.end()
        self.index = 0

    def peek(self) -> Optional[Tuple[str, str, int]]:
        return self.tokens[self.index] if self.index < len(self.tokens) else None

    def position(self) -> int:
        token = self.peek()
        return token[2] if token else len(self.text)

    def take(self, kind: str, value: Optional[str] = None) -> Tuple[str, str, int]:
        token = self.peek()
        if token is None or token[0] != kind or (value is not None and token[1] != value):
            expected = repr(value) if value else kind
            raise PolyError(f"expected {expected}", position=self.position())
        self.index += 1
        return token

    def at(self, kind: str, value: Optional[str] = None) -> bool:
        token = self.peek()
        return token is not None and token[0] == kind and (value is None or token[1] == value)

    def parse(self) -> Poly:
        if not self.tokens:
            raise PolyError("empty polynomial", position=0)
        if self.at("op", "("):
            self.take("op", "(")
            result = self.polynomial()
            self.take("op", ")")
            if self.at("op", "/"):
                self.take("op", "/")
                start = self.position()
                den = self.denominator()
                try:
                    result = result / den
                except PolyError:
                    raise PolyError("denominator must be a parameter monomial", position=start)
        else:
            result = self.polynomial()
        if self.peek() is not None:
            raise PolyError(f"unexpected '{self.peek()[1]}'", position=self.position())
        return result

    def denominator(self) -> Poly:
        if self.at("op", "("):
            self.take("op", "(")
            den = self.term()
            self.take("op", ")")
            return den
        return self.term()

    def polynomial(self) -> Poly:
        sign = 1
        if self.at("op", "-"):
            self.take("op")
            sign = -1
        elif self.at("op", "+"):
            self.take("op")
        result = self.term() * sign
        while self.at("op", "+") or self.at("op", "-"):
            sign = 1 if self.take("op")[1] == "+" else -1
            result = result + self.term() * sign
        return result

    def term(self) -> Poly:
        if self.at("int"):
            value = Fraction(int(self.take("int")[1]))
            if self.at("op", "/"):
                self.take("op", "/")
                start = self.position()
                den = int(self.take("int")[1])
                if den == 0:
                    raise PolyError("zero denominator in coefficient", position=start)
                value /= den
            result = Poly.constant(value)
            if self.at("op", "*"):
                self.take("op", "*")
            elif not self.at("name"):
                return result
        else:
            result = Poly.one()
        result = result * self.factor()
        while self.at("op", "*"):
            self.take("op", "*")
            result = result * self.factor()
        return result

    def factor(self) -> Poly:
        name = self.take("name")[1]
        power = 1
        if self.at("op", "^"):
            self.take("op", "^")
            power = int(self.take("int")[1])
        return Poly.symbol(name) ** power


def parse_poly(text: str) -> Poly:
    """Read a polynomial such as '2*z^2 - 1/2*g*z' or '(y^2*L*C + x^2)/(L*C)'"""
    return _Parser(text).parse()


def _display_order(p: Poly) -> List[str]:
    return list(VARIABLES) + sorted(p.parameters)


def _format_coefficient(value: Fraction) -> str:
    return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"


def _format_monomial(exps: Mapping[str, int]) -> str:
    names = sorted(name for name in exps if name not in VARIABLES) + [v for v in VARIABLES if v in exps]
    return "*".join(name if exps[name] == 1 else f"{name}^{exps[name]}" for name in names)


def format_poly(p: Poly, spaced: bool = True) -> str:
    """Render in graded lexicographic order with x > y > z > parameters alphabetically"""
    if p.is_zero:
        return "0"
    order = _display_order(p)

    def rank(item):
        exps = item[0]
        return (-sum(exps.values()), tuple(-exps.get(name, 0) for name in order))

    pieces = []
    for exps, coeff in sorted(p.terms(), key=rank):
        monomial = _format_monomial(exps)
        magnitude = abs(coeff)
        if not monomial:
            body = _format_coefficient(magnitude)
        elif magnitude == 1:
            body = monomial
        else:
            body = f"{_format_coefficient(magnitude)}*{monomial}"
        pieces.append((coeff < 0, body))

    plus, minus = (" + ", " - ") if spaced else ("+", "-")
    text = ("-" if pieces[0][0] else "") + pieces[0][1]
    for negative, body in pieces[1:]:
        text += (minus if negative else plus) + body

    den = p.denominator
    if den:
        den_text = _format_monomial(den)
        if len(den) > 1 or next(iter(den.values())) > 1:
            den_text = f"({den_text})"
        text = f"({text})/{den_text}"
    return text


# float evaluation


class CompiledPoly:
    """Flat term list of a Poly with every parameter bound, summed with math.fsum"""

    __slots__ = ("terms",)

    def __init__(self, terms: List[Tuple[float, int, int, int]]):
        self.terms = terms

    def __call__(self, state: Sequence[float]) -> float:
        x, y, z = state[0], state[1], state[2]
        return math.fsum(c * x ** ex * y ** ey * z ** ez for c, ex, ey, ez in self.terms)


def compile_poly(p: Poly, bindings: Optional[Mapping[str, float]] = None) -> CompiledPoly:
    bindings = dict(bindings or {})
    missing = sorted(p.parameters - set(bindings))
    if missing:
        raise PolyError(f"unbound symbol '{missing[0]}'", symbol=missing[0])
    den = 1.0
    for name, e in p.denominator.items():
        den *= float(bindings[name]) ** e
    if den == 0:
        raise PolyError(f"denominator parameter bound to 0 in {format_poly(p)}")
    merged: Dict[Tuple[int, int, int], List[float]] = {}
    for exps, coeff in p.terms():
        value = float(coeff) / den
        for name, e in exps.items():
            if name not in VARIABLES:
                value *= float(bindings[name]) ** e
        key = tuple(exps.get(v, 0) for v in VARIABLES)
        merged.setdefault(key, []).append(value)
    terms = [(math.fsum(values), *key) for key, values in sorted(merged.items())]
    return CompiledPoly([t for t in terms if t[0] != 0.0])


class CompiledField:
    """Float right-hand side f(t, state) of a polynomial vector field"""

    def __init__(self, field: PolyVec3, bindings: Optional[Mapping[str, float]] = None):
        self.components = tuple(compile_poly(p, bindings) for p in field)

    def __call__(self, t: float, state: Sequence[float]) -> np.ndarray:
        return np.array([f(state) for f in self.components], dtype=float)


def compile_field(field: PolyVec3, bindings: Optional[Mapping[str, float]] = None) -> CompiledField:
    return CompiledField(field, bindings)
