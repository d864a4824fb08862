"""
Second-Order Jets of Scalar Fields

Every field is evaluated together with its gradient and Hessian by carrying
(value, gradient, hessian) through each arithmetic node. A central
finite-difference evaluator is provided as an independent oracle.

Contents:
- Jet2: immutable (value, gradient, hessian) triple with jet arithmetic
- UnaryFunction: 1-D analytic functions used in compositions
- ScalarField and its nodes (constant, coordinate, linear form, weighted
  sum, product, quotient, power, composition)
- eval_jet / fd_jet
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from electrovac.shared.utils import (
    DimensionMismatchError,
    InvalidParameterError,
    NonFiniteResultError,
    SingularPointError,
)


EPS_SING = 1e-12
GRADIENT_STEP = 1e-5
HESSIAN_STEP = 1e-4


def as_point(p: Sequence[float], n: int | None = None) -> np.ndarray:
    """
    Validate and convert coordinates to a float vector.

    Args:
        p: Cartesian coordinates x_1..x_n.
        n: Expected dimension, if known.

    Returns:
        1-D float64 array.
    """
    point = np.asarray(p, dtype=float)
    if point.ndim != 1:
        raise DimensionMismatchError(f"point must be a flat vector, got shape {point.shape}")
    if point.size < 3:
        raise DimensionMismatchError(f"points need n >= 3, got n={point.size}")
    if n is not None and point.size != n:
        raise DimensionMismatchError(f"expected n={n}, got n={point.size}")
    if not np.all(np.isfinite(point)):
        raise InvalidParameterError(f"non-finite coordinates: {point}")
    return point


# ============================================================
# JETS
# ============================================================

@dataclass(frozen=True, eq=False)
class Jet2:
    """Value, gradient and Hessian of a scalar field at one point."""

    value: float
    gradient: np.ndarray
    hessian: np.ndarray

    def __post_init__(self):
        gradient = np.array(self.gradient, dtype=float)
        hessian = np.array(self.hessian, dtype=float)
        n = gradient.shape[0] if gradient.ndim == 1 else -1
        if n < 0 or hessian.shape != (n, n):
            raise DimensionMismatchError(
                f"inconsistent jet shapes {gradient.shape} / {hessian.shape}"
            )
        hessian = 0.5 * (hessian + hessian.T)
        gradient.setflags(write=False)
        hessian.setflags(write=False)
        object.__setattr__(self, "value", float(self.value))
        object.__setattr__(self, "gradient", gradient)
        object.__setattr__(self, "hessian", hessian)

    @classmethod
    def constant(cls, c: float, n: int) -> "Jet2":
        return cls(c, np.zeros(n), np.zeros((n, n)))

    @classmethod
    def coordinate(cls, index: int, p: np.ndarray) -> "Jet2":
        n = p.shape[0]
        gradient = np.zeros(n)
        gradient[index] = 1.0
        return cls(p[index], gradient, np.zeros((n, n)))

    @property
    def n(self) -> int:
        return self.gradient.shape[0]

    @property
    def laplacian(self) -> float:
        return float(np.trace(self.hessian))

    @property
    def grad_norm2(self) -> float:
        return float(self.gradient @ self.gradient)

    def is_finite(self) -> bool:
        return bool(
            math.isfinite(self.value)
            and np.all(np.isfinite(self.gradient))
            and np.all(np.isfinite(self.hessian))
        )

    def compose(self, f0: float, f1: float, f2: float) -> "Jet2":
        """Chain rule for f(u) given f, f', f'' at u = self.value."""
        g = self.gradient
        return Jet2(f0, f1 * g, f2 * np.outer(g, g) + f1 * self.hessian)

    def reciprocal(self) -> "Jet2":
        u = self.value
        return self.compose(1.0 / u, -1.0 / (u * u), 2.0 / (u * u * u))

    def _check(self, other: "Jet2"):
        if other.n != self.n:
            raise DimensionMismatchError(f"jet dimensions differ: {self.n} vs {other.n}")

    def __add__(self, other):
        if isinstance(other, Jet2):
            self._check(other)
            return Jet2(self.value + other.value, self.gradient + other.gradient,
                        self.hessian + other.hessian)
        return Jet2(self.value + float(other), self.gradient, self.hessian)

    __radd__ = __add__

    def __neg__(self):
        return Jet2(-self.value, -self.gradient, -self.hessian)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Jet2):
            self._check(other)
            u, v = self.value, other.value
            gu, gv = self.gradient, other.gradient
            hessian = u * other.hessian + v * self.hessian + (np.outer(gu, gv) + np.outer(gv, gu))
            return Jet2(u * v, u * gv + v * gu, hessian)
        c = float(other)
        return Jet2(c * self.value, c * self.gradient, c * self.hessian)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet2):
            return self * other.reciprocal()
        return self * (1.0 / float(other))

    def __rtruediv__(self, other):
        return float(other) * self.reciprocal()


# ============================================================
# 1-D ANALYTIC FUNCTIONS
# ============================================================

class UnaryFunction(ABC):
    """A smooth real function of one variable with two derivatives."""

    name: str = "f"

    @abstractmethod
    def derivatives(self, u: float) -> tuple[float, float, float]:
        """Return (f(u), f'(u), f''(u))."""

    def singular(self, u: float) -> bool:
        return False

    def __call__(self, u: float) -> float:
        return self.derivatives(u)[0]


class Exp(UnaryFunction):
    name = "exp"

    def derivatives(self, u):
        e = math.exp(u)
        return e, e, e


class Log(UnaryFunction):
    name = "log"

    def __init__(self, eps: float = EPS_SING):
        self.eps = eps

    def singular(self, u):
        return u <= self.eps

    def derivatives(self, u):
        return math.log(u), 1.0 / u, -1.0 / (u * u)


class Sqrt(UnaryFunction):
    name = "sqrt"

    def __init__(self, eps: float = EPS_SING):
        self.eps = eps

    def singular(self, u):
        return u <= self.eps

    def derivatives(self, u):
        s = math.sqrt(u)
        return s, 0.5 / s, -0.25 / (u * s)


class Arctan(UnaryFunction):
    name = "arctan"

    def derivatives(self, u):
        w = 1.0 / (1.0 + u * u)
        return math.atan(u), w, -2.0 * u * w * w


class RealPower(UnaryFunction):
    """u ** exponent; non-integer exponents require u > eps."""

    def __init__(self, exponent: float, eps: float = EPS_SING):
        self.exponent = float(exponent)
        self.eps = eps
        self.name = f"pow[{self.exponent:g}]"
        self._integer = self.exponent.is_integer()

    def singular(self, u):
        if self._integer:
            return self.exponent < 0 and abs(u) < self.eps
        return u <= self.eps

    def derivatives(self, u):
        p = self.exponent
        if self._integer and p >= 0:
            k = int(p)
            f0 = u ** k
            f1 = k * u ** (k - 1) if k >= 1 else 0.0
            f2 = k * (k - 1) * u ** (k - 2) if k >= 2 else 0.0
            return float(f0), float(f1), float(f2)
        if self._integer:
            k = int(p)
            return u ** k, k * u ** (k - 1), k * (k - 1) * u ** (k - 2)
        return math.pow(u, p), p * math.pow(u, p - 1.0), p * (p - 1.0) * math.pow(u, p - 2.0)


class Affine(UnaryFunction):
    """u -> slope * u + intercept."""

    def __init__(self, slope: float, intercept: float = 0.0):
        self.slope = float(slope)
        self.intercept = float(intercept)
        self.name = "affine"

    def derivatives(self, u):
        return self.slope * u + self.intercept, self.slope, 0.0


class Polynomial1D(UnaryFunction):
    """sum_k coeffs[k] * u**k, evaluated by Horner's rule."""

    def __init__(self, coeffs: Sequence[float]):
        if len(coeffs) == 0:
            raise InvalidParameterError("polynomial needs at least one coefficient")
        self.coeffs = tuple(float(c) for c in coeffs)
        self.name = "poly"

    def derivatives(self, u):
        f0 = f1 = f2 = 0.0
        for c in reversed(self.coeffs):
            f2 = f2 * u + 2.0 * f1
            f1 = f1 * u + f0
            f0 = f0 * u + c
        return f0, f1, f2


# ============================================================
# SCALAR FIELDS
# ============================================================

class ScalarField(ABC):
    """
    A map from points of R^n to Jet2.

    Subclasses implement `jet(p)` for an already validated point and raise
    SingularPointError on their declared singular set. Use `eval_jet` as the
    public entry point.
    """

    n: int

    @abstractmethod
    def jet(self, p: np.ndarray) -> Jet2:
        ...

    def value(self, p: np.ndarray) -> float:
        return self.jet(p).value

    def singular(self, p: Sequence[float]) -> bool:
        try:
            self.jet(as_point(p, self.n))
        except SingularPointError:
            return True
        return False

    # -- operator sugar -------------------------------------------------

    def _same_dimension(self, other: "ScalarField"):
        if other.n != self.n:
            raise DimensionMismatchError(f"field dimensions differ: {self.n} vs {other.n}")

    def _terms(self) -> tuple[tuple[tuple[float, "ScalarField"], ...], float]:
        return ((1.0, self),), 0.0

    def __add__(self, other):
        terms, offset = self._terms()
        if isinstance(other, ScalarField):
            self._same_dimension(other)
            other_terms, other_offset = other._terms()
            return LinearCombination(terms + other_terms, offset + other_offset)
        return LinearCombination(terms, offset + float(other))

    def __radd__(self, other):
        return self + other

    def __neg__(self):
        return -1.0 * self

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, ScalarField):
            self._same_dimension(other)
            return Product(self, other)
        c = float(other)
        terms, offset = self._terms()
        return LinearCombination(tuple((c * w, f) for w, f in terms), c * offset)

    def __rmul__(self, other):
        return self * other

    def __truediv__(self, other):
        if isinstance(other, ScalarField):
            self._same_dimension(other)
            return Quotient(self, other)
        return self * (1.0 / float(other))

    def __rtruediv__(self, other):
        return Quotient(Constant(float(other), self.n), self)

    def __pow__(self, exponent):
        return Power(self, float(exponent))


def _check_dimension(n: int):
    if n < 3:
        raise DimensionMismatchError(f"fields need n >= 3, got n={n}")


class Constant(ScalarField):
    def __init__(self, c: float, n: int):
        _check_dimension(n)
        self.c = float(c)
        self.n = n

    def jet(self, p):
        return Jet2.constant(self.c, self.n)


class Coordinate(ScalarField):
    """Projection onto the coordinate x_{index+1} (0-based index)."""

    def __init__(self, index: int, n: int):
        _check_dimension(n)
        if not 0 <= index < n:
            raise InvalidParameterError(f"coordinate index {index} outside 0..{n - 1}")
        self.index = index
        self.n = n

    def jet(self, p):
        return Jet2.coordinate(self.index, p)


class LinearForm(ScalarField):
    """sum_k coeffs[k] * x_k + offset."""

    def __init__(self, coeffs: Sequence[float], offset: float = 0.0):
        self.coeffs = np.asarray(coeffs, dtype=float)
        _check_dimension(self.coeffs.size)
        self.coeffs.setflags(write=False)
        self.offset = float(offset)
        self.n = self.coeffs.size

    def jet(self, p):
        return Jet2(float(self.coeffs @ p) + self.offset, self.coeffs, np.zeros((self.n, self.n)))


class LinearCombination(ScalarField):
    """Weighted sum sum_i w_i F_i + offset, accumulated left to right."""

    def __init__(self, terms: Iterable[tuple[float, ScalarField]], offset: float = 0.0):
        self.terms = tuple((float(w), f) for w, f in terms)
        if not self.terms:
            raise InvalidParameterError("linear combination needs at least one term")
        self.n = self.terms[0][1].n
        for _, field in self.terms:
            if field.n != self.n:
                raise DimensionMismatchError("linear combination mixes dimensions")
        self.offset = float(offset)

    def _terms(self):
        return self.terms, self.offset

    def jet(self, p):
        w, field = self.terms[0]
        acc = w * field.jet(p)
        for w, field in self.terms[1:]:
            acc = acc + w * field.jet(p)
        if self.offset != 0.0:
            acc = acc + self.offset
        return acc


class Product(ScalarField):
    def __init__(self, left: ScalarField, right: ScalarField):
        left._same_dimension(right)
        self.left, self.right = left, right
        self.n = left.n

    def jet(self, p):
        return self.left.jet(p) * self.right.jet(p)


class Quotient(ScalarField):
    """numerator / denominator; singular where |denominator| < eps."""

    def __init__(self, numerator: ScalarField, denominator: ScalarField, eps: float = EPS_SING):
        numerator._same_dimension(denominator)
        self.numerator, self.denominator = numerator, denominator
        self.eps = eps
        self.n = numerator.n

    def jet(self, p):
        den = self.denominator.jet(p)
        if abs(den.value) < self.eps:
            raise SingularPointError(f"denominator {den.value:.3e} vanishes at {p}")
        return self.numerator.jet(p) * den.reciprocal()


class Compose(ScalarField):
    """outer(inner(x)) for a 1-D analytic outer function."""

    def __init__(self, outer: UnaryFunction, inner: ScalarField):
        self.outer = outer
        self.inner = inner
        self.n = inner.n

    def jet(self, p):
        inner = self.inner.jet(p)
        if self.outer.singular(inner.value):
            raise SingularPointError(f"{self.outer.name} is singular at u={inner.value:.6g}")
        return inner.compose(*self.outer.derivatives(inner.value))


class Power(Compose):
    def __init__(self, base: ScalarField, exponent: float, eps: float = EPS_SING):
        super().__init__(RealPower(exponent, eps), base)
        self.exponent = float(exponent)


def exp(field: ScalarField) -> ScalarField:
    return Compose(Exp(), field)


def log(field: ScalarField) -> ScalarField:
    return Compose(Log(), field)


def sqrt(field: ScalarField) -> ScalarField:
    return Compose(Sqrt(), field)


def arctan(field: ScalarField) -> ScalarField:
    return Compose(Arctan(), field)


def polynomial(n: int, terms: Iterable[Mapping]) -> ScalarField:
    """
    Build a polynomial field from monomials.

    Args:
        n: Dimension.
        terms: Items with keys `coefficient` and `powers` (n non-negative ints).

    Returns:
        The polynomial as a composite ScalarField.
    """
    pieces: list[tuple[float, ScalarField]] = []
    for term in terms:
        powers = [int(k) for k in term["powers"]]
        if len(powers) != n or any(k < 0 for k in powers):
            raise InvalidParameterError(f"monomial powers {powers} invalid for n={n}")
        monomial: ScalarField = Constant(1.0, n)
        for index, k in enumerate(powers):
            if k == 0:
                continue
            factor = Coordinate(index, n) if k == 1 else Power(Coordinate(index, n), k)
            monomial = factor if isinstance(monomial, Constant) else Product(monomial, factor)
        pieces.append((float(term["coefficient"]), monomial))
    if not pieces:
        return Constant(0.0, n)
    return LinearCombination(pieces)


# ============================================================
# EVALUATION
# ============================================================

def eval_jet(field: ScalarField, p: Sequence[float]) -> Jet2:
    """
    Evaluate value, gradient and Hessian of a field at a point.

    Args:
        field: The scalar field.
        p: Point with exactly field.n coordinates.

    Returns:
        Jet2 with an exactly symmetric Hessian.
    """
    point = as_point(p, field.n)
    try:
        jet = field.jet(point)
    except (OverflowError, ZeroDivisionError) as e:
        raise NonFiniteResultError(f"evaluation overflowed at {point}: {e}") from e
    if not jet.is_finite():
        raise NonFiniteResultError(f"non-finite jet at {point}")
    return jet


def _stencil_value(field: ScalarField, q: np.ndarray) -> float:
    try:
        v = field.value(q)
    except (OverflowError, ZeroDivisionError) as e:
        raise NonFiniteResultError(f"stencil evaluation overflowed at {q}") from e
    if not math.isfinite(v):
        raise NonFiniteResultError(f"non-finite stencil value at {q}")
    return v


def fd_jet(field: ScalarField, p: Sequence[float], h: float | None = None) -> Jet2:
    """
    Central finite-difference jet (oracle for eval_jet).

    Args:
        field: The scalar field.
        p: Evaluation point.
        h: Step for both gradient and Hessian stencils. Defaults to
           GRADIENT_STEP for gradients and HESSIAN_STEP for Hessians.

    Returns:
        Jet2 whose value is exact and whose derivatives are O(h^2).
    """
    point = as_point(p, field.n)
    step_g = GRADIENT_STEP if h is None else float(h)
    step_h = HESSIAN_STEP if h is None else float(h)
    if step_g <= 0 or step_h <= 0:
        raise InvalidParameterError(f"finite-difference step must be positive, got {h}")

    n = point.size
    eye = np.eye(n)
    value = _stencil_value(field, point)
    gradient = np.empty(n)
    hessian = np.empty((n, n))

    for i in range(n):
        e = step_g * eye[i]
        gradient[i] = (_stencil_value(field, point + e) - _stencil_value(field, point - e)) / (2.0 * step_g)

    for i in range(n):
        for j in range(i, n):
            ei, ej = step_h * eye[i], step_h * eye[j]
            d = (
                _stencil_value(field, point + ei + ej)
                - _stencil_value(field, point + ei - ej)
                - _stencil_value(field, point - ei + ej)
                + _stencil_value(field, point - ei - ej)
            )
            hessian[i, j] = hessian[j, i] = d / (4.0 * step_h * step_h)

    return Jet2(value, gradient, hessian)
