"""Boundary symbols of D and Dstar at a boundary point and their parametrix.

A ``RationalSymbol`` is a matrix-valued rational function of ``xi`` stored as
one numerator matrix over the shared denominator (xi - i)**p (xi + i)**q.
A ``BoundaryJet`` pairs a symbol with its normal derivative at the point.
The normal derivative follows the collar-metric rule
d/dx_n iota(xi') = h iota(xi'), d/dx_n eps(xi') = 0; tangential x-derivatives are
carried the same way and vanish for the collar metric.
"""

from functools import lru_cache
from typing import NamedTuple, Optional, Sequence, Tuple

import sympy as sym
from sympy import I
from sympy.polys.domains import QQ_I
from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.exceptions import DMNonInvertibleMatrixError

from app.errors import (
    HDegreeOverflowError,
    InvalidParameterError,
    ModelingBugError,
    ScopeError,
    SingularSymbolError,
)
from app.exterior_algebra import (
    Covector,
    CovectorRole,
    Endo,
    Operator,
    check_parameters,
    exterior_algebra,
    p0_matrix,
)
from app.scalar_field import (
    H,
    H_DEGREE_CAP,
    XI,
    RationalFn,
    _principal_part,
)

DEFAULT_PROBE_POINTS = (sym.S.Zero, sym.Rational(1, 2))


def _expanded(matrix) -> Endo:
    return Endo(matrix).applyfunc(sym.expand)


def _is_zero_matrix(matrix) -> bool:
    return all(sym.expand(entry) == 0 for entry in matrix)


def _cancel_matrix_root(matrix: Endo, root: sym.Expr, order: int) -> Tuple[Endo, int]:
    """Divide every entry by (xi - root) while all of them vanish at ``root``."""
    while order > 0 and all(sym.expand(e.subs(XI, root)) == 0 for e in matrix if e != 0):
        matrix = matrix.applyfunc(lambda e: sym.expand(sym.quo(e, XI - root, XI)) if e != 0 else e)
        order -= 1
    return matrix, order


class RationalSymbol:
    """numerator(xi) / ((xi - i)**p (xi + i)**q) with a matrix numerator."""

    __slots__ = ("numerator", "p", "q")

    def __init__(self, numerator, p: int = 0, q: int = 0, normalize: bool = False):
        numerator = _expanded(numerator)
        if normalize:
            numerator, p = _cancel_matrix_root(numerator, I, p)
            numerator, q = _cancel_matrix_root(numerator, -I, q)
        if all(entry == 0 for entry in numerator):
            p = q = 0
        self.numerator = numerator
        self.p = p
        self.q = q

    @classmethod
    def constant(cls, endo: Endo) -> "RationalSymbol":
        return cls(endo)

    @classmethod
    def zeros(cls, dim: int) -> "RationalSymbol":
        return cls(sym.zeros(dim, dim))

    @classmethod
    def from_entries(cls, entries: Sequence[Sequence[RationalFn]]) -> "RationalSymbol":
        p = max(f.p for row in entries for f in row)
        q = max(f.q for row in entries for f in row)
        dim = len(entries)
        return cls(
            Endo(dim, dim, lambda i, j: entries[i][j].lifted(p, q)), p, q, normalize=True
        )

    @property
    def dim(self) -> int:
        return self.numerator.rows

    def lifted(self, p: int, q: int) -> Endo:
        if (p, q) == (self.p, self.q):
            return self.numerator
        factor = sym.expand((XI - I) ** (p - self.p) * (XI + I) ** (q - self.q))
        return _expanded(self.numerator * factor)

    def __add__(self, other: "RationalSymbol") -> "RationalSymbol":
        p, q = max(self.p, other.p), max(self.q, other.q)
        return RationalSymbol(self.lifted(p, q) + other.lifted(p, q), p, q, normalize=True)

    def __neg__(self) -> "RationalSymbol":
        return RationalSymbol(-self.numerator, self.p, self.q)

    def __sub__(self, other: "RationalSymbol") -> "RationalSymbol":
        return self + (-other)

    def __mul__(self, other) -> "RationalSymbol":
        if isinstance(other, RationalSymbol):
            return RationalSymbol(self.numerator * other.numerator, self.p + other.p, self.q + other.q)
        if isinstance(other, RationalFn):
            return RationalSymbol(self.numerator * other.numerator, self.p + other.p, self.q + other.q)
        return RationalSymbol(self.numerator * sym.sympify(other), self.p, self.q)

    def __rmul__(self, other) -> "RationalSymbol":
        if isinstance(other, RationalFn):
            return RationalSymbol(other.numerator * self.numerator, self.p + other.p, self.q + other.q)
        return RationalSymbol(sym.sympify(other) * self.numerator, self.p, self.q)

    def entry(self, i: int, j: int) -> RationalFn:
        return RationalFn(self.numerator[i, j], self.p, self.q)

    def is_zero(self) -> bool:
        return all(entry == 0 for entry in self.numerator)

    def equals(self, other: "RationalSymbol") -> bool:
        return (self - other).is_zero()

    def scalar_part(self) -> Optional[RationalFn]:
        """f when the symbol is f * Id, else None."""
        diagonal = self.numerator[0, 0]
        for i in range(self.dim):
            for j in range(self.dim):
                expected = diagonal if i == j else 0
                if sym.expand(self.numerator[i, j] - expected) != 0:
                    return None
        return RationalFn(diagonal, self.p, self.q)

    def diff_xi(self, k: int = 1) -> "RationalSymbol":
        if k < 0:
            raise InvalidParameterError(f"Derivative order must be nonnegative, got {k}")
        result = self
        for _ in range(k):
            numerator = (
                result.numerator.diff(XI) * (XI**2 + 1)
                - result.p * result.numerator * (XI + I)
                - result.q * result.numerator * (XI - I)
            )
            result = RationalSymbol(numerator, result.p + 1, result.q + 1, normalize=True)
        return result

    def pi_plus(self) -> "RationalSymbol":
        """Entrywise projection onto the terms with pole at +i."""

        def project(entry):
            if entry == 0:
                return sym.S.Zero
            coefficients = _principal_part(RationalFn(entry, self.p, self.q, normalize=False), I)
            return sum(
                (c * (XI - I) ** (self.p - k) for k, c in enumerate(coefficients, start=1)),
                sym.S.Zero,
            )

        return RationalSymbol(self.numerator.applyfunc(project), self.p, 0, normalize=True)

    def trace(self) -> RationalFn:
        return RationalFn(self.numerator.trace(), self.p, self.q)

    def trace_product(self, other: "RationalSymbol") -> RationalFn:
        """tr(self * other) without forming the product."""
        left, right = self.numerator, other.numerator
        total = sym.S.Zero
        for i in range(self.dim):
            for j in range(self.dim):
                if left[i, j] != 0 and right[j, i] != 0:
                    total += left[i, j] * right[j, i]
        return RationalFn(total, self.p + other.p, self.q + other.q)

    def evaluate(self, xi_value) -> Endo:
        value = sym.sympify(xi_value)
        denominator = (value - I) ** self.p * (value + I) ** self.q
        return _expanded(self.numerator.subs(XI, value) / denominator)

    def h_degree(self) -> int:
        degrees = [sym.degree(entry, H) for entry in self.numerator if entry != 0]
        return int(max(degrees)) if degrees else 0

    def check_h_degree(self, context: str) -> "RationalSymbol":
        if self.h_degree() > H_DEGREE_CAP:
            raise HDegreeOverflowError(
                f"{context} has degree {self.h_degree()} in h, cap is {H_DEGREE_CAP}"
            )
        return self

    def __repr__(self) -> str:
        return f"RationalSymbol(dim={self.dim}, p={self.p}, q={self.q})"


class BoundaryJet:
    """A symbol at x0 with its first normal and tangential x-derivatives (None when not modeled)."""

    __slots__ = ("value", "dxn", "dx")

    def __init__(
        self,
        value: RationalSymbol,
        dxn: Optional[RationalSymbol] = None,
        dx: Optional[Tuple[RationalSymbol, ...]] = None,
    ):
        self.value = value
        self.dxn = dxn
        self.dx = dx

    def normal_derivative(self) -> RationalSymbol:
        if self.dxn is None:
            raise ScopeError("The normal derivative of this symbol is not modeled")
        return self.dxn

    def tangential_derivative(self, j: int) -> RationalSymbol:
        if self.dx is None:
            raise ScopeError("The tangential derivatives of this symbol are not modeled")
        if not 1 <= j <= len(self.dx):
            raise InvalidParameterError(f"Tangential index {j} outside 1..{len(self.dx)}")
        return self.dx[j - 1]


def _check_direction(direction: Covector) -> None:
    if direction.role is not CovectorRole.TANGENTIAL or not direction.is_unit():
        raise InvalidParameterError(f"xi' must be a unit tangential covector, got {direction}")


def build_sigma(
    a, b, which: Operator, direction: Covector, tangential_h: Optional[Sequence] = None
) -> Tuple[BoundaryJet, BoundaryJet]:
    """(p1, p0): principal and order-zero symbols of ``which`` at x0.

    ``tangential_h`` holds d h / d x_j at x0 for j < n; the collar metric has
    none, so it defaults to zeros.
    """
    a, b = check_parameters(a, b)
    _check_direction(direction)
    n = direction.dim
    algebra = exterior_algebra(n)
    alpha, beta = Operator(which).twist(a, b)

    tangential = algebra.twisted(alpha, beta, direction)
    normal = algebra.twisted(alpha, beta, Covector.normal(n))
    if tangential_h is None:
        tangential_h = (sym.S.Zero,) * (n - 1)
    if len(tangential_h) != n - 1:
        raise InvalidParameterError(f"Expected {n - 1} tangential derivatives of h, got {len(tangential_h)}")

    iota = algebra.iota(direction)
    p1 = BoundaryJet(
        RationalSymbol(I * tangential + I * XI * normal),
        RationalSymbol(-I * beta * H * iota),
        tuple(RationalSymbol(-I * beta * sym.sympify(dh) * iota) for dh in tangential_h),
    )
    p0 = BoundaryJet(RationalSymbol(p0_matrix(a, b, which, n)))
    return p1, p0


def principal_xi_derivatives(a, b, which: Operator, p1: BoundaryJet, n: int) -> Tuple[RationalSymbol, ...]:
    """d p1 / d xi_j for j = 1..n."""
    alpha, beta = Operator(which).twist(*check_parameters(a, b))
    algebra = exterior_algebra(n)
    tangential = tuple(
        RationalSymbol(I * algebra.twisted(alpha, beta, Covector.basis(n, j)))
        for j in range(1, n)
    )
    return tangential + (p1.value.diff_xi(),)


def _check_by_elimination(p1: RationalSymbol, inverse: RationalSymbol, probe_points) -> None:
    for point in probe_points:
        rows = p1.evaluate(point).tolist()
        matrix = DomainMatrix(
            [[QQ_I.from_sympy(entry) for entry in row] for row in rows], (p1.dim, p1.dim), QQ_I
        )
        try:
            eliminated = matrix.inv().to_Matrix()
        except DMNonInvertibleMatrixError as e:
            raise SingularSymbolError(f"Principal symbol singular at xi={point}") from e
        if not _is_zero_matrix(eliminated - inverse.evaluate(point)):
            raise ModelingBugError(
                f"Algebraic inverse and Gaussian elimination disagree at xi={point}"
            )


def invert_principal(p1: BoundaryJet, probe_points=DEFAULT_PROBE_POINTS) -> BoundaryJet:
    """q-1 = p1^-1, from p1^2 = s(xi) Id, cross-checked by exact elimination."""
    scalar = (p1.value * p1.value).scalar_part()
    if scalar is None or scalar.is_zero():
        raise SingularSymbolError("Principal symbol does not square to a nonzero scalar")

    value = p1.value * scalar.reciprocal()
    _check_by_elimination(p1.value, value, probe_points)
    dxn = None if p1.dxn is None else -(value * p1.dxn * value)
    dx = None if p1.dx is None else tuple(-(value * d * value) for d in p1.dx)
    return BoundaryJet(value, dxn, dx)


def compose_q2(
    p1: BoundaryJet,
    p0: BoundaryJet,
    q1: BoundaryJet,
    xi_derivatives: Sequence[RationalSymbol],
) -> BoundaryJet:
    """q-2 = -q-1 [p0 q-1 + sum_j d_xi_j p1 D_x_j q-1] with D_x = -i d_x."""
    n = len(xi_derivatives)
    inner = p0.value * q1.value
    for j, d_xi in enumerate(xi_derivatives, start=1):
        d_x = q1.normal_derivative() if j == n else q1.tangential_derivative(j)
        inner = inner + d_xi * (-I * d_x)
    value = -(q1.value * inner)
    return BoundaryJet(value.check_h_degree("q-2"))


def composition_residual(
    p1: BoundaryJet,
    p0: BoundaryJet,
    q1: BoundaryJet,
    q2: BoundaryJet,
    xi_derivatives: Sequence[RationalSymbol],
) -> RationalSymbol:
    n = len(xi_derivatives)
    residual = p1.value * q2.value + p0.value * q1.value
    for j, d_xi in enumerate(xi_derivatives, start=1):
        d_x = q1.normal_derivative() if j == n else q1.tangential_derivative(j)
        residual = residual + d_xi * (-I * d_x)
    return residual


# Closed forms


def _closed_form_parts(a, b, which: Operator, direction: Covector):
    a, b = check_parameters(a, b)
    _check_direction(direction)
    n = direction.dim
    algebra = exterior_algebra(n)
    alpha, beta = Operator(which).twist(a, b)
    normal = algebra.twisted(alpha, beta, Covector.normal(n))
    symbol = algebra.twisted(alpha, beta, direction) + XI * normal
    normal_derivative = -beta * H * algebra.iota(direction)
    return a * b, symbol, normal, normal_derivative


def closed_form_q1(a, b, which: Operator, direction: Covector) -> BoundaryJet:
    """q-1 = i T(xi)/(ab|xi|^2) and its normal derivative, |xi'| = 1."""
    ab, symbol, _, normal_derivative = _closed_form_parts(a, b, which, direction)
    value = RationalSymbol(I * symbol / ab, 1, 1)
    dxn = RationalSymbol(I * (normal_derivative * (XI**2 + 1) - symbol * H) / ab, 2, 2)
    return BoundaryJet(value, dxn)


def closed_form_q2(a, b, which: Operator, direction: Covector) -> RationalSymbol:
    """T(xi) p0 T(xi)/(ab)^2|xi|^4 + T(xi) T(dx_n) [dT(xi') |xi|^2 - T(xi) h]/(ab)^2|xi|^6."""
    ab, symbol, normal, normal_derivative = _closed_form_parts(a, b, which, direction)
    p0 = p0_matrix(a, b, which, direction.dim)
    first = RationalSymbol(symbol * p0 * symbol / ab**2, 2, 2)
    second = RationalSymbol(
        symbol * normal * (normal_derivative * (XI**2 + 1) - symbol * H) / ab**2, 3, 3
    )
    return first + second


# Bundle used by the case evaluator


class OperatorSymbols(NamedTuple):
    operator: Operator
    a: sym.Rational
    b: sym.Rational
    direction: Covector
    p1: BoundaryJet
    p0: BoundaryJet
    q1: BoundaryJet
    q2: BoundaryJet
    xi_derivatives: Tuple[RationalSymbol, ...]

    @property
    def n(self) -> int:
        return self.direction.dim

    def order(self, r: int) -> BoundaryJet:
        if r == -1:
            return self.q1
        if r == -2:
            return self.q2
        raise ScopeError(f"Symbols of order {r} are not modeled")

    def q1_tangential_xi_derivative(self, j: int) -> RationalSymbol:
        """d q-1 / d xi_j for j < n, via d(p1^-1) = -q-1 (d p1) q-1."""
        if not 1 <= j < self.n:
            raise InvalidParameterError(f"Tangential index {j} outside 1..{self.n - 1}")
        return -(self.q1.value * self.xi_derivatives[j - 1] * self.q1.value)


@lru_cache(maxsize=128)
def operator_symbols(
    a: sym.Rational,
    b: sym.Rational,
    which: Operator,
    direction: Covector,
    probe_points: Tuple = DEFAULT_PROBE_POINTS,
) -> OperatorSymbols:
    a, b = check_parameters(a, b)
    p1, p0 = build_sigma(a, b, which, direction)
    xi_derivatives = principal_xi_derivatives(a, b, which, p1, direction.dim)
    q1 = invert_principal(p1, probe_points)
    q2 = compose_q2(p1, p0, q1, xi_derivatives)
    return OperatorSymbols(Operator(which), a, b, direction, p1, p0, q1, q2, xi_derivatives)
