"""Closed-form interior terms and the gravitational action split at n = 4.

The interior symbols are not derived here; the coefficients are evaluated from
their closed forms and kept as multiples of the formal token int_M R dvol.
"""

from enum import Enum
from typing import Dict, List, Optional

import sympy as sym
from pydantic import BaseModel, ConfigDict

from app.errors import InvalidParameterError, ScopeError
from app.exterior_algebra import Operator, check_parameters

R_INTEGRAL = sym.Symbol("int_M_R_dvol")
OMEGA3 = sym.Symbol("Omega3")
OMEGA4 = sym.Symbol("Omega4")
K_RANGE = range(5)


class KBinding(str, Enum):
    """Reading of the unbound k in the interior gravity constant."""

    SUMMED = "summed"
    PER_K = "per-k"


def _choose(m: int, j: int) -> sym.Integer:
    if j < 0 or j > m:
        return sym.S.Zero
    return sym.binomial(m, j)


def _brace(j: int) -> sym.Rational:
    return sym.Rational(1, 6) * _choose(4, j) - _choose(2, j - 1)


def _check_k(k: int) -> None:
    if k not in K_RANGE:
        raise InvalidParameterError(f"k must lie in 0..4, got {k}")


def c1_coeff(k: int, a, b) -> sym.Rational:
    """b^-2 {k} + (b^-2 - a^-2) sum_{j<k} (-1)^(j-k) {j}, {j} = C(4,j)/6 - C(2,j-1)."""
    _check_k(k)
    a, b = check_parameters(a, b)
    tail = sum((sym.S.NegativeOne ** (j - k) * _brace(j) for j in range(k)), sym.S.Zero)
    return b**-2 * _brace(k) + (b**-2 - a**-2) * tail


def c1_coeff_resummed(k: int, a, b) -> sym.Rational:
    """Same value through the alternating prefix A_{m+1} = -A_m - {m}, A_0 = 0."""
    _check_k(k)
    a, b = check_parameters(a, b)
    prefix = sym.S.Zero
    for m in range(k):
        prefix = -prefix - _brace(m)
    return b**-2 * _brace(k) + (b**-2 - a**-2) * prefix


def c1_sum(a, b) -> sym.Rational:
    return sum((c1_coeff(k, a, b) for k in K_RANGE), sym.S.Zero)


def c1_sum_resummed(a, b) -> sym.Rational:
    a, b = check_parameters(a, b)
    braces = sum((_brace(k) for k in K_RANGE), sym.S.Zero)
    prefixes, prefix = sym.S.Zero, sym.S.Zero
    for m in K_RANGE:
        prefixes += prefix
        prefix = -prefix - _brace(m)
    return b**-2 * braces + (b**-2 - a**-2) * prefixes


class InteriorCoefficients(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    n: int
    a: sym.Rational
    b: sym.Rational
    per_k: Dict[int, sym.Rational]
    total: sym.Rational

    @classmethod
    def evaluate(cls, a, b) -> "InteriorCoefficients":
        a, b = check_parameters(a, b)
        per_k = {k: c1_coeff(k, a, b) for k in K_RANGE}
        total = sum(per_k.values(), sym.S.Zero)
        assert total == c1_sum_resummed(a, b), f"c1 sum paths disagree at a={a}, b={b}"
        return cls(n=4, a=a, b=b, per_k=per_k, total=total)


class InteriorTerm(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    left: Operator
    right: Operator
    multiplier: sym.Expr
    formal_tokens: List[str]
    swap_symmetric: bool

    @property
    def expression(self) -> sym.Expr:
        return self.multiplier * R_INTEGRAL


def _multiplier(left: Operator, right: Operator, a, b) -> sym.Expr:
    if left is right:
        return 8 * OMEGA4 / (3 * a * b)
    return 4 * sym.pi * c1_sum(a, b)


def interior_wres(left, right, a, b, n: int = 4) -> InteriorTerm:
    """Interior part as multiplier * int_M R dvol for the pairing (left, right)."""
    if n != 4:
        raise ScopeError(f"The interior closed forms are stated for n = 4, got n = {n}")
    left, right = Operator(left), Operator(right)
    a, b = check_parameters(a, b)

    multiplier = _multiplier(left, right, a, b)
    swapped = _multiplier(left, right, b, a)
    tokens = sorted(str(s) for s in multiplier.free_symbols | {R_INTEGRAL})
    if multiplier.has(sym.pi):
        tokens = sorted(tokens + ["pi"])
    return InteriorTerm(
        left=left,
        right=right,
        multiplier=multiplier,
        formal_tokens=tokens,
        swap_symmetric=sym.simplify(multiplier - swapped) == 0,
    )


class GravitySplit(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    a: sym.Rational
    b: sym.Rational
    binding: KBinding
    k: Optional[int] = None
    interior_constant: sym.Expr
    boundary_constant: sym.Expr

    def boundary_product(self, extrinsic) -> sym.Expr:
        """Boundary constant times a boundary term given as the coefficient of pi K Omega3."""
        return sym.simplify(self.boundary_constant * extrinsic * sym.pi * OMEGA3)


def gravity_split(a, b, binding: KBinding = KBinding.SUMMED, k: Optional[int] = None) -> GravitySplit:
    """Constants relating the interior and boundary residues to the Einstein-Hilbert action.

    With a flat boundary, I_Gr,i = interior_constant * Wres_i and
    I_Gr,b = boundary_constant * Wres_b.
    """
    a, b = check_parameters(a, b)
    binding = KBinding(binding)
    if binding is KBinding.PER_K:
        if k is None:
            raise InvalidParameterError("The per-k binding needs k")
        c1 = c1_coeff(k, a, b)
    else:
        c1 = c1_sum(a, b)
    if c1 == 0:
        raise InvalidParameterError(f"c1 vanishes at a={a}, b={b}, k={k}")

    return GravitySplit(
        a=a,
        b=b,
        binding=binding,
        k=k if binding is KBinding.PER_K else None,
        interior_constant=1 / (64 * sym.pi * c1),
        boundary_constant=-24 / (23 * (a**-2 + b**-2) * sym.pi * OMEGA3),
    )
