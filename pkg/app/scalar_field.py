"""Exact scalar arithmetic for boundary symbols.

Scalars are Gaussian rationals and polynomials in the formal symbol ``h``
(standing for h'(0)). Symbol entries are rational functions of the normal
covariable ``xi`` whose poles lie in {i, -i}. Everything is sympy, nothing
is ever evaluated in floating point.
"""

import re
from typing import List, NamedTuple, Tuple, Union

import sympy as sym
from sympy import I
from sympy.polys.domains import QQ_I
from sympy.polys.polyerrors import CoercionFailed

from app.errors import (
    HDegreeOverflowError,
    IntegrabilityError,
    InvalidLiteralError,
    InvalidParameterError,
    UnsupportedPoleError,
)

XI = sym.Symbol("xi")
H = sym.Symbol("h")

H_DEGREE_CAP = 2
POLES = (I, -I)

Scalar = sym.Expr

_RATIONAL_RE = re.compile(r"^([+-]?\d+)(?:/(\d+))?$")


# Literals


def parse_rational(text: Union[str, int]) -> sym.Rational:
    """Parse a ``p/q`` literal into an exact rational."""
    literal = str(text).replace(" ", "")
    match = _RATIONAL_RE.match(literal)
    if not match:
        raise InvalidLiteralError(f"Invalid rational literal {text!r}, expected 'p/q'")

    numerator = int(match.group(1))
    denominator = int(match.group(2) or 1)
    if denominator == 0:
        raise InvalidLiteralError(f"Zero denominator in rational literal {text!r}")
    return sym.Rational(numerator, denominator)


def parse_gaussian(text: Union[str, int]) -> sym.Expr:
    """Parse ``p/q+r/s*i`` (either part optional) into a Gaussian rational."""
    literal = str(text).replace(" ", "")
    if not literal.endswith("i"):
        return parse_rational(literal)

    body = literal[:-1].rstrip("*")
    split = max(body.rfind("+"), body.rfind("-"))
    if split > 0:
        real_text, imag_text = body[:split], body[split:]
    else:
        real_text, imag_text = "0", body
    if imag_text in ("", "+", "-"):
        imag_text += "1"
    return parse_rational(real_text) + parse_rational(imag_text) * I


def format_rational(value: sym.Rational) -> str:
    value = sym.Rational(value)
    if value.q == 1:
        return str(value.p)
    return f"{value.p}/{value.q}"


def format_gaussian(value) -> str:
    """Canonical text of a Gaussian rational: ``p/q``, ``r/s*i`` or ``p/q+r/s*i``."""
    z = to_gaussian(value)
    real, imag = sym.re(z), sym.im(z)
    if imag == 0:
        return format_rational(real)

    if imag == 1:
        imag_text = "i"
    elif imag == -1:
        imag_text = "-i"
    else:
        imag_text = f"{format_rational(imag)}*i"
    if real == 0:
        return imag_text
    sign = "" if imag_text.startswith("-") else "+"
    return f"{format_rational(real)}{sign}{imag_text}"


# Scalar ring


def to_gaussian(value) -> sym.Expr:
    """Coerce to an exact Gaussian rational, validated through ``QQ_I``."""
    expr = sym.expand(sym.sympify(value))
    try:
        return QQ_I.to_sympy(QQ_I.from_sympy(expr))
    except CoercionFailed as e:
        raise InvalidParameterError(f"Not a Gaussian rational: {value!r}") from e


def check_h_degree(expr: sym.Expr, context: str = "scalar") -> sym.Expr:
    degree = sym.degree(expr, H) if expr != 0 else 0
    if degree > H_DEGREE_CAP:
        raise HDegreeOverflowError(
            f"{context} has degree {degree} in h, cap is {H_DEGREE_CAP}: {expr}"
        )
    return expr


def to_scalar(value) -> sym.Expr:
    """Validate a ScalarRing element: polynomial in h with Gaussian coefficients."""
    expr = sym.expand(sym.sympify(value))
    stray = expr.free_symbols - {H}
    if stray:
        raise InvalidParameterError(f"Scalar {expr} depends on {sorted(map(str, stray))}")
    for coefficient in sym.Poly(expr, H).all_coeffs():
        to_gaussian(coefficient)
    return check_h_degree(expr)


def h_coefficient(expr: sym.Expr) -> sym.Expr:
    """The coefficient of h in a scalar that must be exactly linear in h (or zero)."""
    expr = sym.expand(expr)
    if expr == 0:
        return sym.S.Zero
    poly = sym.Poly(expr, H)
    if poly.degree() != 1 or poly.coeff_monomial(1) != 0:
        raise HDegreeOverflowError(f"Expected a pure multiple of h, got {expr}")
    return to_gaussian(poly.coeff_monomial(H))


# Rational functions of xi


def _divides(numerator: sym.Expr, root: sym.Expr) -> bool:
    return sym.expand(numerator.subs(XI, root)) == 0


def _cancel_root(numerator: sym.Expr, root: sym.Expr, order: int) -> Tuple[sym.Expr, int]:
    while order > 0 and _divides(numerator, root):
        numerator = sym.expand(sym.quo(numerator, XI - root, XI))
        order -= 1
    return numerator, order


def _strip_poles(expr: sym.Expr) -> Tuple[sym.Expr, int, int]:
    """Split ``expr`` into unit * (xi - i)**p * (xi + i)**q, returning (unit, p, q)."""
    expr = sym.expand(expr)
    orders = []
    for root in POLES:
        order = 0
        while sym.degree(expr, XI) > 0 and _divides(expr, root):
            expr = sym.expand(sym.quo(expr, XI - root, XI))
            order += 1
        orders.append(order)

    if expr.has(XI):
        raise UnsupportedPoleError(f"Factor {expr} has roots outside {{i, -i}}")
    try:
        unit = to_gaussian(expr)
    except InvalidParameterError as e:
        raise UnsupportedPoleError(f"Factor {expr} is not a Gaussian unit") from e
    if unit == 0:
        raise UnsupportedPoleError("Zero denominator")
    return unit, orders[0], orders[1]


class RationalFn:
    """``numerator / ((xi - i)**p * (xi + i)**q)`` in lowest terms."""

    __slots__ = ("numerator", "p", "q")

    def __init__(self, numerator=0, p: int = 0, q: int = 0, normalize: bool = True):
        numerator = sym.expand(sym.sympify(numerator))
        if p < 0 or q < 0:
            raise InvalidParameterError(f"Pole orders must be nonnegative, got ({p}, {q})")
        if normalize:
            numerator, p = _cancel_root(numerator, I, p)
            numerator, q = _cancel_root(numerator, -I, q)
        self.numerator = numerator
        self.p = p
        self.q = q

    @classmethod
    def from_expr(cls, expr) -> "RationalFn":
        """Read an arbitrary sympy rational expression in ``xi``."""
        numerator, denominator = sym.together(sym.sympify(expr)).as_numer_denom()
        unit, p, q = _strip_poles(denominator)
        return cls(sym.expand(numerator / unit), p, q)

    def reciprocal(self) -> "RationalFn":
        """1/f, defined when the numerator factors as unit * (xi - i)**m * (xi + i)**k."""
        if self.is_zero():
            raise InvalidParameterError("Reciprocal of the zero function")
        unit, m, k = _strip_poles(self.numerator)
        return RationalFn(
            sym.expand((XI - I) ** self.p * (XI + I) ** self.q / unit), m, k
        )

    def is_zero(self) -> bool:
        return self.numerator == 0

    def as_expr(self) -> sym.Expr:
        return self.numerator / ((XI - I) ** self.p * (XI + I) ** self.q)

    def evaluate(self, xi_value) -> sym.Expr:
        value = sym.sympify(xi_value)
        if value in POLES:
            raise InvalidParameterError(f"Cannot evaluate at the pole {value}")
        return sym.expand(self.as_expr().subs(XI, value))

    def h_degree(self) -> int:
        return 0 if self.is_zero() else int(sym.degree(self.numerator, H))

    def lifted(self, p: int, q: int) -> sym.Expr:
        """Numerator over the larger denominator ``(xi - i)**p (xi + i)**q``."""
        return sym.expand(
            self.numerator * (XI - I) ** (p - self.p) * (XI + I) ** (q - self.q)
        )

    def __add__(self, other) -> "RationalFn":
        other = as_rational_fn(other)
        p, q = max(self.p, other.p), max(self.q, other.q)
        return RationalFn(self.lifted(p, q) + other.lifted(p, q), p, q)

    __radd__ = __add__

    def __neg__(self) -> "RationalFn":
        return RationalFn(-self.numerator, self.p, self.q, normalize=False)

    def __sub__(self, other) -> "RationalFn":
        return self + (-as_rational_fn(other))

    def __rsub__(self, other) -> "RationalFn":
        return as_rational_fn(other) - self

    def __mul__(self, other) -> "RationalFn":
        other = as_rational_fn(other)
        return RationalFn(self.numerator * other.numerator, self.p + other.p, self.q + other.q)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        try:
            return (self - other).is_zero()
        except (InvalidParameterError, UnsupportedPoleError):
            return False

    __hash__ = None

    def __repr__(self) -> str:
        return f"RationalFn({self.numerator}, p={self.p}, q={self.q})"


def as_rational_fn(value) -> RationalFn:
    if isinstance(value, RationalFn):
        return value
    expr = sym.sympify(value)
    if expr.is_polynomial(XI):
        return RationalFn(expr)
    return RationalFn.from_expr(expr)


# Partial fractions and projections


class PoleTerm(NamedTuple):
    pole: sym.Expr
    order: int
    coefficient: sym.Expr


class PartialFractions(NamedTuple):
    polynomial: sym.Expr
    terms: Tuple[PoleTerm, ...]

    def recompose(self) -> RationalFn:
        total = RationalFn(self.polynomial)
        for term in self.terms:
            if term.pole == I:
                total = total + RationalFn(term.coefficient, term.order, 0)
            else:
                total = total + RationalFn(term.coefficient, 0, term.order)
        return total


def _principal_part(f: RationalFn, pole: sym.Expr) -> List[sym.Expr]:
    """Laurent coefficients of (xi - pole)**-k for k = 1..order at ``pole``."""
    order, other_order = (f.p, f.q) if pole == I else (f.q, f.p)
    if order == 0:
        return []

    gap = 2 * pole
    shifted = sym.expand(f.numerator.subs(XI, XI + pole))
    taylor = [shifted.coeff(XI, m) for m in range(order)]
    # (gap + s)**(-other_order) expanded around s = 0
    tail = [
        (-1) ** m * sym.binomial(other_order + m - 1, m) * gap ** (-other_order - m)
        for m in range(order)
    ]
    series = [
        sym.expand(sum(taylor[m] * tail[s - m] for m in range(s + 1))) for s in range(order)
    ]
    return [series[order - k] for k in range(1, order + 1)]


def pf_decompose(f) -> PartialFractions:
    f = as_rational_fn(f)
    denominator = sym.expand((XI - I) ** f.p * (XI + I) ** f.q)
    if denominator == 1:
        polynomial = f.numerator
    else:
        polynomial = sym.expand(sym.quo(f.numerator, denominator, XI))

    terms = []
    for pole in POLES:
        for order, coefficient in enumerate(_principal_part(f, pole), start=1):
            if coefficient != 0:
                terms.append(PoleTerm(pole, order, coefficient))
    return PartialFractions(polynomial, tuple(terms))


def recompose(decomposition: PartialFractions) -> RationalFn:
    return decomposition.recompose()


def residue(f, pole: sym.Expr = I) -> sym.Expr:
    if pole not in POLES:
        raise UnsupportedPoleError(f"Residues are only taken at i or -i, got {pole}")
    coefficients = _principal_part(as_rational_fn(f), pole)
    return coefficients[0] if coefficients else sym.S.Zero


def pi_plus(f) -> RationalFn:
    """Keep the partial-fraction terms with pole at +i."""
    f = as_rational_fn(f)
    numerator = sum(
        (c * (XI - I) ** (f.p - k) for k, c in enumerate(_principal_part(f, I), start=1)),
        sym.S.Zero,
    )
    return RationalFn(numerator, f.p, 0)


def pi_prime(f) -> sym.Expr:
    """``i`` times the residue at +i, i.e. (1/2pi) times the upper contour integral."""
    return sym.expand(I * residue(f, I))


def integrate_line(f) -> sym.Expr:
    """Integral over the real line, returned as the exact coefficient of pi."""
    f = as_rational_fn(f)
    if f.is_zero():
        return sym.S.Zero
    numerator_degree = sym.degree(f.numerator, XI)
    if numerator_degree > f.p + f.q - 2:
        raise IntegrabilityError(
            f"Numerator degree {numerator_degree} too high for denominator degree {f.p + f.q}"
        )
    return check_h_degree(sym.expand(2 * I * residue(f, I)), "line integral")


def diff_xi(f, k: int = 1) -> RationalFn:
    if k < 0:
        raise InvalidParameterError(f"Derivative order must be nonnegative, got {k}")
    f = as_rational_fn(f)
    for _ in range(k):
        numerator = (
            sym.diff(f.numerator, XI) * (XI - I) * (XI + I)
            - f.p * f.numerator * (XI + I)
            - f.q * f.numerator * (XI - I)
        )
        f = RationalFn(numerator, f.p + 1, f.q + 1)
    return f
