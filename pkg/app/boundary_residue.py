"""Boundary term of the residue for a pairing (left^-1, right^-1).

Each case contributes

    prefactor * int_R tr[d_xn^j d_xi'^alpha d_xi^k pi+ sigma_r(left)
                         * d_x'^alpha d_xi^(j+1) d_xn^k sigma_l(right)] d xi_n

times the volume of the unit sphere of the boundary. Values are returned as
the exact coefficient of pi h'(0) Omega_3 (n = 4) or pi Omega_2 (n = 3).
"""

from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple

import sympy as sym
from pydantic import BaseModel, ConfigDict

from app.coeff_reconstruct import BoundaryValue, SampleSet, reconstruct
from app.errors import (
    InternalConsistencyError,
    InvalidParameterError,
    ModelingBugError,
    ScopeError,
    SphereIntegrationUnsupportedError,
)
from app.exterior_algebra import Covector, Operator, check_parameters
from app.scalar_field import RationalFn, h_coefficient, integrate_line, to_gaussian
from app.symbol_calculus import (
    DEFAULT_PROBE_POINTS,
    OperatorSymbols,
    RationalSymbol,
    operator_symbols,
)

SUPPORTED_DIMENSIONS = (3, 4)
CASE_ORDER = ("a", "a(I)", "a(II)", "a(III)", "b", "c")
UNITS = {3: "pi*Omega2", 4: "pi*h'(0)*Omega3"}
EXTRINSIC_UNITS = "pi*K*Omega3"

__all__ = [
    "BoundaryCase",
    "BoundaryValue",
    "BoundaryEvaluation",
    "LeibnizResult",
    "enumerate_cases",
    "case_integrand",
    "case_value",
    "case_form",
    "by_parts_integrand",
    "by_parts_form",
    "leibniz_case_c",
    "phi_total",
    "to_extrinsic",
]


class BoundaryCase(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: str
    n: int
    r: int
    l: int
    j: int
    k: int
    alpha: int

    @property
    def prefactor(self) -> sym.Expr:
        """(-i)^(|alpha|+j+k+1) / (alpha! (j+k+1)!), alpha! = 1 for |alpha| <= 1."""
        return sym.expand(
            (-sym.I) ** (self.alpha + self.j + self.k + 1) / sym.factorial(self.j + self.k + 1)
        )

    def multi_indices(self) -> List[Tuple[int, ...]]:
        return [
            index
            for index in product(range(self.alpha + 1), repeat=self.n - 1)
            if sum(index) == self.alpha
        ]


def _case_name(n: int, r: int, l: int, j: int, k: int, alpha: int) -> str:
    if (r, l) == (-2, -1):
        return "b"
    if (r, l) == (-1, -2):
        return "c"
    if n == 3:
        return "a"
    if alpha:
        return "a(I)"
    return "a(II)" if j else "a(III)"


def enumerate_cases(n: int, p1: int = 1, p2: int = 1) -> List[BoundaryCase]:
    """All (r, l, j, k, |alpha|) with r - k - |alpha| + l - j - 1 = -n, r <= -p1, l <= -p2."""
    if n not in SUPPORTED_DIMENSIONS:
        raise ScopeError(f"Boundary terms are modeled for n in {SUPPORTED_DIMENSIONS}, got {n}")
    if (p1, p2) != (1, 1):
        raise ScopeError(f"Only first-order pairings are modeled, got orders ({p1}, {p2})")

    budget = n - 1
    cases = []
    for minus_r in range(p1, budget + 1):
        for minus_l in range(p2, budget + 1 - minus_r):
            rest = budget - minus_r - minus_l
            for alpha in range(rest + 1):
                for j in range(rest - alpha + 1):
                    k = rest - alpha - j
                    r, l = -minus_r, -minus_l
                    cases.append(
                        BoundaryCase(
                            name=_case_name(n, r, l, j, k, alpha),
                            n=n, r=r, l=l, j=j, k=k, alpha=alpha,
                        )
                    )
    return sorted(cases, key=lambda case: CASE_ORDER.index(case.name))


def _tangential_index(multi_index: Tuple[int, ...]) -> int:
    return multi_index.index(1) + 1


def _left_factor(case: BoundaryCase, symbols: OperatorSymbols, multi_index) -> RationalSymbol:
    jet = symbols.order(case.r)
    if case.alpha:
        if case.alpha > 1 or case.r != -1 or case.j:
            raise ScopeError(f"Tangential xi-derivatives are modeled for q-1 only, case {case.name}")
        base = symbols.q1_tangential_xi_derivative(_tangential_index(multi_index))
    elif case.j == 1:
        base = jet.normal_derivative()
    elif case.j == 0:
        base = jet.value
    else:
        raise ScopeError(f"Normal derivative of order {case.j} is not modeled")
    return base.pi_plus().diff_xi(case.k)


def _right_factor(case: BoundaryCase, symbols: OperatorSymbols, multi_index) -> RationalSymbol:
    jet = symbols.order(case.l)
    if case.alpha:
        base = jet.tangential_derivative(_tangential_index(multi_index))
    elif case.k == 1:
        base = jet.normal_derivative()
    elif case.k == 0:
        base = jet.value
    else:
        raise ScopeError(f"Normal derivative of order {case.k} is not modeled")
    return base.diff_xi(case.j + 1)


def case_integrand(
    case: BoundaryCase, left_symbols: OperatorSymbols, right_symbols: OperatorSymbols
) -> RationalFn:
    """The trace integrand (without prefactor) summed over multi-indices of order |alpha|."""
    total = RationalFn(0)
    for multi_index in case.multi_indices():
        left = _left_factor(case, left_symbols, multi_index)
        right = _right_factor(case, right_symbols, multi_index)
        if case.alpha and not right.is_zero():
            raise ModelingBugError(f"Tangential x-derivative nonzero in case {case.name}")
        total = total + left.trace_product(right)
    return total


def by_parts_integrand(left_symbols: OperatorSymbols, right_symbols: OperatorSymbols) -> RationalFn:
    """tr[d_xi pi+ q-1(left) * q-2(right)], the integrated-by-parts form of case c."""
    return left_symbols.q1.value.pi_plus().diff_xi().trace_product(right_symbols.q2.value)


def by_parts_form(
    left: Operator,
    right: Operator,
    a,
    b,
    directions: Sequence[Covector],
    probe_points=DEFAULT_PROBE_POINTS,
) -> RationalFn:
    """The direction-free by-parts integrand at (a, b)."""
    a, b = check_parameters(a, b)
    _check_directions(directions[0].dim if directions else 0, directions)
    left_symbols = _symbols_for(left, a, b, directions, probe_points)
    right_symbols = _symbols_for(right, a, b, directions, probe_points)
    integrands = [by_parts_integrand(ls, rs) for ls, rs in zip(left_symbols, right_symbols)]
    return _direction_independent("By-parts", integrands, directions)


def _in_units(n: int, integral: sym.Expr) -> sym.Expr:
    """Strip the h'(0) unit at n = 4; at n = 3 the integral must be free of h."""
    if n == 4:
        return h_coefficient(integral)
    try:
        return to_gaussian(integral)
    except InvalidParameterError as e:
        raise ModelingBugError(f"n=3 integral depends on h: {integral}") from e


def _check_h_degree(n: int, integrand: RationalFn, case_name: str) -> None:
    if integrand.is_zero():
        return
    expected = 1 if n == 4 else 0
    if integrand.h_degree() != expected:
        raise ModelingBugError(
            f"Case {case_name} integrand has h-degree {integrand.h_degree()}, expected {expected}"
        )


def _symbols_for(
    operator: Operator, a, b, directions: Sequence[Covector], probe_points
) -> List[OperatorSymbols]:
    return [operator_symbols(a, b, Operator(operator), d, tuple(probe_points)) for d in directions]


def _direction_independent(
    label: str, integrands: Sequence[RationalFn], directions: Sequence[Covector]
) -> RationalFn:
    reference = integrands[0]
    for integrand, direction in zip(integrands[1:], directions[1:]):
        if not integrand == reference:
            raise SphereIntegrationUnsupportedError(
                f"{label} integrand depends on the direction: {directions[0]} vs {direction}"
            )
    return reference


def _check_directions(n: int, directions: Sequence[Covector]) -> None:
    if not directions:
        raise InvalidParameterError("At least one xi' direction is required")
    for direction in directions:
        if direction.dim != n:
            raise InvalidParameterError(f"Direction {direction} does not live in dimension {n}")


def case_value(
    case: BoundaryCase,
    left: Operator,
    right: Operator,
    a,
    b,
    directions: Sequence[Covector],
    probe_points=DEFAULT_PROBE_POINTS,
) -> Tuple[sym.Expr, RationalFn]:
    """(lambda, integrand): the case contribution at (a, b) and its direction-free integrand."""
    a, b = check_parameters(a, b)
    _check_directions(case.n, directions)
    left_symbols = _symbols_for(left, a, b, directions, probe_points)
    right_symbols = _symbols_for(right, a, b, directions, probe_points)

    integrands = [case_integrand(case, ls, rs) for ls, rs in zip(left_symbols, right_symbols)]
    integrand = _direction_independent(f"Case {case.name}", integrands, directions)
    _check_h_degree(case.n, integrand, case.name)
    value = sym.expand(case.prefactor * _in_units(case.n, integrate_line(integrand)))
    return value, integrand


def case_form(
    case: BoundaryCase,
    left: Operator,
    right: Operator,
    points: Sequence[Tuple],
    directions: Sequence[Covector],
    probe_points=DEFAULT_PROBE_POINTS,
) -> BoundaryValue:
    """The case as an exact element of the reconstruction basis."""
    samples = SampleSet.from_function(
        lambda a, b: case_value(case, left, right, a, b, directions, probe_points)[0], points
    )
    return reconstruct(samples)


class LeibnizResult(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    correction: sym.Expr
    via_leibniz: sym.Expr
    direct: sym.Expr


def leibniz_case_c(
    left: Operator,
    right: Operator,
    a,
    b,
    directions: Sequence[Covector],
    probe_points=DEFAULT_PROBE_POINTS,
) -> LeibnizResult:
    """Case c as case b minus -i int tr[d_xi q-1 * q-2], checked against the direct path."""
    if Operator(left) is not Operator(right):
        raise InvalidParameterError("The Leibniz reduction needs left == right")
    a, b = check_parameters(a, b)
    n = directions[0].dim if directions else 0
    if n != 4:
        raise ScopeError(f"Cases b and c exist only for n = 4, got {n}")
    _check_directions(n, directions)

    symbols = _symbols_for(left, a, b, directions, probe_points)
    integrands = [s.q1.value.diff_xi().trace_product(s.q2.value) for s in symbols]
    integrand = _direction_independent("Leibniz correction", integrands, directions)
    correction = sym.expand(-sym.I * _in_units(n, integrate_line(integrand)))

    cases = {case.name: case for case in enumerate_cases(n)}
    value_b, _ = case_value(cases["b"], left, right, a, b, directions, probe_points)
    direct, _ = case_value(cases["c"], left, right, a, b, directions, probe_points)
    via_leibniz = sym.expand(value_b - correction)
    if via_leibniz != direct:
        raise InternalConsistencyError(
            f"Leibniz path gives {via_leibniz}, direct case c gives {direct} at a={a}, b={b}"
        )
    return LeibnizResult(correction=correction, via_leibniz=via_leibniz, direct=direct)


class CaseEvaluation(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    case: BoundaryCase
    value: sym.Expr
    integrand: RationalFn


class BoundaryEvaluation(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    n: int
    left: Operator
    right: Operator
    a: sym.Rational
    b: sym.Rational
    cases: List[CaseEvaluation]
    total: sym.Expr

    def values(self) -> Dict[str, sym.Expr]:
        return {evaluation.case.name: evaluation.value for evaluation in self.cases}

    def integrand(self, name: str) -> Optional[RationalFn]:
        for evaluation in self.cases:
            if evaluation.case.name == name:
                return evaluation.integrand
        return None


def phi_total(
    n: int,
    left: Operator,
    right: Operator,
    a,
    b,
    directions: Sequence[Covector],
    probe_points=DEFAULT_PROBE_POINTS,
) -> BoundaryEvaluation:
    """Every case of the pairing at (a, b) and their sum."""
    a, b = check_parameters(a, b)
    evaluations = []
    for case in enumerate_cases(n):
        value, integrand = case_value(case, left, right, a, b, directions, probe_points)
        evaluations.append(CaseEvaluation(case=case, value=value, integrand=integrand))

    total = sym.expand(sum((e.value for e in evaluations), sym.S.Zero))
    return BoundaryEvaluation(
        n=n, left=Operator(left), right=Operator(right), a=a, b=b, cases=evaluations, total=total
    )


def extrinsic_factor(n: int) -> sym.Rational:
    """h'(0) = -2K/(n-1) for the collar metric."""
    return sym.Rational(-2, n - 1)


def to_extrinsic(value: BoundaryValue, n: int) -> BoundaryValue:
    """Re-express a multiple of h'(0) as a multiple of the extrinsic curvature K."""
    if n != 4:
        raise ScopeError(f"The extrinsic form is defined for the n = 4 boundary term, got n = {n}")
    return value.scale(extrinsic_factor(n))
