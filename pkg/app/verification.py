"""Verification suites: engine invariants plus every golden value of a suite."""

from enum import Enum
from typing import Callable, Dict, List, Sequence, Tuple

import sympy as sym
from pydantic import BaseModel

from app.config import EngineSettings, RunConfig
from app.exterior_algebra import (
    Covector,
    Operator,
    clifford_actions,
    exterior_algebra,
    rational_unit_directions,
)
from app.golden import CheckStatus, GoldenBook, GoldenCheck, check_entry, check_projection, failed
from app.interior_term import K_RANGE, c1_coeff, c1_coeff_resummed, c1_sum, interior_wres
from app.report import WresReport, build_report
from app.scalar_field import XI, RationalFn, pi_plus
from app.symbol_calculus import (
    closed_form_q1,
    closed_form_q2,
    composition_residual,
    operator_symbols,
)
from app.trace_identities import VANISHING_TRACES, trace_over_directions

# Parameter points for the identity checks: >= 5 pairs, asymmetric in a and b
IDENTITY_POINTS: Tuple[Tuple[int, int], ...] = ((1, 1), (1, 2), (2, 3), (3, 5), (-1, 2), (5, 7))
INTERIOR_POINTS = tuple(
    (sym.Rational(p), sym.Rational(q)) for p, q in
    (("1", "1"), ("1", "2"), ("2", "1"), ("2", "3"), ("3", "2"), ("1/2", "5"), ("-3", "4"),
     ("7", "1/3"), ("5/2", "-2"), ("9", "4"), ("11", "13"))
)
PAIRINGS = ((4, Operator.D, Operator.DSTAR), (4, Operator.D, Operator.D), (3, Operator.D, Operator.DSTAR))
TRACE_DIRECTIONS = 10
CLOSED_FORM_POINTS = IDENTITY_POINTS[1:]
CLOSED_FORM_DIRECTIONS = 5


class Suite(str, Enum):
    ALGEBRA = "algebra"
    LEMMAS = "lemmas"
    CASES = "cases"
    ALL = "all"

    def members(self) -> Tuple[str, ...]:
        if self is Suite.ALL:
            return ("algebra", "lemmas", "cases")
        return (self.value,)


class PropertyCheck(BaseModel):
    suite: str
    name: str
    passed: bool
    detail: str = ""


class VerificationResult(BaseModel):
    properties: List[PropertyCheck]
    checks: List[GoldenCheck]

    def failed_properties(self) -> List[PropertyCheck]:
        return [p for p in self.properties if not p.passed]

    def failed_checks(self) -> List[GoldenCheck]:
        return failed(self.checks)

    @property
    def exit_code(self) -> int:
        if self.failed_properties():
            return 1
        return 2 if self.failed_checks() else 0


def _property(suite: str, name: str, test: Callable[[], bool]) -> PropertyCheck:
    try:
        passed = bool(test())
        return PropertyCheck(suite=suite, name=name, passed=passed, detail="" if passed else "identity fails")
    except Exception as e:
        return PropertyCheck(suite=suite, name=name, passed=False, detail=f"{type(e).__name__}: {e}")


def _is_zero(matrix) -> bool:
    return all(sym.expand(entry) == 0 for entry in matrix)


# Algebra


def _clifford_identities(n: int, directions: Sequence[Covector]) -> bool:
    algebra = exterior_algebra(n)
    identity = algebra.identity()
    for v in directions + [Covector.normal(n)]:
        e, i = algebra.eps(v), algebra.iota(v)
        if not (_is_zero(e * e) and _is_zero(i * i) and _is_zero(e * i + i * e - identity)):
            return False
        for a, b in IDENTITY_POINTS:
            actions = clifford_actions(a, b, v, algebra)
            if not _is_zero(actions.c * actions.c + identity):
                return False
            if not _is_zero(actions.c_hat * actions.c_hat - identity):
                return False
            if not _is_zero(actions.c_tilde * actions.c_tilde + a * b * identity):
                return False
            if not _is_zero(actions.c_tilde * actions.c_bar + actions.c_bar * actions.c_tilde + (a**2 + b**2) * identity):
                return False
    return True


def _anticommutation(n: int) -> bool:
    algebra = exterior_algebra(n)
    for j in range(1, n + 1):
        for k in range(1, n + 1):
            e_j, e_k = Covector.basis(n, j), Covector.basis(n, k)
            anti = algebra.eps(e_j) * algebra.iota(e_k) + algebra.iota(e_k) * algebra.eps(e_j)
            expected = algebra.identity() if j == k else algebra.zero()
            if not _is_zero(anti - expected):
                return False
    return True


_PROJECTION_SAMPLES = (
    1 / (1 + XI**2) ** 2,
    XI / (XI - sym.I) ** 3,
    (XI**2 - 3) / ((XI - sym.I) ** 2 * (XI + sym.I) ** 3),
    sym.S.One / (XI + sym.I) ** 2,
)


def _projection_idempotent() -> bool:
    for sample in _PROJECTION_SAMPLES:
        once = pi_plus(RationalFn.from_expr(sample))
        if not pi_plus(once) == once:
            return False
    return True


def _projection_kills_lower() -> bool:
    lower = (sym.S.One / (XI + sym.I), (XI - 2) / (XI + sym.I) ** 3, sym.S.One / (XI + sym.I) ** 4)
    return all(pi_plus(RationalFn.from_expr(f)).is_zero() for f in lower)


def algebra_suite(settings: EngineSettings, book: GoldenBook) -> Tuple[List[PropertyCheck], List[GoldenCheck]]:
    properties = []
    for n in (3, 4):
        directions = settings.directions_for(n, len(settings.directions.get(str(n), [])) or 2)
        properties.append(_property("algebra", f"Clifford identities n={n}", lambda n=n, d=directions: _clifford_identities(n, d)))
        properties.append(_property("algebra", f"eps/iota anticommutation n={n}", lambda n=n: _anticommutation(n)))
    properties.append(_property("algebra", "pi+ idempotent", _projection_idempotent))
    properties.append(_property("algebra", "pi+ annihilates H-", _projection_kills_lower))

    checks = [check_projection(entry) for entry in book.select(suites=["algebra"]) if entry.quantity == "projection"]
    return properties, checks


# Lemmas


def _symbols_match_closed_forms(a, b, which: Operator, direction: Covector, probes) -> bool:
    symbols = operator_symbols(sym.Rational(a), sym.Rational(b), which, direction, probes)
    q1 = closed_form_q1(a, b, which, direction)
    if not (symbols.q1.value.equals(q1.value) and symbols.q1.normal_derivative().equals(q1.dxn)):
        return False
    return symbols.q2.value.equals(closed_form_q2(a, b, which, direction))


def _residual_vanishes(a, b, which: Operator, direction: Covector, probes) -> bool:
    s = operator_symbols(sym.Rational(a), sym.Rational(b), which, direction, probes)
    return composition_residual(s.p1, s.p0, s.q1, s.q2, s.xi_derivatives).is_zero()


def _swap_maps_symbols(a, b, direction: Covector, probes) -> bool:
    a, b = sym.Rational(a), sym.Rational(b)
    star = operator_symbols(a, b, Operator.DSTAR, direction, probes)
    plain = operator_symbols(b, a, Operator.D, direction, probes)
    return star.q1.value.equals(plain.q1.value) and star.q2.value.equals(plain.q2.value)


def _vanishing_traces(directions: Sequence[Covector]) -> bool:
    return all(
        trace_over_directions(name, a, b, directions) == 0
        for name in VANISHING_TRACES
        for a, b in IDENTITY_POINTS
    )


def lemmas_suite(settings: EngineSettings, book: GoldenBook) -> Tuple[List[PropertyCheck], List[GoldenCheck]]:
    probes = settings.probes()
    properties = []
    for n in (3, 4):
        directions = settings.directions_for(n, CLOSED_FORM_DIRECTIONS)
        for which in Operator:
            for a, b in CLOSED_FORM_POINTS:
                for direction in directions:
                    label = f"{which.value} n={n} a={a} b={b} xi'={direction}"
                    properties.append(_property("lemmas", f"closed forms {label}", lambda a=a, b=b, w=which, d=direction: _symbols_match_closed_forms(a, b, w, d, probes)))
                    properties.append(_property("lemmas", f"composition residual {label}", lambda a=a, b=b, w=which, d=direction: _residual_vanishes(a, b, w, d, probes)))
        properties.append(_property("lemmas", f"a<->b swap maps D to Dstar n={n}", lambda d=directions: all(_swap_maps_symbols(2, 3, x, probes) for x in d)))

    all_directions = rational_unit_directions(4, TRACE_DIRECTIONS)
    properties.append(_property("lemmas", "sandwich traces that vanish", lambda: _vanishing_traces(all_directions)))

    checks = []
    for entry in book.select(suites=["lemmas"]):
        name = entry.quantity.partition(":")[2]
        directions = rational_unit_directions(entry.dim, TRACE_DIRECTIONS)
        results = [
            check_entry(entry, trace_over_directions(name, a, b, directions), a, b)
            for a, b in IDENTITY_POINTS
        ]
        # one check per identity: the first disagreement, else the last point
        checks.append(next((c for c in results if c.status is not CheckStatus.OK), results[-1]))
    return properties, checks


# Cases


def _c1_dual_path() -> bool:
    return all(
        c1_coeff(k, a, b) == c1_coeff_resummed(k, a, b) for k in K_RANGE for a, b in INTERIOR_POINTS
    )


def _c1_symmetric_sum() -> bool:
    return all(c1_sum(a, b) == c1_sum(b, a) for a, b in INTERIOR_POINTS)


def _interior_scaling() -> bool:
    for a, b in INTERIOR_POINTS:
        for scale in (sym.Rational(2), sym.Rational(1, 3)):
            base = interior_wres(Operator.D, Operator.D, a, b).multiplier
            scaled = interior_wres(Operator.D, Operator.D, scale * a, scale * b).multiplier
            if sym.simplify(scaled * scale**2 - base) != 0:
                return False
    return True


def cases_suite(settings: EngineSettings, book: GoldenBook) -> Tuple[List[PropertyCheck], List[GoldenCheck]]:
    properties = [
        _property("cases", "c1 dual-path agreement", _c1_dual_path),
        _property("cases", "c1 sum symmetric in a<->b", _c1_symmetric_sum),
        _property("cases", "(D, D) interior scales as 1/(ab)", _interior_scaling),
    ]

    checks: List[GoldenCheck] = []
    case_keys = {(e.eq, e.quantity, e.dim, e.left, e.right) for e in book.select(suites=["cases"])}
    reports: Dict[Tuple[int, Operator, Operator], WresReport] = {}
    for dim, left, right in PAIRINGS + ((4, Operator.DSTAR, Operator.D),):
        cfg = RunConfig(dim=dim, left=left, right=right, a="2", b="3", samples=2)
        report = build_report(cfg, settings, book)
        reports[(dim, left, right)] = report
        checks.extend(c for c in report.checks if (c.eq, c.quantity, dim, left, right) in case_keys)
        if report.boundary.leibniz is not None:
            leibniz = report.boundary.leibniz
            properties.append(
                _property("cases", f"Leibniz path equals direct case c ({left.value}, {right.value})",
                          lambda l=leibniz: l.via_leibniz == l.direct)
            )

    forward = reports[(4, Operator.D, Operator.DSTAR)].boundary
    backward = reports[(4, Operator.DSTAR, Operator.D)].boundary

    def _swapped() -> bool:
        for f, g in zip(forward.cases, backward.cases):
            if (f.coeffs["a2inv"], f.coeffs["b2inv"]) != (g.coeffs["b2inv"], g.coeffs["a2inv"]):
                return False
        return True

    properties.append(_property("cases", "(Dstar, D) is the a<->b swap of (D, Dstar)", _swapped))
    return properties, checks


SUITE_RUNNERS = {
    "algebra": algebra_suite,
    "lemmas": lemmas_suite,
    "cases": cases_suite,
}


def run_verify(suite: Suite, settings: EngineSettings, book: GoldenBook) -> VerificationResult:
    properties: List[PropertyCheck] = []
    checks: List[GoldenCheck] = []
    for member in Suite(suite).members():
        print(f"🔄 Running suite {member}...")
        p, c = SUITE_RUNNERS[member](settings, book)
        properties.extend(p)
        checks.extend(c)
        print(f"✅ Suite {member}: {sum(x.passed for x in p)}/{len(p)} properties, {len(c)} golden checks")
    return VerificationResult(properties=properties, checks=checks)
