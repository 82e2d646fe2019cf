"""Named trace identities over the exterior algebra at the boundary point.

Each identity is a function of (a, b, xi') returning a scalar in h; p0 is
the order-zero symbol of D and c-tilde = a eps - b iota.
"""

from typing import Callable, Dict, Sequence

import sympy as sym

from app.errors import InvalidParameterError, SphereIntegrationUnsupportedError
from app.exterior_algebra import (
    Covector,
    Endo,
    Operator,
    check_parameters,
    clifford_actions,
    exterior_algebra,
    p0_matrix,
    trace,
)
from app.scalar_field import H

TraceFn = Callable[[sym.Rational, sym.Rational, Covector], sym.Expr]


def _parts(a, b, direction: Covector):
    n = direction.dim
    algebra = exterior_algebra(n)
    normal = Covector.normal(n)
    return (
        algebra,
        clifford_actions(a, b, direction, algebra).c_tilde,
        clifford_actions(a, b, normal, algebra).c_tilde,
        p0_matrix(a, b, Operator.D, n),
        normal,
    )


def _sandwich(outer_left: str, outer_right: str, last: str) -> TraceFn:
    """tr[c~(u) p0 c~(v) w], u, v in {xi', dxn}, w one of eps/iota of xi' or dxn."""

    def evaluate(a, b, direction: Covector) -> sym.Expr:
        algebra, c_tangent, c_normal, p0, normal = _parts(a, b, direction)
        pick = {"tangent": c_tangent, "normal": c_normal}
        covector = direction if last.endswith("'") else normal
        closing: Endo = algebra.eps(covector) if last.startswith("eps") else algebra.iota(covector)
        return trace(pick[outer_left] * p0 * pick[outer_right] * closing)

    return evaluate


def _p0_eps_normal(a, b, direction: Covector) -> sym.Expr:
    algebra, _, _, p0, normal = _parts(a, b, direction)
    return trace(p0 * algebra.eps(normal))


def _hat_sum(a, b, direction: Covector) -> sym.Expr:
    """sum_{i<n} tr[eps(dxn) c~(e_i) c^(e_i) c^(e_n)]."""
    n = direction.dim
    algebra = exterior_algebra(n)
    normal = clifford_actions(a, b, Covector.normal(n), algebra)
    total = sym.S.Zero
    for i in range(1, n):
        actions = clifford_actions(a, b, Covector.basis(n, i), algebra)
        total += trace(algebra.eps(Covector.normal(n)) * actions.c_tilde * actions.c_hat * normal.c_hat)
    return sym.expand(total)


def _plain_sum(a, b, direction: Covector) -> sym.Expr:
    """sum_{i<n} tr[eps(dxn) c~(e_i) c(e_i) c(e_n)]."""
    n = direction.dim
    algebra = exterior_algebra(n)
    normal = clifford_actions(a, b, Covector.normal(n), algebra)
    total = sym.S.Zero
    for i in range(1, n):
        actions = clifford_actions(a, b, Covector.basis(n, i), algebra)
        total += trace(algebra.eps(Covector.normal(n)) * actions.c_tilde * actions.c * normal.c)
    return sym.expand(total)


def _normal_derivative_iota(algebra, direction: Covector) -> Endo:
    # d_xn iota(xi') at the boundary point under the collar metric
    return H * algebra.iota(direction)


def _eps_iota_tangent(a, b, direction: Covector) -> sym.Expr:
    algebra = exterior_algebra(direction.dim)
    return trace(algebra.eps(direction) * algebra.iota(direction))


def _eps_iota_normal(a, b, direction: Covector) -> sym.Expr:
    algebra = exterior_algebra(direction.dim)
    normal = Covector.normal(direction.dim)
    return trace(algebra.eps(normal) * algebra.iota(normal))


def _dxn_iota_eps(a, b, direction: Covector) -> sym.Expr:
    algebra = exterior_algebra(direction.dim)
    return trace(_normal_derivative_iota(algebra, direction) * algebra.eps(direction))


def _dxn_iota_iota_n_eps_eps_n(a, b, direction: Covector) -> sym.Expr:
    algebra = exterior_algebra(direction.dim)
    normal = Covector.normal(direction.dim)
    return trace(
        _normal_derivative_iota(algebra, direction)
        * algebra.iota(normal)
        * algebra.eps(direction)
        * algebra.eps(normal)
    )


def _dxn_iota_iota_eps_eps_n(a, b, direction: Covector) -> sym.Expr:
    algebra = exterior_algebra(direction.dim)
    normal = Covector.normal(direction.dim)
    return trace(
        _normal_derivative_iota(algebra, direction)
        * algebra.iota(direction)
        * algebra.eps(direction)
        * algebra.eps(normal)
    )


TRACE_IDENTITIES: Dict[str, TraceFn] = {
    "c'p0c'eps_n": _sandwich("tangent", "tangent", "eps_n"),
    "c'p0c'iota_n": _sandwich("tangent", "tangent", "iota_n"),
    "c_np0c_neps_n": _sandwich("normal", "normal", "eps_n"),
    "c_np0c_niota_n": _sandwich("normal", "normal", "iota_n"),
    "c_np0c'eps'": _sandwich("normal", "tangent", "eps'"),
    "c_np0c'iota'": _sandwich("normal", "tangent", "iota'"),
    "c'p0c_neps'": _sandwich("tangent", "normal", "eps'"),
    "c'p0c_niota'": _sandwich("tangent", "normal", "iota'"),
    "c'p0c'eps'": _sandwich("tangent", "tangent", "eps'"),
    "c'p0c'iota'": _sandwich("tangent", "tangent", "iota'"),
    "c_np0c_neps'": _sandwich("normal", "normal", "eps'"),
    "c_np0c_niota'": _sandwich("normal", "normal", "iota'"),
    "c_np0c'eps_n": _sandwich("normal", "tangent", "eps_n"),
    "c_np0c'iota_n": _sandwich("normal", "tangent", "iota_n"),
    "c'p0c_neps_n": _sandwich("tangent", "normal", "eps_n"),
    "c'p0c_niota_n": _sandwich("tangent", "normal", "iota_n"),
    "p0eps_n": _p0_eps_normal,
    "sum eps_n c~_i c^_i c^_n": _hat_sum,
    "sum eps_n c~_i c_i c_n": _plain_sum,
    "eps'iota'": _eps_iota_tangent,
    "eps_niota_n": _eps_iota_normal,
    "dxn(iota')eps'": _dxn_iota_eps,
    "dxn(iota')iota_neps'eps_n": _dxn_iota_iota_n_eps_eps_n,
    "dxn(iota')iota'eps'eps_n": _dxn_iota_iota_eps_eps_n,
}

# Sandwich traces that vanish identically
VANISHING_TRACES = (
    "c'p0c'eps'",
    "c'p0c'iota'",
    "c_np0c_neps'",
    "c_np0c_niota'",
    "c_np0c'eps_n",
    "c_np0c'iota_n",
    "c'p0c_neps_n",
    "c'p0c_niota_n",
)


def evaluate_trace(name: str, a, b, direction: Covector) -> sym.Expr:
    if name not in TRACE_IDENTITIES:
        raise InvalidParameterError(f"Unknown trace identity {name!r}")
    a, b = check_parameters(a, b)
    if not direction.is_unit():
        raise InvalidParameterError(f"Trace identities are stated for unit xi', got {direction}")
    return TRACE_IDENTITIES[name](a, b, direction)


def trace_over_directions(name: str, a, b, directions: Sequence[Covector]) -> sym.Expr:
    """The identity's value, required to agree on every sampled unit xi'."""
    if not directions:
        raise InvalidParameterError("At least one xi' direction is required")
    values = [evaluate_trace(name, a, b, direction) for direction in directions]
    for value, direction in zip(values[1:], directions[1:]):
        if sym.expand(value - values[0]) != 0:
            raise SphereIntegrationUnsupportedError(
                f"Trace {name} depends on the direction: {directions[0]} vs {direction}"
            )
    return values[0]
