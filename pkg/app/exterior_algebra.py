"""Exterior algebra of R^n (n in {3, 4}) and the Clifford-type actions on it.

Endomorphisms are exact ``sympy.ImmutableMatrix`` instances on the
graded-lexicographic blade basis: 1, e1, e2, ..., e1^e2, e1^e3, ...
"""

from enum import Enum
from functools import lru_cache
from itertools import combinations, product
from typing import List, NamedTuple, Sequence, Tuple

import sympy as sym
from pydantic import BaseModel, ConfigDict, field_validator

from app.errors import DimensionMismatchError, InvalidParameterError, ScopeError
from app.scalar_field import H, parse_rational

SUPPORTED_DIMENSIONS = (3, 4)

Endo = sym.ImmutableMatrix


class Operator(str, Enum):
    """Nonminimal operator: D = a d + b delta, Dstar = b d + a delta."""

    D = "D"
    DSTAR = "Dstar"

    def twist(self, a, b) -> Tuple[sym.Rational, sym.Rational]:
        """(alpha, beta) such that the principal symbol is i(alpha eps - beta iota)."""
        return (a, b) if self is Operator.D else (b, a)


class CovectorRole(str, Enum):
    TANGENTIAL = "tangential"
    NORMAL = "normal"


class Blade(BaseModel):
    model_config = ConfigDict(frozen=True)

    indices: Tuple[int, ...]

    @field_validator("indices")
    @classmethod
    def strictly_increasing(cls, indices: Tuple[int, ...]) -> Tuple[int, ...]:
        if any(i < 1 for i in indices) or list(indices) != sorted(set(indices)):
            raise ValueError(f"Blade indices must be strictly increasing and positive: {indices}")
        return indices

    @property
    def grade(self) -> int:
        return len(self.indices)

    def __str__(self) -> str:
        return "^".join(f"e{i}" for i in self.indices) or "1"


class Covector(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    components: Tuple[sym.Rational, ...]
    role: CovectorRole

    @field_validator("components", mode="before")
    @classmethod
    def exact_components(cls, components) -> Tuple[sym.Rational, ...]:
        return tuple(parse_rational(c) if isinstance(c, str) else sym.Rational(c) for c in components)

    @classmethod
    def normal(cls, n: int) -> "Covector":
        return cls(components=(0,) * (n - 1) + (1,), role=CovectorRole.NORMAL)

    @classmethod
    def tangential(cls, components: Sequence) -> "Covector":
        covector = cls(components=tuple(components), role=CovectorRole.TANGENTIAL)
        if covector.components[-1] != 0:
            raise InvalidParameterError(
                f"Tangential covector must have zero normal component: {covector.components}"
            )
        return covector

    @classmethod
    def basis(cls, n: int, k: int) -> "Covector":
        if not 1 <= k <= n:
            raise DimensionMismatchError(f"Basis index {k} outside 1..{n}")
        if k == n:
            return cls.normal(n)
        return cls.tangential(tuple(1 if i == k else 0 for i in range(1, n + 1)))

    @property
    def dim(self) -> int:
        return len(self.components)

    def norm_squared(self) -> sym.Rational:
        return sum((c**2 for c in self.components), sym.S.Zero)

    def is_unit(self) -> bool:
        return self.norm_squared() == 1

    def pairing(self, other: "Covector") -> sym.Rational:
        if other.dim != self.dim:
            raise DimensionMismatchError(f"Pairing covectors of dimension {self.dim} and {other.dim}")
        return sum((x * y for x, y in zip(self.components, other.components)), sym.S.Zero)

    def __str__(self) -> str:
        return "(" + ", ".join(str(c) for c in self.components) + ")"


class CliffordActions(NamedTuple):
    c: Endo
    c_hat: Endo
    c_tilde: Endo
    c_bar: Endo


class ExteriorAlgebra:
    """Lambda*(R^n) with cached basis multiplication matrices."""

    def __init__(self, n: int):
        if n not in SUPPORTED_DIMENSIONS:
            raise ScopeError(f"Dimension {n} not supported, expected one of {SUPPORTED_DIMENSIONS}")
        self.n = n
        self.blades: List[Blade] = [
            Blade(indices=indices)
            for grade in range(n + 1)
            for indices in combinations(range(1, n + 1), grade)
        ]
        self._position = {blade.indices: i for i, blade in enumerate(self.blades)}
        self._eps_basis = [self._basis_matrix(k, exterior=True) for k in range(1, n + 1)]
        self._iota_basis = [self._basis_matrix(k, exterior=False) for k in range(1, n + 1)]

    @property
    def dim(self) -> int:
        return len(self.blades)

    def _basis_matrix(self, k: int, exterior: bool) -> Endo:
        entries = {}
        for column, blade in enumerate(self.blades):
            indices = blade.indices
            sign = (-1) ** sum(1 for j in indices if j < k)
            if exterior and k not in indices:
                target = tuple(sorted(indices + (k,)))
            elif not exterior and k in indices:
                target = tuple(j for j in indices if j != k)
            else:
                continue
            entries[(self._position[target], column)] = sign
        return Endo(self.dim, self.dim, lambda i, j: entries.get((i, j), 0))

    def _check(self, v: Covector) -> None:
        if v.dim != self.n:
            raise DimensionMismatchError(
                f"Covector of dimension {v.dim} used in the algebra of R^{self.n}"
            )

    def identity(self) -> Endo:
        return Endo(sym.eye(self.dim))

    def zero(self) -> Endo:
        return Endo(sym.zeros(self.dim, self.dim))

    def eps(self, v: Covector) -> Endo:
        self._check(v)
        return sum(
            (c * m for c, m in zip(v.components, self._eps_basis) if c != 0), self.zero()
        )

    def iota(self, v: Covector) -> Endo:
        self._check(v)
        return sum(
            (c * m for c, m in zip(v.components, self._iota_basis) if c != 0), self.zero()
        )

    def twisted(self, alpha, beta, v: Covector) -> Endo:
        """alpha eps(v) - beta iota(v); c-tilde is (a, b), c-bar is (b, a)."""
        return alpha * self.eps(v) - beta * self.iota(v)


@lru_cache(maxsize=None)
def exterior_algebra(n: int) -> ExteriorAlgebra:
    return ExteriorAlgebra(n)


def _algebra_for(v: Covector, algebra: ExteriorAlgebra = None) -> ExteriorAlgebra:
    return algebra if algebra is not None else exterior_algebra(v.dim)


def eps(v: Covector, algebra: ExteriorAlgebra = None) -> Endo:
    return _algebra_for(v, algebra).eps(v)


def iota(v: Covector, algebra: ExteriorAlgebra = None) -> Endo:
    return _algebra_for(v, algebra).iota(v)


def check_parameters(a, b) -> Tuple[sym.Rational, sym.Rational]:
    a, b = sym.Rational(a), sym.Rational(b)
    if a * b == 0:
        raise InvalidParameterError(f"Operator parameters need ab != 0, got a={a}, b={b}")
    return a, b


def clifford_actions(a, b, v: Covector, algebra: ExteriorAlgebra = None) -> CliffordActions:
    a, b = check_parameters(a, b)
    algebra = _algebra_for(v, algebra)
    e, i = algebra.eps(v), algebra.iota(v)
    return CliffordActions(c=e - i, c_hat=e + i, c_tilde=a * e - b * i, c_bar=b * e - a * i)


@lru_cache(maxsize=None)
def p0_matrix(a, b, which: Operator, n: int) -> Endo:
    """Order-zero symbol at the boundary point, as h times an exact matrix.

    Only the connection values surviving in normal coordinates contribute:
    -1/4 sum_i T(e_i) c_hat(e_i) c_hat(e_n) + 1/4 sum_i T(e_i) c(e_i) c(e_n), i < n,
    with T the twisted action of ``which``.
    """
    a, b = check_parameters(a, b)
    algebra = exterior_algebra(n)
    alpha, beta = Operator(which).twist(a, b)
    normal = clifford_actions(a, b, Covector.normal(n), algebra)

    total = algebra.zero()
    for k in range(1, n):
        e_k = Covector.basis(n, k)
        actions = clifford_actions(a, b, e_k, algebra)
        twisted = algebra.twisted(alpha, beta, e_k)
        total += -sym.Rational(1, 4) * twisted * actions.c_hat * normal.c_hat
        total += sym.Rational(1, 4) * twisted * actions.c * normal.c
    return Endo(H * total)


def trace(m: Endo) -> sym.Expr:
    return sym.expand(m.trace())


# Sampled directions

_PARAMETERS = [sym.Rational(p) for p in ("0", "1/2", "1/3", "2", "2/3", "3/2", "1/4", "3", "3/4", "1/5")]


def rational_unit_directions(n: int, count: int) -> List[Covector]:
    """Deterministic rational points on the unit sphere of the boundary, as tangential covectors."""
    if n not in SUPPORTED_DIMENSIONS:
        raise ScopeError(f"Dimension {n} not supported, expected one of {SUPPORTED_DIMENSIONS}")

    points = []
    if n == 3:
        for m in _PARAMETERS:
            denominator = 1 + m**2
            points.append(((1 - m**2) / denominator, 2 * m / denominator))
    else:
        for s, t in product(_PARAMETERS, repeat=2):
            denominator = 1 + s**2 + t**2
            points.append((2 * s / denominator, 2 * t / denominator, (1 - s**2 - t**2) / denominator))

    directions: List[Covector] = []
    seen = set()
    for point in points:
        if point in seen:
            continue
        seen.add(point)
        directions.append(Covector.tangential(point + (0,)))
        if len(directions) == count:
            return directions
    raise InvalidParameterError(f"Only {len(directions)} sample directions available for n={n}")
