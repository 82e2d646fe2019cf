"""Recover the (a, b)-dependence of engine outputs from exact samples.

Every boundary contribution lies in the span of {1/a^2, 1/b^2, 1/(ab), 1};
four well-chosen samples determine it and the rest must agree exactly.
"""

from typing import Callable, Dict, List, Sequence, Tuple

import sympy as sym
from pydantic import BaseModel, ConfigDict, field_validator

from app.errors import (
    InvalidParameterError,
    OverdeterminedSampleError,
    SingularSampleSystemError,
)
from app.scalar_field import format_gaussian, to_gaussian

A, B = sym.symbols("a b", nonzero=True)

BASIS_FUNCTIONS: Dict[str, Callable] = {
    "a2inv": lambda a, b: 1 / a**2,
    "b2inv": lambda a, b: 1 / b**2,
    "abinv": lambda a, b: 1 / (a * b),
    "const": lambda a, b: sym.S.One,
}
DEFAULT_BASIS: Tuple[str, ...] = ("a2inv", "b2inv", "abinv", "const")


class BoundaryValue(BaseModel):
    """Exact element of span{a^-2, b^-2, (ab)^-1, 1} over the Gaussian rationals."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    a2inv: sym.Expr = sym.S.Zero
    b2inv: sym.Expr = sym.S.Zero
    abinv: sym.Expr = sym.S.Zero
    const: sym.Expr = sym.S.Zero

    @field_validator("a2inv", "b2inv", "abinv", "const", mode="before")
    @classmethod
    def gaussian(cls, value) -> sym.Expr:
        return to_gaussian(value)

    def coefficients(self) -> Dict[str, sym.Expr]:
        return {name: getattr(self, name) for name in DEFAULT_BASIS}

    def __add__(self, other: "BoundaryValue") -> "BoundaryValue":
        return BoundaryValue(
            **{name: value + getattr(other, name) for name, value in self.coefficients().items()}
        )

    def __sub__(self, other: "BoundaryValue") -> "BoundaryValue":
        return self + other.scale(-1)

    def scale(self, factor) -> "BoundaryValue":
        factor = to_gaussian(factor)
        return BoundaryValue(**{name: factor * value for name, value in self.coefficients().items()})

    def swap_ab(self) -> "BoundaryValue":
        return BoundaryValue(a2inv=self.b2inv, b2inv=self.a2inv, abinv=self.abinv, const=self.const)

    def evaluate(self, a, b) -> sym.Expr:
        a, b = sym.Rational(a), sym.Rational(b)
        return sym.expand(
            sum(
                (value * BASIS_FUNCTIONS[name](a, b) for name, value in self.coefficients().items()),
                sym.S.Zero,
            )
        )

    def as_expr(self) -> sym.Expr:
        return sum(
            (value * BASIS_FUNCTIONS[name](A, B) for name, value in self.coefficients().items()),
            sym.S.Zero,
        )

    def is_zero(self) -> bool:
        return all(value == 0 for value in self.coefficients().values())

    def to_json(self) -> Dict[str, str]:
        return {name: format_gaussian(value) for name, value in self.coefficients().items()}


class Sample(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    a: sym.Rational
    b: sym.Rational
    value: sym.Expr

    @field_validator("a", "b", mode="before")
    @classmethod
    def rational(cls, value) -> sym.Rational:
        return sym.Rational(value)

    @field_validator("value", mode="before")
    @classmethod
    def gaussian(cls, value) -> sym.Expr:
        return to_gaussian(value)


class SampleSet(BaseModel):
    model_config = ConfigDict(frozen=True)

    samples: List[Sample]

    @classmethod
    def from_function(cls, function: Callable, points: Sequence[Tuple]) -> "SampleSet":
        return cls(samples=[Sample(a=a, b=b, value=function(a, b)) for a, b in points])


def reconstruct(sample_set: SampleSet, basis: Sequence[str] = DEFAULT_BASIS) -> BoundaryValue:
    """Solve the square system on the first samples, then check the held-out ones."""
    unknown = [name for name in basis if name not in BASIS_FUNCTIONS]
    if unknown:
        raise InvalidParameterError(f"Unknown basis functions: {unknown}")

    samples = sample_set.samples
    size = len(basis)
    if len(samples) < size:
        raise InvalidParameterError(f"Need at least {size} samples, got {len(samples)}")
    if any(s.a * s.b == 0 for s in samples):
        raise InvalidParameterError("Samples need ab != 0")

    square = samples[:size]
    matrix = sym.Matrix(
        [[BASIS_FUNCTIONS[name](s.a, s.b) for name in basis] for s in square]
    )
    if matrix.det() == 0:
        raise SingularSampleSystemError(
            f"Sample points {[(s.a, s.b) for s in square]} do not determine the basis {list(basis)}"
        )
    solution = matrix.LUsolve(sym.Matrix([s.value for s in square]))
    value = BoundaryValue(**{name: sym.expand(c) for name, c in zip(basis, solution)})

    for s in samples[size:]:
        residual = sym.expand(value.evaluate(s.a, s.b) - s.value)
        if residual != 0:
            raise OverdeterminedSampleError(
                f"Held-out sample (a={s.a}, b={s.b}) misses the reconstructed form by {residual}"
            )
    return value
