"""Printed reference values and their comparison with engine output."""

import json
import os
from enum import Enum
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Union

import sympy as sym
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator
from sympy.parsing.sympy_parser import parse_expr

from app.coeff_reconstruct import A, B, BoundaryValue
from app.errors import GoldenFileError
from app.exterior_algebra import Operator
from app.interior_term import OMEGA3, OMEGA4
from app.scalar_field import H, XI, RationalFn, h_coefficient, pi_plus, residue, to_gaussian

DEFAULT_GOLDEN_PATH = Path(__file__).parent / "data" / "golden.json"
SUITES = ("algebra", "lemmas", "cases")

_LOCALS = {"a": A, "b": B, "h": H, "xi": XI, "I": sym.I, "Omega3": OMEGA3, "Omega4": OMEGA4, "pi": sym.pi}


def parse_reference(text: str) -> sym.Expr:
    return parse_expr(text, local_dict=_LOCALS, evaluate=True)


class CheckStatus(str, Enum):
    OK = "ok"
    MISMATCH = "mismatch"
    INCONSISTENT = "inconsistent"
    UNVERIFIED = "unverified"


class GoldenEntry(BaseModel):
    model_config = ConfigDict(frozen=True)

    eq: str
    suite: str
    dim: int
    left: Operator
    right: Operator
    quantity: str
    value: str
    oracle: Optional[Dict[str, Union[str, List[str]]]] = None

    @field_validator("suite")
    @classmethod
    def known_suite(cls, suite: str) -> str:
        if suite not in SUITES:
            raise ValueError(f"Unknown suite {suite!r}, expected one of {SUITES}")
        return suite

    @field_validator("value")
    @classmethod
    def parseable(cls, value: str) -> str:
        parse_reference(value)
        return value

    @property
    def expr(self) -> sym.Expr:
        return parse_reference(self.value)

    @property
    def is_oracle(self) -> bool:
        return self.quantity.startswith("oracle:")

    def at(self, a, b) -> sym.Expr:
        return sym.expand(self.expr.subs({A: sym.Rational(a), B: sym.Rational(b)}))


class GoldenBook(BaseModel):
    reference: str = ""
    entries: List[GoldenEntry]

    @classmethod
    def load(cls, path: Optional[Union[str, Path]] = None) -> "GoldenBook":
        """Load the golden file at ``path``, ``NCWRES_GOLDEN`` or the bundled default."""
        path = Path(path or os.getenv("NCWRES_GOLDEN") or DEFAULT_GOLDEN_PATH)
        try:
            with open(path, "r") as f:
                return cls(**json.load(f))
        except FileNotFoundError as e:
            raise GoldenFileError(f"Golden file not found: {path}") from e
        except (json.JSONDecodeError, ValidationError, sym.SympifyError, SyntaxError, TypeError) as e:
            raise GoldenFileError(f"Invalid golden file {path}: {e}") from e

    def select(
        self,
        dim: Optional[int] = None,
        left: Optional[Operator] = None,
        right: Optional[Operator] = None,
        suites: Iterable[str] = SUITES,
    ) -> List[GoldenEntry]:
        suites = set(suites)
        return [
            entry
            for entry in self.entries
            if entry.suite in suites
            and (dim is None or entry.dim == dim)
            and (left is None or entry.left is Operator(left))
            and (right is None or entry.right is Operator(right))
        ]

    def by_eq(self, entry: GoldenEntry, eq: str) -> GoldenEntry:
        for candidate in self.entries:
            if (
                candidate.eq == eq
                and not candidate.is_oracle
                and (candidate.dim, candidate.left, candidate.right) == (entry.dim, entry.left, entry.right)
            ):
                return candidate
        raise GoldenFileError(f"Oracle {entry.eq} refers to missing entry {eq}")


class GoldenCheck(BaseModel):
    model_config = ConfigDict(frozen=True)

    eq: str
    quantity: str
    status: CheckStatus
    engine: str
    reference: str = Field(serialization_alias="paper")


def _status(equal: bool, oracle: bool = False) -> CheckStatus:
    if equal:
        return CheckStatus.OK
    return CheckStatus.INCONSISTENT if oracle else CheckStatus.MISMATCH


def check_entry(entry: GoldenEntry, engine, a, b) -> GoldenCheck:
    """Compare one printed value with the engine value for the same quantity.

    ``engine`` is a BoundaryValue (compared as a form in a, b), a RationalFn or
    a scalar (both compared at the point (a, b)), or None when not computed.
    """
    if engine is None:
        return GoldenCheck(
            eq=entry.eq, quantity=entry.quantity, status=CheckStatus.UNVERIFIED,
            engine="", reference=entry.value,
        )

    if isinstance(engine, BoundaryValue):
        engine_expr = engine.as_expr()
        equal = sym.simplify(engine_expr - entry.expr) == 0
        shown = str(engine_expr)
    elif isinstance(engine, RationalFn):
        equal = engine == RationalFn.from_expr(entry.at(a, b))
        shown = str(sym.factor(engine.as_expr()))
    else:
        equal = sym.simplify(sym.expand(engine) - entry.at(a, b)) == 0
        shown = str(engine)

    return GoldenCheck(
        eq=entry.eq, quantity=entry.quantity, status=_status(equal), engine=shown, reference=entry.value,
    )


def _in_units(value: sym.Expr) -> sym.Expr:
    value = sym.expand(value)
    return h_coefficient(value) if value.has(H) else to_gaussian(value)


def check_oracle(entry: GoldenEntry, book: GoldenBook, a, b) -> GoldenCheck:
    """Internal consistency of the printed values, independent of the engine."""
    kind = entry.quantity.split(":", 1)[1]
    oracle = entry.oracle or {}
    a, b = sym.Rational(a), sym.Rational(b)

    if kind == "sum":
        terms = [book.by_eq(entry, eq) for eq in oracle["terms"]]
        derived = sym.simplify(sum((t.expr for t in terms), sym.S.Zero))
        equal = sym.simplify(derived - entry.expr) == 0
    elif kind == "residue":
        integrand = RationalFn.from_expr(parse_reference(oracle["integrand"]).subs({A: a, B: b}))
        prefactor = parse_reference(oracle.get("prefactor", "1"))
        derived = _in_units(prefactor * 2 * sym.I * residue(integrand))
        equal = sym.expand(derived - entry.at(a, b)) == 0
    else:
        raise GoldenFileError(f"Unknown oracle kind {kind!r} in {entry.eq}")

    return GoldenCheck(
        eq=entry.eq, quantity=entry.quantity, status=_status(equal, oracle=True),
        engine=str(derived), reference=entry.value,
    )


def check_projection(entry: GoldenEntry) -> GoldenCheck:
    projected = pi_plus(RationalFn.from_expr(parse_reference(entry.oracle["input"])))
    return check_entry(entry, projected, 1, 1)


def failed(checks: Iterable[GoldenCheck]) -> List[GoldenCheck]:
    return [c for c in checks if c.status in (CheckStatus.MISMATCH, CheckStatus.INCONSISTENT)]
