import json
import os
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

import sympy as sym
from pydantic import BaseModel, Field, field_validator, model_validator

from app.coeff_reconstruct import BASIS_FUNCTIONS, DEFAULT_BASIS
from app.errors import InvalidParameterError
from app.exterior_algebra import SUPPORTED_DIMENSIONS, Covector, Operator, rational_unit_directions
from app.interior_term import KBinding
from app.scalar_field import format_rational, parse_rational
from app.symbol_calculus import DEFAULT_PROBE_POINTS

CONFIG_PATH = Path(__file__).resolve().parent.parent / "config.json"

DEFAULT_SAMPLE_POINTS = [["1", "1"], ["1", "2"], ["2", "1"], ["2", "3"], ["3", "2"]]


def _default_directions() -> Dict[str, List[List[str]]]:
    return {
        str(n): [[str(c) for c in d.components] for d in rational_unit_directions(n, 4)]
        for n in (3, 4)
    }


class EngineSettings(BaseModel):
    """Run defaults read from config.json; every field falls back to a built-in value."""

    sample_points: List[Tuple[str, str]] = Field(default_factory=lambda: [tuple(p) for p in DEFAULT_SAMPLE_POINTS])
    directions: Dict[str, List[List[str]]] = Field(default_factory=_default_directions)
    probe_points: List[str] = Field(default_factory=lambda: [str(p) for p in DEFAULT_PROBE_POINTS])
    basis: List[str] = Field(default_factory=lambda: list(DEFAULT_BASIS))
    k_binding: KBinding = KBinding.SUMMED
    k: Optional[int] = None
    workers: int = Field(default=4, ge=1)

    @field_validator("sample_points")
    @classmethod
    def exact_points(cls, points: List[Tuple[str, str]]) -> List[Tuple[str, str]]:
        for a, b in points:
            if parse_rational(a) * parse_rational(b) == 0:
                raise ValueError(f"Sample point ({a}, {b}) needs ab != 0")
        return points

    @field_validator("basis")
    @classmethod
    def known_basis(cls, basis: List[str]) -> List[str]:
        unknown = [name for name in basis if name not in BASIS_FUNCTIONS]
        if unknown:
            raise ValueError(f"Unknown basis functions: {unknown}")
        return basis

    @field_validator("probe_points")
    @classmethod
    def exact_probes(cls, probes: List[str]) -> List[str]:
        for probe in probes:
            parse_rational(probe)
        return probes

    def points(self) -> List[Tuple[sym.Rational, sym.Rational]]:
        return [(parse_rational(a), parse_rational(b)) for a, b in self.sample_points]

    def probes(self) -> Tuple[sym.Rational, ...]:
        return tuple(parse_rational(p) for p in self.probe_points)

    def directions_for(self, n: int, count: int) -> List[Covector]:
        """The first ``count`` configured unit tangential covectors in dimension n.

        When fewer are configured, the list is topped up with generated
        directions that are not already in it.
        """
        if count < 1:
            raise InvalidParameterError(f"At least one xi' sample is required, got {count}")
        configured = [Covector.tangential(components) for components in self.directions.get(str(n), [])]
        for direction in configured:
            if direction.dim != n or not direction.is_unit():
                raise InvalidParameterError(f"Configured direction {direction} is not a unit covector of R^{n}")
        if len(configured) >= count:
            return configured[:count]

        directions = list(configured)
        for direction in rational_unit_directions(n, count):
            if direction not in directions:
                directions.append(direction)
        return directions[:count]


def load_settings(path: Optional[Union[str, Path]] = None) -> EngineSettings:
    """Read settings from ``path``, ``NCWRES_CONFIG`` or the repository config.json."""
    path = Path(path or os.getenv("NCWRES_CONFIG") or CONFIG_PATH)
    if not path.exists():
        return EngineSettings()
    with open(path, "r") as f:
        return EngineSettings(**json.load(f))


class RunConfig(BaseModel):
    """One command-line run: the pairing, the parameter point and the outputs."""

    dim: int = 4
    left: Operator = Operator.D
    right: Operator = Operator.DSTAR
    a: str = "1"
    b: str = "1"
    samples: int = Field(default=2, ge=1)
    json_path: Optional[Path] = None
    golden_path: Optional[Path] = None
    k_binding: Optional[KBinding] = None
    k: Optional[int] = None

    @field_validator("dim")
    @classmethod
    def supported_dim(cls, dim: int) -> int:
        if dim not in SUPPORTED_DIMENSIONS:
            raise ValueError(f"dim must be one of {SUPPORTED_DIMENSIONS}, got {dim}")
        return dim

    @field_validator("a", "b")
    @classmethod
    def rational_literal(cls, value: str) -> str:
        return format_rational(parse_rational(value))

    @model_validator(mode="after")
    def nonzero_product(self) -> "RunConfig":
        if parse_rational(self.a) * parse_rational(self.b) == 0:
            raise ValueError(f"Operator parameters need ab != 0, got a={self.a}, b={self.b}")
        return self

    def parameters(self) -> Tuple[sym.Rational, sym.Rational]:
        return parse_rational(self.a), parse_rational(self.b)
