"""Assemble a full residue report for one run configuration."""

import json
from concurrent.futures import ThreadPoolExecutor, as_completed
from typing import Dict, List, Optional, Sequence, Tuple

import pandas as pd
import sympy as sym
from pydantic import BaseModel

from app.boundary_residue import (
    EXTRINSIC_UNITS,
    UNITS,
    BoundaryEvaluation,
    BoundaryValue,
    by_parts_form,
    leibniz_case_c,
    phi_total,
    to_extrinsic,
)
from app.coeff_reconstruct import Sample, SampleSet, reconstruct
from app.config import EngineSettings, RunConfig
from app.errors import InternalConsistencyError
from app.exterior_algebra import Covector, Operator
from app.golden import (
    CheckStatus,
    GoldenBook,
    GoldenCheck,
    GoldenEntry,
    check_entry,
    check_oracle,
    check_projection,
    failed,
)
from app.interior_term import InteriorCoefficients, KBinding, gravity_split, interior_wres
from app.scalar_field import format_gaussian
from app.trace_identities import trace_over_directions
from app.utils import generate_fingerprint

Point = Tuple[sym.Rational, sym.Rational]


class ReportMeta(BaseModel):
    dim: int
    left: str
    right: str
    a: str
    b: str
    samples: int
    units: str
    sample_points: List[Tuple[str, str]]
    basis: List[str]
    k_binding: str
    k: Optional[int] = None
    fingerprint: str = ""


class FormReport(BaseModel):
    value: str
    coeffs: Dict[str, str]


class CaseReport(FormReport):
    name: str
    r: int
    l: int
    j: int
    k: int
    alpha: int


class LeibnizReport(BaseModel):
    correction: str
    via_leibniz: str
    direct: str


class BoundaryReport(BaseModel):
    units: str
    cases: List[CaseReport]
    total: FormReport
    extrinsic: Optional[FormReport] = None
    extrinsic_units: Optional[str] = None
    leibniz: Optional[LeibnizReport] = None


class GravityReport(BaseModel):
    binding: str
    k: Optional[int] = None
    interior_constant: str
    boundary_constant: str
    boundary_product: Optional[str] = None
    reference_boundary_product: Optional[str] = None


class InteriorReport(BaseModel):
    multiplier: str
    formal_tokens: List[str]
    swap_symmetric: bool
    c1: Dict[str, str]
    c1_sum: str
    gravity: Optional[GravityReport] = None


class WresReport(BaseModel):
    meta: ReportMeta
    interior: Optional[InteriorReport] = None
    boundary: BoundaryReport
    checks: List[GoldenCheck]

    def failed_checks(self) -> List[GoldenCheck]:
        return failed(self.checks)

    def to_canonical_dict(self) -> dict:
        return json.loads(self.to_json())

    def to_json(self) -> str:
        """Canonical serialization: sorted keys, fixed indent, no timestamps."""
        return json.dumps(self.model_dump(mode="json", by_alias=True), indent=2, sort_keys=True) + "\n"


def _fingerprint_payload(cfg: RunConfig, settings: EngineSettings, directions: Sequence[Covector]) -> dict:
    return {
        "dim": cfg.dim,
        "left": cfg.left.value,
        "right": cfg.right.value,
        "a": cfg.a,
        "b": cfg.b,
        "directions": [str(d) for d in directions],
        "sample_points": [list(p) for p in settings.sample_points],
        "probe_points": settings.probe_points,
        "basis": settings.basis,
        "k_binding": (cfg.k_binding or settings.k_binding).value,
        "k": cfg.k if cfg.k is not None else settings.k,
    }


def evaluate_points(
    cfg: RunConfig, points: Sequence[Point], directions: Sequence[Covector], settings: EngineSettings
) -> Dict[Point, BoundaryEvaluation]:
    """Boundary evaluation at every point, computed in a thread pool."""
    unique = list(dict.fromkeys(points))
    results: Dict[Point, BoundaryEvaluation] = {}
    with ThreadPoolExecutor(max_workers=settings.workers) as executor:
        future_to_point = {
            executor.submit(
                phi_total, cfg.dim, cfg.left, cfg.right, a, b, directions, settings.probes()
            ): (a, b)
            for a, b in unique
        }
        for future in as_completed(future_to_point):
            results[future_to_point[future]] = future.result()
    return results


def _form(values: Dict[Point, sym.Expr], points: Sequence[Point], basis: Sequence[str]) -> BoundaryValue:
    samples = SampleSet(samples=[Sample(a=a, b=b, value=values[(a, b)]) for a, b in points])
    return reconstruct(samples, basis)


def _form_report(form: BoundaryValue, value: sym.Expr) -> FormReport:
    return FormReport(value=format_gaussian(value), coeffs=form.to_json())


def _check_at_run_point(label: str, form: BoundaryValue, value: sym.Expr, point: Point) -> None:
    if sym.expand(form.evaluate(*point) - value) != 0:
        raise InternalConsistencyError(
            f"{label} form {form.as_expr()} misses the direct value {value} at {point}"
        )


class _EngineContext:
    """Engine values addressable by golden quantity names."""

    def __init__(self, cfg: RunConfig, point: Point, directions, settings, evaluation, forms, total, extrinsic, leibniz):
        self.cfg = cfg
        self.point = point
        self.directions = directions
        self.settings = settings
        self.evaluation = evaluation
        self.forms = forms
        self.total = total
        self.extrinsic = extrinsic
        self.leibniz = leibniz

    def value(self, entry: GoldenEntry):
        kind, _, name = entry.quantity.partition(":")
        a, b = self.point
        if kind == "case":
            return self.forms.get(name)
        if kind == "total":
            return self.total
        if kind == "extrinsic":
            return self.extrinsic
        if kind == "integrand" and name == "c-by-parts":
            return by_parts_form(
                self.cfg.left, self.cfg.right, a, b, self.directions, self.settings.probes()
            )
        if kind == "integrand":
            return self.evaluation.integrand(name)
        if kind == "leibniz":
            return self.leibniz.correction if self.leibniz is not None else None
        if kind == "interior":
            return interior_wres(self.cfg.left, self.cfg.right, a, b, self.cfg.dim).multiplier
        if kind == "trace":
            return trace_over_directions(name, a, b, self.directions)
        return None


def run_checks(book: GoldenBook, entries: Sequence[GoldenEntry], context: _EngineContext) -> List[GoldenCheck]:
    checks = []
    a, b = context.point
    for entry in entries:
        if entry.is_oracle:
            checks.append(check_oracle(entry, book, a, b))
        elif entry.quantity == "projection":
            checks.append(check_projection(entry))
        else:
            checks.append(check_entry(entry, context.value(entry), a, b))
    return checks


def _interior_report(
    cfg: RunConfig, point: Point, settings: EngineSettings, extrinsic: Optional[BoundaryValue], book: GoldenBook
) -> InteriorReport:
    a, b = point
    term = interior_wres(cfg.left, cfg.right, a, b, cfg.dim)
    coefficients = InteriorCoefficients.evaluate(a, b)

    gravity = None
    if cfg.left is not cfg.right:
        binding = cfg.k_binding or settings.k_binding
        k = cfg.k if cfg.k is not None else settings.k
        split = gravity_split(a, b, binding, k)
        reference = [
            e for e in book.select(4, Operator.D, Operator.DSTAR) if e.quantity == "extrinsic"
        ]
        gravity = GravityReport(
            binding=split.binding.value,
            k=split.k,
            interior_constant=str(split.interior_constant),
            boundary_constant=str(split.boundary_constant),
            boundary_product=(
                str(split.boundary_product(extrinsic.evaluate(a, b))) if extrinsic is not None else None
            ),
            reference_boundary_product=(
                str(split.boundary_product(reference[0].at(a, b))) if reference else None
            ),
        )

    return InteriorReport(
        multiplier=str(term.multiplier),
        formal_tokens=term.formal_tokens,
        swap_symmetric=term.swap_symmetric,
        c1={str(k): format_gaussian(v) for k, v in coefficients.per_k.items()},
        c1_sum=format_gaussian(coefficients.total),
        gravity=gravity,
    )


def build_report(cfg: RunConfig, settings: EngineSettings, book: GoldenBook) -> WresReport:
    """Evaluate every case, reconstruct the forms and compare with the golden values."""
    point = cfg.parameters()
    directions = settings.directions_for(cfg.dim, cfg.samples)
    sample_points = settings.points()

    print(f"🔄 Evaluating {cfg.left.value}/{cfg.right.value} at n={cfg.dim} on {len(sample_points)} sample points...")
    evaluations = evaluate_points(cfg, sample_points + [point], directions, settings)
    run_evaluation = evaluations[point]

    case_values = {
        p: evaluation.values() for p, evaluation in evaluations.items()
    }
    forms: Dict[str, BoundaryValue] = {}
    case_reports = []
    for case_evaluation in run_evaluation.cases:
        case = case_evaluation.case
        form = _form({p: v[case.name] for p, v in case_values.items()}, sample_points, settings.basis)
        _check_at_run_point(f"Case {case.name}", form, case_evaluation.value, point)
        forms[case.name] = form
        case_reports.append(
            CaseReport(
                name=case.name, r=case.r, l=case.l, j=case.j, k=case.k, alpha=case.alpha,
                value=format_gaussian(case_evaluation.value), coeffs=form.to_json(),
            )
        )

    total = _form({p: e.total for p, e in evaluations.items()}, sample_points, settings.basis)
    _check_at_run_point("Total", total, run_evaluation.total, point)

    extrinsic = None
    extrinsic_report = None
    if cfg.dim == 4:
        extrinsic = to_extrinsic(total, cfg.dim)
        extrinsic_report = _form_report(extrinsic, extrinsic.evaluate(*point))

    leibniz = None
    leibniz_report = None
    if cfg.dim == 4 and cfg.left is cfg.right:
        print("🔄 Running the Leibniz path for case c...")
        leibniz = leibniz_case_c(cfg.left, cfg.right, *point, directions, settings.probes())
        leibniz_report = LeibnizReport(
            correction=format_gaussian(leibniz.correction),
            via_leibniz=format_gaussian(leibniz.via_leibniz),
            direct=format_gaussian(leibniz.direct),
        )

    boundary = BoundaryReport(
        units=UNITS[cfg.dim],
        cases=case_reports,
        total=_form_report(total, run_evaluation.total),
        extrinsic=extrinsic_report,
        extrinsic_units=EXTRINSIC_UNITS if extrinsic is not None else None,
        leibniz=leibniz_report,
    )

    interior = _interior_report(cfg, point, settings, extrinsic, book) if cfg.dim == 4 else None

    context = _EngineContext(cfg, point, directions, settings, run_evaluation, forms, total, extrinsic, leibniz)
    entries = book.select(cfg.dim, cfg.left, cfg.right)
    print(f"🔄 Comparing with {len(entries)} golden entries...")
    checks = run_checks(book, entries, context)

    binding = cfg.k_binding or settings.k_binding
    meta = ReportMeta(
        dim=cfg.dim,
        left=cfg.left.value,
        right=cfg.right.value,
        a=cfg.a,
        b=cfg.b,
        samples=cfg.samples,
        units=UNITS[cfg.dim],
        sample_points=[tuple(p) for p in settings.sample_points],
        basis=list(settings.basis),
        k_binding=KBinding(binding).value,
        k=cfg.k if cfg.k is not None else settings.k,
        fingerprint=generate_fingerprint(_fingerprint_payload(cfg, settings, directions)),
    )
    return WresReport(meta=meta, interior=interior, boundary=boundary, checks=checks)


def print_report(report: WresReport) -> None:
    """Console summary with pandas tables; the JSON report is written separately."""
    meta = report.meta
    print(f"\n📊 Boundary residue {meta.left}/{meta.right}, n={meta.dim}, a={meta.a}, b={meta.b}")
    print("=" * 50)

    cases = pd.DataFrame(
        [
            {"case": c.name, "r": c.r, "l": c.l, "j": c.j, "k": c.k, "|alpha|": c.alpha, "value": c.value, **c.coeffs}
            for c in report.boundary.cases
        ]
    )
    print(cases.to_string(index=False))
    print(f"\nTotal: {report.boundary.total.value} * {report.boundary.units}")
    if report.boundary.extrinsic is not None:
        print(f"Extrinsic: {report.boundary.extrinsic.value} * {report.boundary.extrinsic_units}")
    if report.boundary.leibniz is not None:
        leibniz = report.boundary.leibniz
        print(f"Leibniz correction: {leibniz.correction} (case c via Leibniz {leibniz.via_leibniz}, direct {leibniz.direct})")
    if report.interior is not None:
        print(f"Interior: {report.interior.multiplier} * int_M R dvol")

    if report.checks:
        print("\n📋 Golden checks:")
        checks = pd.DataFrame([c.model_dump(mode="json") for c in report.checks])
        print(checks[["eq", "quantity", "status", "engine", "reference"]].to_string(index=False))

    mismatches = report.failed_checks()
    print("=" * 50)
    if mismatches:
        print(f"⚠️  {len(mismatches)} golden check(s) disagree:")
        for check in mismatches:
            print(f"  - {check.eq} [{check.quantity}] {check.status.value}: engine {check.engine}, reference {check.reference}")
    else:
        unverified = [c for c in report.checks if c.status is CheckStatus.UNVERIFIED]
        print(f"✅ All golden checks agree ({len(unverified)} unverified)")
