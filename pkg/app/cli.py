import traceback
from pathlib import Path
from typing import Optional

import typer
from dotenv import load_dotenv

from app.config import RunConfig, load_settings
from app.database import save_report_to_database
from app.exterior_algebra import Operator
from app.golden import GoldenBook
from app.interior_term import KBinding
from app.report import WresReport, build_report, print_report
from app.verification import Suite, run_verify

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_MISMATCH = 2

app = typer.Typer(help="Exact boundary residues of nonminimal de Rham-Hodge operators.", add_completion=False)


@app.callback()
def main() -> None:
    load_dotenv(override=True)


def _fail(e: Exception) -> None:
    print(f"❌ {type(e).__name__}: {e}")
    traceback.print_exc()
    raise typer.Exit(code=EXIT_ERROR)


def run_compute(cfg: RunConfig) -> WresReport:
    """Build, print, write and persist the report for one run."""
    settings = load_settings()
    book = GoldenBook.load(cfg.golden_path)

    print(f"🚀 Computing {cfg.left.value}/{cfg.right.value} at n={cfg.dim}, a={cfg.a}, b={cfg.b}")
    report = build_report(cfg, settings, book)
    print_report(report)

    if cfg.json_path is not None:
        cfg.json_path.write_text(report.to_json())
        print(f"✅ Report written to {cfg.json_path}")

    save_report_to_database(report)
    return report


@app.command()
def compute(
    dim: int = typer.Option(4, "--dim", help="Manifold dimension, 3 or 4"),
    left: Operator = typer.Option(Operator.D, "--left", help="Left operator, D or Dstar"),
    right: Operator = typer.Option(Operator.DSTAR, "--right", help="Right operator, D or Dstar"),
    a: str = typer.Option("1", "--a", help="Rational literal p/q"),
    b: str = typer.Option("1", "--b", help="Rational literal p/q"),
    samples: int = typer.Option(2, "--samples", help="Number of xi' directions to sample"),
    json_path: Optional[Path] = typer.Option(None, "--json", help="Write the JSON report here"),
    golden: Optional[Path] = typer.Option(None, "--golden", envvar="NCWRES_GOLDEN", help="Golden file"),
    k_binding: Optional[KBinding] = typer.Option(None, "--k-binding", help="summed or per-k"),
    k: Optional[int] = typer.Option(None, "--k", help="k for the per-k binding"),
) -> None:
    """Compute every boundary case, the total and the interior term for one pairing."""
    try:
        cfg = RunConfig(
            dim=dim, left=left, right=right, a=a, b=b, samples=samples,
            json_path=json_path, golden_path=golden, k_binding=k_binding, k=k,
        )
        report = run_compute(cfg)
    except typer.Exit:
        raise
    except Exception as e:
        _fail(e)

    if report.failed_checks():
        raise typer.Exit(code=EXIT_MISMATCH)


@app.command()
def verify(
    suite: Suite = typer.Option(Suite.ALL, "--suite", help="algebra, lemmas, cases or all"),
    golden: Optional[Path] = typer.Option(None, "--golden", envvar="NCWRES_GOLDEN", help="Golden file"),
) -> None:
    """Run the invariant suites and every golden check they cover."""
    try:
        settings = load_settings()
        book = GoldenBook.load(golden)
        print(f"🚀 Verifying suite {suite.value}")
        result = run_verify(suite, settings, book)
    except Exception as e:
        _fail(e)

    print("\n📊 Verification Summary:")
    print("=" * 50)
    print(f"Properties: {len(result.properties) - len(result.failed_properties())}/{len(result.properties)} passed")
    for check in result.failed_properties():
        print(f"  ❌ {check.suite}: {check.name} ({check.detail})")
    for check in result.checks:
        marker = "✅" if check.status.value in ("ok", "unverified") else "⚠️ "
        print(f"  {marker} {check.eq} [{check.quantity}] {check.status.value}")
    print("=" * 50)

    if result.exit_code != EXIT_OK:
        raise typer.Exit(code=result.exit_code)
    print("🎉 All checks passed")
