import os
from typing import Optional

from sqlalchemy.engine import Engine
from sqlmodel import Session, SQLModel, create_engine, select

from app.models import GoldenCheckRecord, WresRun


def get_engine(database_url: Optional[str] = None) -> Optional[Engine]:
    """
    Create an engine for ``database_url`` or the DATABASE_URL environment variable.

    Returns:
        The engine, or None when no database is configured
    """
    database_url = database_url or os.getenv("DATABASE_URL")
    if not database_url:
        return None

    engine = create_engine(database_url)

    # Create tables if they don't exist
    SQLModel.metadata.create_all(engine)
    return engine


def save_report_to_database(report, engine: Optional[Engine] = None) -> Optional[str]:
    """
    Save a report and its golden checks to the database.

    This function is idempotent - it will delete any existing run
    with the same fingerprint before saving the new one.

    Args:
        report: The WresReport to save
        engine: Optional engine; defaults to one built from DATABASE_URL

    Returns:
        The id of the saved run, or None when persistence is skipped
    """
    engine = engine or get_engine()
    if engine is None:
        print("⚠️  Warning: DATABASE_URL not set. Skipping database save.")
        return None

    meta = report.meta
    with Session(engine) as session:
        existing_run = session.exec(
            select(WresRun).where(WresRun.fingerprint == meta.fingerprint)
        ).first()

        if existing_run:
            print(f"Found existing run {meta.fingerprint}, removing old data...")
            for check in existing_run.checks:
                session.delete(check)
            session.delete(existing_run)
            session.commit()
            print("✓ Removed old run data")

        run = WresRun(
            fingerprint=meta.fingerprint,
            dim=meta.dim,
            left=meta.left,
            right=meta.right,
            a=meta.a,
            b=meta.b,
            total=report.boundary.total.value,
            mismatches=len(report.failed_checks()),
            report=report.to_canonical_dict(),
        )
        session.add(run)
        session.flush()  # Flush to get the run ID for foreign keys

        for check in report.checks:
            session.add(
                GoldenCheckRecord(
                    run_id=run.id,
                    eq=check.eq,
                    quantity=check.quantity,
                    status=check.status.value,
                    engine=check.engine,
                    reference=check.reference,
                )
            )

        session.commit()
        print(f"✓ Run saved to database with ID: {run.id}")
        print(f"✓ Fingerprint: {run.fingerprint}")
        return run.id
