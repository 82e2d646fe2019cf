from datetime import datetime, timezone
from typing import List
from uuid import uuid4

from sqlalchemy import TIMESTAMP
from sqlmodel import JSON, Column, Field, Relationship, SQLModel


class WresRun(SQLModel, table=True):
    __tablename__ = "WresRun"  # type: ignore

    id: str = Field(default_factory=lambda: str(uuid4()), primary_key=True)
    fingerprint: str = Field(unique=True)

    dim: int
    left: str
    right: str
    a: str
    b: str

    # Boundary total at (a, b) and the exit status of the run
    total: str
    mismatches: int

    report: dict = Field(sa_column=Column(JSON))

    created_at: datetime = Field(
        sa_column=Column(TIMESTAMP(timezone=True)),
        default_factory=lambda: datetime.now(timezone.utc),
    )

    checks: List["GoldenCheckRecord"] = Relationship(back_populates="run")


class GoldenCheckRecord(SQLModel, table=True):
    __tablename__ = "GoldenCheck"  # type: ignore

    id: str = Field(default_factory=lambda: str(uuid4()), primary_key=True)
    run_id: str = Field(foreign_key="WresRun.id")

    eq: str
    quantity: str
    status: str
    engine: str
    reference: str

    run: WresRun = Relationship(back_populates="checks")
