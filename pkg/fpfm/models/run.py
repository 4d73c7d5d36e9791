from sqlalchemy import JSON, Column, DateTime, Float, Integer, String
from sqlalchemy.sql import func

from fpfm.core.database import Base
from fpfm.output import json_safe

RUN_KINDS = ("fpfm", "figure3", "travelwave")
RUN_STATUSES = ("OK", "FAILED-IDENTITY", "FAILED-SOLVER", "FLAGGED")


class RunRecord(Base):
    __tablename__ = "runs"

    id = Column(Integer, primary_key=True, index=True)

    name = Column(String(255), nullable=False, index=True)
    kind = Column(String(32), nullable=False, index=True)      # fpfm, figure3, travelwave
    status = Column(String(32), nullable=False, index=True)    # OK, FAILED-IDENTITY, ...
    run_dir = Column(String(500))

    # Inputs and outputs as stored documents
    config = Column(JSON)
    summary = Column(JSON)

    # Headline numbers, duplicated out of summary for filtering
    max_residual = Column(Float)
    wall_time_s = Column(Float)

    created_at = Column(DateTime, default=func.now(), nullable=False)

    def __repr__(self):
        return f"<RunRecord(id={self.id}, name='{self.name}', kind='{self.kind}', status='{self.status}')>"

    @property
    def passed(self) -> bool:
        return self.status == "OK"

    def as_dict(self, full: bool = False) -> dict:
        row = {
            "id": self.id,
            "name": self.name,
            "kind": self.kind,
            "status": self.status,
            "run_dir": self.run_dir,
            "max_residual": self.max_residual,
            "wall_time_s": self.wall_time_s,
            "created_at": self.created_at,
        }
        if full:
            row["config"] = self.config
            row["summary"] = self.summary
        return row


def record_run(session, kind: str, name: str, status: str, run_dir: str, config: dict, summary: dict) -> RunRecord:
    """Insert one catalog row and commit; non-finite numbers are stored as null"""
    if kind not in RUN_KINDS:
        raise ValueError(f"Unknown run kind: {kind}")
    config = json_safe(config)
    summary = json_safe(summary)
    record = RunRecord(
        name=name,
        kind=kind,
        status=status,
        run_dir=run_dir,
        config=config,
        summary=summary,
        max_residual=summary.get("max_abs_residual"),
        wall_time_s=summary.get("wall_time_s"),
    )
    try:
        session.add(record)
        session.commit()
    except Exception:
        session.rollback()
        raise
    return record
