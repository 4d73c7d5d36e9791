"""
Models package for the run catalog

Import models here to ensure they're registered with SQLAlchemy Base.
"""

from .run import RUN_KINDS, RUN_STATUSES, RunRecord, record_run

__all__ = [
    "RUN_KINDS",
    "RUN_STATUSES",
    "RunRecord",
    "record_run",
]
