"""
Base runner for the canonical experiments

A runner owns one run directory. It executes the experiment, writes the
summary JSON, optionally records the run in the catalog and keeps simple
statistics for the end-of-run report.
"""

import logging
import time
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, Optional

from fpfm.core import settings
from fpfm.core.database import catalog_session
from fpfm.core.errors import SolverError
from fpfm.models import record_run
from fpfm.output import write_json

STATUS_OK = "OK"
STATUS_FAILED_IDENTITY = "FAILED-IDENTITY"
STATUS_FAILED_SOLVER = "FAILED-SOLVER"
STATUS_FLAGGED = "FLAGGED"


@dataclass
class RunResult:
    run_dir: Path
    status: str
    summary: Dict[str, Any] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.status == STATUS_OK


class BaseRunner(ABC):
    """Base class for all scenario runners"""

    kind: str = ""

    def __init__(self, name: str, out_dir, record: Optional[bool] = None):
        self.name = name
        self.run_dir = Path(out_dir)
        self.record = settings.RECORD_RUNS if record is None else record
        self.logger = logging.getLogger(f"fpfm.scenario.{name}")
        self.stats = {
            "steps": 0,
            "files_written": 0,
            "warnings": 0,
            "status": None,
            "start_time": None,
            "end_time": None,
        }

    @abstractmethod
    def execute(self) -> Dict[str, Any]:
        """Run the experiment, write its tables and return the summary payload"""

    @abstractmethod
    def config_document(self) -> Dict[str, Any]:
        """JSON-serializable description of the inputs"""

    @abstractmethod
    def classify(self, summary: Dict[str, Any]) -> str:
        """Run status from the summary payload"""

    def wrote(self, path: Path) -> Path:
        self.stats["files_written"] += 1
        self.logger.debug(f"Wrote {path}")
        return path

    def save_record(self, status: str, summary: Dict[str, Any]) -> bool:
        """Insert the run into the catalog; failures are logged, never raised"""
        try:
            with catalog_session() as db:
                record = record_run(db, self.kind, self.name, status, str(self.run_dir), self.config_document(), summary)
                self.logger.info(f"✅ Recorded run {record.id} in the catalog")
            return True
        except Exception as e:
            self.logger.error(f"❌ Could not record run '{self.name}': {e}")
            return False

    def _finish(self, status: str, summary: Dict[str, Any], wall_time: float) -> RunResult:
        summary = dict(summary, name=self.name, kind=self.kind, status=status, wall_time_s=wall_time)
        self.wrote(write_json(self.run_dir / "summary.json", summary))
        self.stats["status"] = status
        if self.record:
            self.save_record(status, summary)
        return RunResult(run_dir=self.run_dir, status=status, summary=summary)

    def run(self, verbose: bool = False) -> RunResult:
        """Execute, classify and persist one run"""
        self.logger.info(f"🚀 Starting {self.kind} run '{self.name}' in {self.run_dir}")
        self.run_dir.mkdir(parents=True, exist_ok=True)
        self.stats["start_time"] = datetime.now()
        started = time.perf_counter()
        try:
            summary = self.execute()
            result = self._finish(self.classify(summary), summary, time.perf_counter() - started)
        except SolverError as e:
            self.logger.error(f"💥 Solver failure: {e}")
            self._finish(STATUS_FAILED_SOLVER, self.partial_summary(e), time.perf_counter() - started)
            raise
        finally:
            self.stats["end_time"] = datetime.now()
            if verbose:
                self.print_summary()
        return result

    def partial_summary(self, error: Exception) -> Dict[str, Any]:
        """Summary written when a run aborts"""
        return {"error": str(error)}

    def print_summary(self):
        """Print run summary statistics"""
        duration = None
        if self.stats["start_time"] and self.stats["end_time"]:
            duration = self.stats["end_time"] - self.stats["start_time"]

        print("\n" + "=" * 50)
        print(f"📊 {self.name.upper()} RUN SUMMARY ({self.kind})")
        print("=" * 50)
        print(f"📁 Run directory:  {self.run_dir}")
        print(f"🔄 Steps:          {self.stats['steps']}")
        print(f"💾 Files written:  {self.stats['files_written']}")
        print(f"⚠️  Warnings:       {self.stats['warnings']}")
        status = self.stats["status"] or "unknown"
        marker = "✅" if status == STATUS_OK else "❌"
        print(f"{marker} Status:         {status}")
        if duration:
            print(f"⏱️  Duration:       {duration}")
        print("=" * 50)
