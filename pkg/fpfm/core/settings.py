import os
import logging
from dotenv import load_dotenv

# Load environment variables
load_dotenv()

# Run catalog database (SQLite by default, any SQLAlchemy URL works)
DATABASE_URL = os.getenv("DATABASE_URL", "sqlite:///./fpfm_runs.db")

# Where run directories go when --out is not given
OUTPUT_DIR = os.getenv("FPFM_OUTPUT_DIR", "./runs")

LOG_LEVEL = os.getenv("FPFM_LOG_LEVEL", "INFO").upper()

# Process-pool size for parameter sweeps (1 = run in this process)
WORKERS = max(1, int(os.getenv("FPFM_WORKERS", "1")))

RECORD_RUNS = os.getenv("FPFM_RECORD_RUNS", "false").lower() in {"1", "true", "yes"}

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


def configure_logging(level: str = LOG_LEVEL):
    """Configure root logging for scripts"""
    logging.basicConfig(level=getattr(logging, level, logging.INFO), format=LOG_FORMAT)
