"""
Run catalog API - read-only FastAPI application over recorded runs

Serve with `python -m fpfm.main`.
"""

from contextlib import asynccontextmanager
from typing import List, Optional

from fastapi import Depends, FastAPI, HTTPException, Query
from fastapi.middleware.cors import CORSMiddleware
from sqlalchemy import func
from sqlalchemy.orm import Session

from fpfm import __version__
from fpfm.core.database import create_tables, get_db
from fpfm.models import RUN_KINDS, RUN_STATUSES, RunRecord


@asynccontextmanager
async def lifespan(app: FastAPI):
    """Initialize catalog tables on app startup"""
    create_tables()
    yield


app = FastAPI(
    title="FPFM Run Catalog",
    description="Recorded fracture phase-field runs, Griffith ODE curves and traveling-wave sweeps",
    version=__version__,
    docs_url="/docs",
    redoc_url="/redoc",
    lifespan=lifespan,
)

app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)


@app.get("/")
async def root():
    """Root endpoint for health checks"""
    return {
        "message": "FPFM run catalog is running!",
        "version": __version__,
        "docs": "/docs",
    }


@app.get("/health")
async def health_check():
    return {"status": "healthy", "service": "fpfm-run-catalog"}


@app.get("/runs", response_model=List[dict])
async def get_runs(
    skip: int = Query(0, ge=0, description="Number of runs to skip"),
    limit: int = Query(20, ge=1, le=100, description="Number of runs to return"),
    kind: Optional[str] = Query(None, description="Filter by run kind"),
    status: Optional[str] = Query(None, description="Filter by run status"),
    db: Session = Depends(get_db),
):
    """List recorded runs, newest first"""
    if kind is not None and kind not in RUN_KINDS:
        raise HTTPException(status_code=400, detail=f"Invalid kind: {kind}. Valid options: {list(RUN_KINDS)}")
    if status is not None and status not in RUN_STATUSES:
        raise HTTPException(status_code=400, detail=f"Invalid status: {status}. Valid options: {list(RUN_STATUSES)}")

    query = db.query(RunRecord)
    if kind:
        query = query.filter(RunRecord.kind == kind)
    if status:
        query = query.filter(RunRecord.status == status)

    runs = query.order_by(RunRecord.id.desc()).offset(skip).limit(limit).all()
    return [run.as_dict() for run in runs]


@app.get("/runs/{run_id}")
async def get_run(run_id: int, db: Session = Depends(get_db)):
    """One run with its config and summary documents"""
    run = db.query(RunRecord).filter(RunRecord.id == run_id).first()
    if not run:
        raise HTTPException(status_code=404, detail="Run not found")
    return run.as_dict(full=True)


@app.get("/stats")
async def get_stats(db: Session = Depends(get_db)):
    """Run counts by kind and status"""
    by_kind = dict(db.query(RunRecord.kind, func.count(RunRecord.id)).group_by(RunRecord.kind).all())
    by_status = dict(db.query(RunRecord.status, func.count(RunRecord.id)).group_by(RunRecord.status).all())
    worst = db.query(func.max(RunRecord.max_residual)).scalar()
    return {
        "total_runs": db.query(RunRecord).count(),
        "by_kind": by_kind,
        "by_status": by_status,
        "max_residual": worst,
    }


if __name__ == "__main__":
    import uvicorn
    uvicorn.run(app, host="0.0.0.0", port=8000)
