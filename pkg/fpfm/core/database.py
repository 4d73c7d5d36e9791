from contextlib import contextmanager
from typing import Iterator

from sqlalchemy import create_engine
from sqlalchemy.engine import Engine
from sqlalchemy.orm import Session, declarative_base, sessionmaker
from sqlalchemy.pool import StaticPool

from fpfm.core.settings import DATABASE_URL


def make_engine(url: str) -> Engine:
    """Engine for the run catalog; in-memory SQLite keeps one shared connection"""
    if not url.startswith("sqlite"):
        return create_engine(url, echo=False)
    kwargs = {"connect_args": {"check_same_thread": False}}  # API worker threads share it
    if url in ("sqlite://", "sqlite:///:memory:"):
        kwargs["poolclass"] = StaticPool
    return create_engine(url, echo=False, **kwargs)


engine = make_engine(DATABASE_URL)
SessionLocal = sessionmaker(autocommit=False, autoflush=False, bind=engine)

# Declarative base for catalog tables
Base = declarative_base()


def get_db() -> Iterator[Session]:
    """Catalog session per API request"""
    db = SessionLocal()
    try:
        yield db
    finally:
        db.close()


@contextmanager
def catalog_session() -> Iterator[Session]:
    """Catalog session for runners and scripts, closed on exit"""
    db = SessionLocal()
    try:
        yield db
    finally:
        db.close()


def create_tables(bind: Engine = engine):
    Base.metadata.create_all(bind=bind)


def drop_tables(bind: Engine = engine):
    """Drop every catalog table (recorded runs are lost)"""
    Base.metadata.drop_all(bind=bind)
