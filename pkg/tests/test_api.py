import pytest
from fastapi.testclient import TestClient
from sqlalchemy.orm import sessionmaker

from fpfm.core.database import create_tables, get_db, make_engine
from fpfm.energy import StripSummary
from fpfm.main import app
from fpfm.models import RunRecord, record_run


@pytest.fixture
def session_factory():
    engine = make_engine("sqlite://")
    create_tables(engine)
    yield sessionmaker(autocommit=False, autoflush=False, bind=engine)
    engine.dispose()


@pytest.fixture
def client(session_factory):
    def override_get_db():
        db = session_factory()
        try:
            yield db
        finally:
            db.close()

    app.dependency_overrides[get_db] = override_get_db
    yield TestClient(app)
    app.dependency_overrides.clear()


@pytest.fixture
def catalog(session_factory):
    db = session_factory()
    rows = [
        ("fpfm", "uniform_stretch", "OK", {"max_abs_residual": 1e-6, "wall_time_s": 0.5}),
        ("fpfm", "strip", "FAILED-IDENTITY", {"max_abs_residual": 0.3, "wall_time_s": 40.0}),
        ("figure3", "figure3", "OK", {"max_abs_residual": 2e-3}),
        ("travelwave", "travelwave", "FLAGGED", {}),
    ]
    ids = []
    for kind, name, status, summary in rows:
        record = record_run(db, kind, name, status, f"runs/{name}", {"name": name}, summary)
        ids.append(record.id)
    db.close()
    return ids


def test_root_and_health(client):
    assert client.get("/").json()["message"] == "FPFM run catalog is running!"
    assert client.get("/health").json() == {"status": "healthy", "service": "fpfm-run-catalog"}


def test_list_runs_newest_first(client, catalog):
    runs = client.get("/runs").json()
    assert [r["id"] for r in runs] == sorted(catalog, reverse=True)
    assert "summary" not in runs[0]


def test_list_runs_filters(client, catalog):
    runs = client.get("/runs", params={"kind": "fpfm"}).json()
    assert {r["name"] for r in runs} == {"uniform_stretch", "strip"}

    runs = client.get("/runs", params={"kind": "fpfm", "status": "OK"}).json()
    assert [r["name"] for r in runs] == ["uniform_stretch"]

    runs = client.get("/runs", params={"skip": 1, "limit": 2}).json()
    assert len(runs) == 2


@pytest.mark.parametrize("params", [{"kind": "recipe"}, {"status": "DONE"}])
def test_list_runs_rejects_unknown_filters(client, params):
    response = client.get("/runs", params=params)
    assert response.status_code == 400
    assert "Valid options" in response.json()["detail"]


def test_get_run(client, catalog):
    run = client.get(f"/runs/{catalog[0]}").json()
    assert run["name"] == "uniform_stretch"
    assert run["config"] == {"name": "uniform_stretch"}
    assert run["max_residual"] == pytest.approx(1e-6)
    assert run["wall_time_s"] == pytest.approx(0.5)

    assert client.get("/runs/9999").status_code == 404


def test_stats(client, catalog):
    stats = client.get("/stats").json()
    assert stats["total_runs"] == 4
    assert stats["by_kind"] == {"fpfm": 2, "figure3": 1, "travelwave": 1}
    assert stats["by_status"] == {"OK": 2, "FAILED-IDENTITY": 1, "FLAGGED": 1}
    assert stats["max_residual"] == pytest.approx(0.3)


def test_record_run_rejects_unknown_kind(session_factory):
    db = session_factory()
    try:
        with pytest.raises(ValueError):
            record_run(db, "recipe", "x", "OK", "runs/x", {}, {})
        assert db.query(RunRecord).count() == 0
    finally:
        db.close()


def test_non_finite_summary_is_served_as_null(client, session_factory):
    summary = {
        "max_abs_residual": float("nan"),
        "wall_time_s": 3.0,
        "strip": StripSummary(reason="no steady window").as_dict(),
        "curve": [1.0, float("inf")],
    }
    db = session_factory()
    try:
        record = record_run(db, "fpfm", "strip", "FLAGGED", "runs/strip", {"dt": 1e-3}, summary)
        run_id = record.id
    finally:
        db.close()

    response = client.get(f"/runs/{run_id}")
    assert response.status_code == 200
    run = response.json()
    assert run["max_residual"] is None
    assert run["summary"]["strip"]["velocity"] is None
    assert run["summary"]["strip"]["reason"] == "no steady window"
    assert run["summary"]["curve"] == [1.0, None]
    assert client.get("/runs").status_code == 200
    assert client.get("/stats").status_code == 200
