import json
import math

import meshio
import numpy as np

from fpfm.mesh import build_rect_mesh
from fpfm.output import read_csv, write_csv, write_json, write_vtk


def test_csv_keeps_full_precision(tmp_path):
    values = [1.0 / 3.0, math.pi * 1e-17, float("nan")]
    path = write_csv(tmp_path / "nested" / "table.csv", ["step", "x"], [(i, v) for i, v in enumerate(values)])
    table = read_csv(path)
    assert list(table) == ["step", "x"]
    assert table["x"][0] == values[0]
    assert table["x"][1] == values[1]
    assert math.isnan(table["x"][2])
    assert path.read_text().splitlines()[1] == f"0,{1.0 / 3.0!r}"


def test_vtk_snapshot(tmp_path):
    mesh = build_rect_mesh(1.0, 1.0, 0.5)
    z = np.linspace(0.0, 1.0, mesh.n_nodes)
    u = np.ones((mesh.n_nodes, 2))
    path = write_vtk(tmp_path / "vtk" / "step_000000.vtk", mesh, {"z": z, "u": u}, {"w": np.zeros(mesh.n_triangles)})

    assert path.read_text().startswith("# vtk DataFile")
    snapshot = meshio.read(path)
    np.testing.assert_allclose(snapshot.points[:, :2], mesh.nodes)
    np.testing.assert_allclose(snapshot.point_data["z"], z)
    assert snapshot.point_data["u"].shape == (mesh.n_nodes, 3)
    assert len(snapshot.cells_dict["triangle"]) == mesh.n_triangles


def test_json_writes_non_finite_as_null(tmp_path):
    payload = {"V": float("nan"), "ratio": np.float64(np.inf), "n": np.int64(3), "tips": np.array([1.0, 2.0])}
    document = json.loads(write_json(tmp_path / "summary.json", payload).read_text())
    assert document == {"V": None, "ratio": None, "n": 3, "tips": [1.0, 2.0]}
