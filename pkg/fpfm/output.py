"""
Run directory writers: CSV tables, legacy-VTK snapshots and summary JSON

CSV floats are written with repr() so they round-trip at full double
precision. Column orders are documented in docs/formats.md.
"""

import csv
import json
import logging
import math
from pathlib import Path
from typing import Any, Dict, Iterable, Optional, Sequence, Union

import meshio
import numpy as np

from fpfm.mesh import TriMesh

logger = logging.getLogger("fpfm.output")

PathLike = Union[str, Path]


def _cell(value: Any) -> str:
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, np.integer):
        return str(int(value))
    return str(value)


def write_csv(path: PathLike, columns: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, delimiter=",", quoting=csv.QUOTE_MINIMAL)
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_cell(v) for v in row])
    return path


def read_csv(path: PathLike) -> Dict[str, np.ndarray]:
    """Column name -> float array (for reports and tests)"""
    with Path(path).open(newline="", encoding="utf-8") as f:
        reader = csv.reader(f)
        header = next(reader)
        data = [[float(v) for v in row] for row in reader]
    table = np.array(data, dtype=float).reshape(-1, len(header))
    return {name: table[:, i] for i, name in enumerate(header)}


def write_vtk(
    path: PathLike,
    mesh: TriMesh,
    point_data: Optional[Dict[str, np.ndarray]] = None,
    cell_data: Optional[Dict[str, np.ndarray]] = None,
) -> Path:
    """ASCII legacy-VTK unstructured grid; 2D points are padded with z = 0"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    points = np.column_stack([mesh.nodes, np.zeros(mesh.n_nodes)])

    pdata = {}
    for name, values in (point_data or {}).items():
        values = np.asarray(values, dtype=float)
        if values.ndim == 2 and values.shape[1] == 2:
            values = np.column_stack([values, np.zeros(len(values))])
        pdata[name] = values
    cdata = {name: [np.asarray(values, dtype=float)] for name, values in (cell_data or {}).items()}

    meshio.write(
        str(path),
        meshio.Mesh(points=points, cells=[("triangle", mesh.triangles)], point_data=pdata, cell_data=cdata),
        file_format="vtk",
        binary=False,
    )
    return path


def json_safe(value: Any) -> Any:
    """Plain JSON document; NaN and infinities become None"""
    if isinstance(value, dict):
        return {str(k): json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [json_safe(v) for v in value]
    if isinstance(value, np.ndarray):
        return json_safe(value.tolist())
    if isinstance(value, (np.floating, float)):
        value = float(value)
        return value if math.isfinite(value) else None
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, Path):
        return str(value)
    return value


def write_json(path: PathLike, payload: Dict[str, Any]) -> Path:
    """Summary JSON; NaN and infinities become null"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(json_safe(payload), indent=2, sort_keys=True), encoding="utf-8")
    return path
