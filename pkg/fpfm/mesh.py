"""
Structured triangular meshes for rectangles and strips

Nodes are numbered row by row, n = j*(nx+1) + i. Each cell is split along
one diagonal; the diagonal direction alternates between cell rows so that
straight cracks along the x axis do not follow a biased mesh direction.
Boundary edges carry one of the tags dirichlet / neumann_loaded /
neumann_free, assigned per rectangle side.
"""

import logging
from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Optional, Sequence, Tuple, Union

import numpy as np

from fpfm.core.errors import MeshError
from fpfm.core.params import BoundaryTag, BoundaryTagging, MeshSpec

logger = logging.getLogger("fpfm.mesh")


@dataclass(frozen=True, eq=False)
class TriMesh:
    nodes: np.ndarray           # (N, 2)
    triangles: np.ndarray       # (M, 3), counterclockwise
    boundary_edges: np.ndarray  # (K, 2)
    boundary_tags: Tuple[BoundaryTag, ...]

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_triangles(self) -> int:
        return len(self.triangles)

    @cached_property
    def signed_areas(self) -> np.ndarray:
        p = self.nodes[self.triangles]
        d1 = p[:, 1] - p[:, 0]
        d2 = p[:, 2] - p[:, 0]
        return 0.5 * (d1[:, 0] * d2[:, 1] - d2[:, 0] * d1[:, 1])

    @cached_property
    def areas(self) -> np.ndarray:
        return np.abs(self.signed_areas)

    @cached_property
    def shape_gradients(self) -> np.ndarray:
        """(M, 3, 2) gradients of the three P1 shape functions per triangle"""
        p = self.nodes[self.triangles]
        x, y = p[:, :, 0], p[:, :, 1]
        b = np.stack([y[:, 1] - y[:, 2], y[:, 2] - y[:, 0], y[:, 0] - y[:, 1]], axis=1)
        c = np.stack([x[:, 2] - x[:, 1], x[:, 0] - x[:, 2], x[:, 1] - x[:, 0]], axis=1)
        two_area = 2.0 * self.signed_areas[:, None]
        return np.stack([b / two_area, c / two_area], axis=2)

    @cached_property
    def lumped_mass(self) -> np.ndarray:
        """Nodal area: one third of every incident triangle"""
        mass = np.zeros(self.n_nodes)
        np.add.at(mass, self.triangles.ravel(), np.repeat(self.areas / 3.0, 3))
        return mass

    @cached_property
    def edge_lengths(self) -> np.ndarray:
        d = self.nodes[self.boundary_edges[:, 1]] - self.nodes[self.boundary_edges[:, 0]]
        return np.linalg.norm(d, axis=1)

    def edges_with_tag(self, tag: BoundaryTag) -> np.ndarray:
        mask = np.array([t == tag for t in self.boundary_tags], dtype=bool)
        return np.flatnonzero(mask)

    def nodes_with_tag(self, tag: BoundaryTag) -> np.ndarray:
        """Sorted unique nodes touching an edge with this tag"""
        edges = self.boundary_edges[self.edges_with_tag(tag)]
        return np.unique(edges.ravel())

    def validate(self):
        """Raise MeshError if any TriMesh invariant is broken"""
        if self.triangles.size and (self.triangles.min() < 0 or self.triangles.max() >= self.n_nodes):
            raise MeshError("triangle node index out of range")
        if np.any(self.signed_areas <= 0.0):
            raise MeshError("triangle with non-positive signed area")
        if len(np.unique(np.sort(self.triangles, axis=1), axis=0)) != self.n_triangles:
            raise MeshError("duplicate triangles")

        counts = Counter()
        for a, b in self.triangles[:, [0, 1, 1, 2, 2, 0]].reshape(-1, 2):
            counts[(min(a, b), max(a, b))] += 1
        if any(n > 2 for n in counts.values()):
            raise MeshError("edge shared by more than two triangles")
        topological = {edge for edge, n in counts.items() if n == 1}
        tagged = [(min(a, b), max(a, b)) for a, b in self.boundary_edges]
        if len(tagged) != len(set(tagged)) or set(tagged) != topological:
            raise MeshError("boundary edges do not match the topological boundary")
        if len(self.boundary_tags) != len(self.boundary_edges):
            raise MeshError("every boundary edge needs exactly one tag")


def _divisions(length: float, h: float, name: str) -> int:
    if h > length:
        raise MeshError(f"h={h} is larger than the {name} {length}")
    n = int(round(length / h))
    if abs(n * h - length) > 1e-6 * length:
        raise MeshError(f"h={h} does not divide the {name} {length}")
    return n


def build_rect_mesh(
    width: float,
    height: float,
    h: float,
    tag_rule: BoundaryTagging = BoundaryTagging(),
    origin: Sequence[float] = (0.0, 0.0),
) -> TriMesh:
    """Structured mesh of [x0, x0+width] x [y0, y0+height] with 2*nx*ny triangles"""
    if width <= 0 or height <= 0 or h <= 0:
        raise MeshError("width, height and h must be positive")
    nx = _divisions(width, h, "width")
    ny = _divisions(height, h, "height")
    x0, y0 = origin

    xs = x0 + width * np.arange(nx + 1) / nx
    ys = y0 + height * np.arange(ny + 1) / ny
    xx, yy = np.meshgrid(xs, ys)
    nodes = np.column_stack([xx.ravel(), yy.ravel()])

    def node(i, j):
        return j * (nx + 1) + i

    triangles = []
    for j in range(ny):
        for i in range(nx):
            n00, n10, n01, n11 = node(i, j), node(i + 1, j), node(i, j + 1), node(i + 1, j + 1)
            if j % 2 == 0:
                triangles += [(n00, n10, n11), (n00, n11, n01)]
            else:
                triangles += [(n00, n10, n01), (n10, n11, n01)]

    # Boundary traversed counterclockwise: bottom, right, top, left
    edges, tags = [], []
    for i in range(nx):
        edges.append((node(i, 0), node(i + 1, 0)))
        tags.append(tag_rule.bottom)
    for j in range(ny):
        edges.append((node(nx, j), node(nx, j + 1)))
        tags.append(tag_rule.right)
    for i in range(nx, 0, -1):
        edges.append((node(i, ny), node(i - 1, ny)))
        tags.append(tag_rule.top)
    for j in range(ny, 0, -1):
        edges.append((node(0, j), node(0, j - 1)))
        tags.append(tag_rule.left)

    mesh = TriMesh(
        nodes=nodes,
        triangles=np.array(triangles, dtype=np.int64),
        boundary_edges=np.array(edges, dtype=np.int64),
        boundary_tags=tuple(tags),
    )
    logger.debug(f"Built {nx}x{ny} mesh: {mesh.n_nodes} nodes, {mesh.n_triangles} triangles")
    return mesh


def mesh_from_spec(spec: MeshSpec) -> TriMesh:
    return build_rect_mesh(spec.width, spec.height, spec.h, spec.tags, spec.origin)


@dataclass(frozen=True)
class Region:
    """Geometric node selector: lines x = const / y = const and coordinate ranges"""

    x: Optional[float] = None
    y: Optional[float] = None
    x_range: Optional[Tuple[float, float]] = None
    y_range: Optional[Tuple[float, float]] = None
    tol: float = 1e-9

    def contains(self, points: np.ndarray) -> np.ndarray:
        px, py = points[:, 0], points[:, 1]
        mask = np.ones(len(points), dtype=bool)
        if self.x is not None:
            mask &= np.abs(px - self.x) <= self.tol
        if self.y is not None:
            mask &= np.abs(py - self.y) <= self.tol
        if self.x_range is not None:
            mask &= (px >= self.x_range[0] - self.tol) & (px <= self.x_range[1] + self.tol)
        if self.y_range is not None:
            mask &= (py >= self.y_range[0] - self.tol) & (py <= self.y_range[1] + self.tol)
        return mask


def node_subset(mesh: TriMesh, predicate: Union[Region, Callable[[np.ndarray], np.ndarray]]) -> np.ndarray:
    """Sorted indices of the nodes satisfying the predicate (possibly empty)"""
    if isinstance(predicate, Region):
        mask = predicate.contains(mesh.nodes)
    else:
        mask = np.asarray(predicate(mesh.nodes), dtype=bool)
    return np.flatnonzero(mask)
