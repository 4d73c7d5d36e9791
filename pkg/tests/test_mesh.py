import numpy as np
import pytest

from fpfm.core.errors import MeshError
from fpfm.core.params import BoundaryTag, BoundaryTagging, MeshSpec
from fpfm.mesh import Region, TriMesh, build_rect_mesh, mesh_from_spec, node_subset


def test_counts_and_areas():
    mesh = build_rect_mesh(1.0, 1.0, 0.5)
    assert mesh.n_nodes == 9
    assert mesh.n_triangles == 8
    assert len(mesh.boundary_edges) == 8
    assert mesh.areas.sum() == pytest.approx(1.0)
    assert mesh.lumped_mass.sum() == pytest.approx(1.0)
    mesh.validate()


def test_strip_mesh_with_origin():
    mesh = build_rect_mesh(4.0, 2.0, 0.25, origin=(0.0, -1.0))
    mesh.validate()
    assert mesh.nodes[:, 1].min() == pytest.approx(-1.0)
    assert mesh.nodes[:, 1].max() == pytest.approx(1.0)
    assert mesh.areas.sum() == pytest.approx(8.0)
    assert np.all(mesh.signed_areas > 0.0)


def test_h_must_divide_sides():
    with pytest.raises(MeshError):
        build_rect_mesh(1.0, 1.0, 0.3)
    with pytest.raises(MeshError):
        build_rect_mesh(1.0, 0.5, 0.75)
    with pytest.raises(MeshError):
        build_rect_mesh(1.0, 1.0, -0.1)


def test_shape_gradients_reproduce_linear_fields():
    mesh = build_rect_mesh(2.0, 1.0, 0.25)
    grads = mesh.shape_gradients
    np.testing.assert_allclose(grads.sum(axis=1), 0.0, atol=1e-12)
    field = 3.0 * mesh.nodes[:, 0] - 2.0 * mesh.nodes[:, 1]
    gradient = np.einsum("eij,ei->ej", grads, field[mesh.triangles])
    np.testing.assert_allclose(gradient, np.tile([3.0, -2.0], (mesh.n_triangles, 1)), atol=1e-12)


def test_boundary_tags_per_side():
    tags = BoundaryTagging(left=BoundaryTag.DIRICHLET, right=BoundaryTag.NEUMANN_LOADED)
    mesh = build_rect_mesh(1.0, 1.0, 0.25, tags)
    left = mesh.nodes_with_tag(BoundaryTag.DIRICHLET)
    np.testing.assert_allclose(mesh.nodes[left, 0], 0.0)
    assert len(left) == 5
    assert len(mesh.edges_with_tag(BoundaryTag.NEUMANN_LOADED)) == 4
    assert len(mesh.edges_with_tag(BoundaryTag.NEUMANN_FREE)) == 8
    assert mesh.edge_lengths.sum() == pytest.approx(4.0)


def test_mesh_from_spec():
    spec = MeshSpec(width=2.0, height=1.0, h=0.5, tags=BoundaryTagging.uniform(BoundaryTag.DIRICHLET))
    mesh = mesh_from_spec(spec)
    assert mesh.n_nodes == 15
    assert len(mesh.nodes_with_tag(BoundaryTag.DIRICHLET)) == 12


def test_node_subset():
    mesh = build_rect_mesh(1.0, 1.0, 0.25)
    line = node_subset(mesh, Region(y=0.5))
    assert len(line) == 5
    np.testing.assert_allclose(mesh.nodes[line, 1], 0.5)
    box = node_subset(mesh, Region(x_range=(0.0, 0.5), y_range=(0.0, 0.25)))
    assert len(box) == 6
    assert len(node_subset(mesh, Region(y=0.3))) == 0
    assert len(node_subset(mesh, lambda p: p[:, 0] > 0.9)) == 5


def test_validate_rejects_flipped_triangle():
    mesh = build_rect_mesh(1.0, 1.0, 0.5)
    triangles = mesh.triangles.copy()
    triangles[0] = triangles[0][::-1]
    broken = TriMesh(mesh.nodes, triangles, mesh.boundary_edges, mesh.boundary_tags)
    with pytest.raises(MeshError):
        broken.validate()


def test_validate_rejects_missing_boundary_edge():
    mesh = build_rect_mesh(1.0, 1.0, 0.5)
    broken = TriMesh(mesh.nodes, mesh.triangles, mesh.boundary_edges[:-1], mesh.boundary_tags[:-1])
    with pytest.raises(MeshError):
        broken.validate()
