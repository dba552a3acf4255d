import numpy as np
import pytest

from rfkcert.mesh import (
    INNER,
    INTERIOR,
    OUTER,
    MeshError,
    annulus_mesh,
    boundary_edges,
    disk_mesh,
    rectangle_mesh,
)


def _areas(mesh):
    return mesh.areas()


def test_annulus_boundary_snap():
    mesh = annulus_mesh(1.0, 2.0, e=0.5, h=0.1)
    r_outer = np.hypot(*mesh.nodes[mesh.tags == OUTER].T)
    assert np.max(np.abs(r_outer - 2.0)) < 1e-12
    hole = mesh.nodes[mesh.tags == INNER] - np.array([0.5, 0.0])
    assert np.max(np.abs(np.hypot(*hole.T) - 1.0)) < 1e-12


def test_annulus_positive_areas_and_coverage():
    mesh = annulus_mesh(1.0, 2.0, e=0.3, h=0.05)
    a = _areas(mesh)
    assert np.all(a > 0)
    assert np.sum(a) == pytest.approx(3.0 * np.pi, rel=2e-3)
    # h_max records the longest edge actually produced; eccentricity
    # stretches rings, so allow up to twice the requested spacing.
    assert mesh.h_max <= 2 * 0.05


def test_disk_mesh():
    mesh = disk_mesh(1.5, h=0.05)
    assert np.sum(_areas(mesh)) == pytest.approx(np.pi * 2.25, rel=2e-3)
    assert not np.any(mesh.tags == INNER)
    r = np.hypot(*mesh.nodes[mesh.tags == OUTER].T)
    assert np.max(np.abs(r - 1.5)) < 1e-12


def test_rectangle_mesh():
    mesh = rectangle_mesh(2.0, 1.0, h=0.1)
    assert np.sum(_areas(mesh)) == pytest.approx(2.0, rel=1e-12)
    on_edge = (
        np.isclose(mesh.nodes[:, 0], 0.0)
        | np.isclose(mesh.nodes[:, 0], 2.0)
        | np.isclose(mesh.nodes[:, 1], 0.0)
        | np.isclose(mesh.nodes[:, 1], 1.0)
    )
    assert np.array_equal(on_edge, mesh.tags == OUTER)


def test_boundary_edges_close_up():
    mesh = annulus_mesh(1.0, 2.0, e=0.4, h=0.1)
    edges = boundary_edges(mesh)
    assert len(edges) > 0
    counts = np.bincount(edges.ravel())
    used = counts[counts > 0]
    # two closed loops: every boundary vertex appears in exactly two edges
    assert np.all(used == 2)
    # each edge lives on a single loop and stays near the target spacing
    for a, b in edges:
        assert mesh.tags[a] == mesh.tags[b] != INTERIOR
    p = mesh.nodes
    lens = np.hypot(*(p[edges[:, 0]] - p[edges[:, 1]]).T)
    assert lens.max() < 0.2


def test_interior_tag_is_default():
    mesh = annulus_mesh(1.0, 2.0, h=0.2)
    kinds = set(np.unique(mesh.tags))
    assert kinds == {INTERIOR, OUTER, INNER}


def test_invalid_geometry():
    with pytest.raises((MeshError, ValueError)):
        annulus_mesh(2.0, 1.0, h=0.1)
    with pytest.raises((MeshError, ValueError)):
        annulus_mesh(1.0, 2.0, e=1.5, h=0.1)
    with pytest.raises((MeshError, ValueError)):
        disk_mesh(1.0, h=0.0)


def test_refinement_shrinks_h():
    coarse = annulus_mesh(1.0, 2.0, e=0.2, h=0.1)
    fine = annulus_mesh(1.0, 2.0, e=0.2, h=0.05)
    assert fine.h_max < coarse.h_max
    assert fine.n_nodes > 3 * coarse.n_nodes
