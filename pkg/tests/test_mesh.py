"""Mesh generation, quality gates, refinement, and the file format."""

import io
import math

import numpy as np
import pytest

from symcomp.geometry import Manifold
from symcomp.mesh import (AnnularSector, BoundaryField, ConeDisk, Disk,
                          Ellipse, GeodesicPolygon, Mesh, MeshError, Polygon,
                          SphericalCap, build_mesh, export_mesh, import_mesh,
                          refine, split_boundary_field)

PLANE = Manifold.plane()


def _check_quality(mesh, h):
    assert mesh.min_angle_deg >= 20.0
    assert float(np.max(mesh.edge_lengths)) <= 1.5 * h * 1.0001


def test_disk_mesh_quality_and_area(disk_mesh):
    _check_quality(disk_mesh, 0.1)
    assert disk_mesh.area == pytest.approx(math.pi, rel=3e-3)
    assert disk_mesh.perimeter == pytest.approx(2.0 * math.pi, rel=3e-3)


def test_disk_boundary_vertices_on_circle(disk_mesh):
    bv = disk_mesh.vertices[disk_mesh.boundary_vertices]
    assert np.allclose(np.linalg.norm(bv, axis=1), 1.0, atol=1e-12)


def test_boundary_chain_is_closed(disk_mesh, square_mesh):
    for mesh in (disk_mesh, square_mesh):
        starts = mesh.boundary[:, 0]
        ends = mesh.boundary[:, 1]
        assert np.array_equal(np.sort(starts), np.sort(ends))
        assert len(np.unique(starts)) == len(starts)


def test_square_mesh_exact_area(square_mesh):
    _check_quality(square_mesh, 0.1)
    assert square_mesh.area == pytest.approx(1.0, abs=1e-12)
    assert square_mesh.perimeter == pytest.approx(4.0, abs=1e-12)


@pytest.mark.parametrize("spec,m,h", [
    (Ellipse(1.0, 0.5), PLANE, 0.08),
    (Polygon(((0, 0), (2, 0), (2, 1), (1, 1), (1, 2), (0, 2))), PLANE, 0.1),
    (AnnularSector(0.5, 1.0, 1.5 * math.pi), PLANE, 0.1),
    (SphericalCap(math.pi / 3, 1.0), Manifold.sphere(1.0), 0.1),
    (ConeDisk(center_distance=2.0, radius=0.8), Manifold.cone(0.75), 0.1),
])
def test_domain_quality_gate(spec, m, h):
    mesh = build_mesh(spec, m, h)
    _check_quality(mesh, h)
    if spec.area is not None:
        assert mesh.area == pytest.approx(spec.area, rel=8e-3)


def test_geodesic_polygon_mesh():
    th = math.pi / 5
    dirs = tuple(
        (math.sin(th) * math.cos(2 * math.pi * k / 5),
         math.sin(th) * math.sin(2 * math.pi * k / 5),
         math.cos(th)) for k in range(5))
    mesh = build_mesh(GeodesicPolygon(dirs), Manifold.sphere(1.0), 0.1)
    assert mesh.min_angle_deg >= 20.0
    # vertices live on the unit sphere
    assert np.allclose(np.linalg.norm(mesh.vertices, axis=1), 1.0, atol=1e-12)


def test_cap_vertices_on_sphere():
    mesh = build_mesh(SphericalCap(math.pi / 3, 1.0), Manifold.sphere(1.0), 0.1)
    assert np.allclose(np.linalg.norm(mesh.vertices, axis=1), 1.0, atol=1e-12)


def test_bad_inputs():
    with pytest.raises(MeshError):
        build_mesh(Disk(1.0), PLANE, 0.0)
    with pytest.raises(MeshError):
        Disk(-1.0)
    with pytest.raises(MeshError):
        Polygon(((0, 0), (1, 0)))
    with pytest.raises(MeshError):
        AnnularSector(1.0, 0.5, 1.0)  # inner radius above outer
    with pytest.raises(MeshError):
        SphericalCap(4.0, 1.0)  # past the antipode


def test_cone_disk_must_avoid_apex():
    with pytest.raises(MeshError):
        build_mesh(ConeDisk(center_distance=1.0, radius=1.2),
                   Manifold.cone(0.75), 0.1)


def test_refine_counts_and_area(disk_mesh):
    fine = refine(disk_mesh)
    # every triangle splits in four, every edge gains a midpoint
    assert len(fine.triangles) == 4 * len(disk_mesh.triangles)
    assert fine.h == pytest.approx(disk_mesh.h / 2.0)
    # boundary midpoints are reprojected onto the circle, so the polygonal
    # area defect shrinks by about four
    coarse_err = abs(disk_mesh.area - math.pi)
    fine_err = abs(fine.area - math.pi)
    assert fine_err < 0.35 * coarse_err
    _check_quality(fine, fine.h)


def test_refine_square_keeps_exact_area(square_mesh):
    fine = refine(square_mesh)
    assert fine.area == pytest.approx(1.0, abs=1e-12)


def test_split_boundary_field(disk_mesh):
    beta = BoundaryField(np.arange(1, len(disk_mesh.boundary) + 1, dtype=float))
    half = split_boundary_field(beta)
    assert len(half.values) == 2 * len(beta.values)
    assert np.array_equal(half.values, np.repeat(beta.values, 2))


def test_boundary_field_from_arcs(disk_mesh):
    beta = BoundaryField.from_arcs(disk_mesh, ((0.0, 0.5, 1.0), (0.5, 1.0, 2.0)))
    assert len(beta.values) == len(disk_mesh.boundary)
    assert set(np.unique(beta.values)) <= {1.0, 2.0}
    # both values must actually appear on roughly half the edges each
    assert np.count_nonzero(beta.values == 1.0) == pytest.approx(
        len(beta.values) / 2, abs=2)


def test_boundary_field_positive_required(disk_mesh):
    with pytest.raises(MeshError):
        BoundaryField(np.full(len(disk_mesh.boundary), -1.0))


def test_export_import_roundtrip(disk_mesh):
    beta = BoundaryField.from_arcs(disk_mesh, ((0.0, 0.5, 1.0), (0.5, 1.0, 2.0)))
    text = export_mesh(disk_mesh, beta)
    assert text.startswith("symcomp-mesh v1\n")
    mesh2, beta2 = import_mesh(text)
    assert np.array_equal(mesh2.vertices, disk_mesh.vertices)
    assert np.array_equal(mesh2.triangles, disk_mesh.triangles)
    assert np.array_equal(mesh2.boundary, disk_mesh.boundary)
    assert np.array_equal(beta2.values, beta.values)
    # also accepts an open file object
    mesh3, _ = import_mesh(io.StringIO(text))
    assert np.array_equal(mesh3.vertices, disk_mesh.vertices)


def test_import_rejects_garbage():
    with pytest.raises(MeshError):
        import_mesh("not a mesh file\n")


def test_mesh_validate_catches_inverted_triangle(disk_mesh):
    tris = disk_mesh.triangles.copy()
    tris[0] = tris[0][::-1]
    bad = Mesh(manifold=disk_mesh.manifold, vertices=disk_mesh.vertices,
               triangles=tris, boundary=disk_mesh.boundary, h=disk_mesh.h,
               spec=disk_mesh.spec, boundary_params=disk_mesh.boundary_params)
    with pytest.raises(MeshError):
        bad.validate()


def test_triangle_areas_sum_to_area(disk_mesh):
    assert float(np.sum(disk_mesh.triangle_areas)) == pytest.approx(
        disk_mesh.area)
