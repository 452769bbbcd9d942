"""Shared fixtures: coarse meshes and solved model cases, built once."""

import numpy as np
import pytest

from symcomp.fem import ScalarField, solve_poisson_robin
from symcomp.geometry import Manifold
from symcomp.mesh import BoundaryField, Disk, Polygon, build_mesh


@pytest.fixture(scope="session")
def plane():
    return Manifold.plane()


@pytest.fixture(scope="session")
def disk_mesh(plane):
    """Unit disk at a coarse resolution, shared across tests."""
    return build_mesh(Disk(1.0), plane, 0.1)


@pytest.fixture(scope="session")
def disk_solution(plane, disk_mesh):
    """Robin solution on the unit disk with f = 1, beta = 1."""
    f = ScalarField.constant(disk_mesh, 1.0)
    beta = BoundaryField.constant(disk_mesh, 1.0)
    return solve_poisson_robin(disk_mesh, f, beta)


@pytest.fixture(scope="session")
def square_mesh(plane):
    return build_mesh(Polygon(((0, 0), (1, 0), (1, 1), (0, 1))), plane, 0.1)


@pytest.fixture(scope="session")
def random_fields(disk_mesh):
    """Deterministic batch of positive random nodal fields on the disk."""
    rng = np.random.default_rng(1234)
    return [ScalarField(disk_mesh, rng.uniform(0.0, 1.0, disk_mesh.num_vertices))
            for _ in range(6)]
