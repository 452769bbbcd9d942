"""P1 assembly, solver postconditions, and exact P1 integral helpers."""

import math

import numpy as np
import pytest

from symcomp.fem import (PositivityWarning, ScalarField, SolverError, assemble,
                         field_stats, integrate_product, residual_check,
                         solve_poisson_robin, solve_system)
from symcomp.mesh import BoundaryField
from symcomp.rearrange import ExactDistribution


def test_matrix_symmetric_positive(disk_mesh):
    f = ScalarField.constant(disk_mesh, 1.0)
    beta = BoundaryField.constant(disk_mesh, 1.0)
    sys = assemble(disk_mesh, f, beta)
    A = sys.matrix
    assert (A - A.T).nnz == 0 or float(abs(A - A.T).max()) < 1e-14
    # SPD via Cholesky-free check: x^T A x > 0 for a few random x
    rng = np.random.default_rng(0)
    for _ in range(5):
        x = rng.standard_normal(A.shape[0])
        assert float(x @ (A @ x)) > 0.0


def test_load_vector_sums_to_source_integral(disk_mesh):
    rng = np.random.default_rng(7)
    f = ScalarField(disk_mesh, rng.uniform(0.5, 2.0, disk_mesh.num_vertices))
    beta = BoundaryField.constant(disk_mesh, 1.0)
    sys = assemble(disk_mesh, f, beta)
    # sum_i b_i = int f dx exactly for the P1 load
    exact = integrate_product(f, ScalarField.constant(disk_mesh, 1.0))
    assert float(np.sum(sys.rhs)) == pytest.approx(exact, rel=1e-12)


def test_residual_postcondition(disk_mesh, disk_solution):
    f = ScalarField.constant(disk_mesh, 1.0)
    beta = BoundaryField.constant(disk_mesh, 1.0)
    sys = assemble(disk_mesh, f, beta)
    assert residual_check(sys, disk_solution) <= 1e-10 * 1.001


def test_disk_solution_against_closed_form(disk_mesh, disk_solution):
    r = np.linalg.norm(disk_mesh.vertices, axis=1)
    exact = (1.0 - r ** 2) / 4.0 + 0.5
    err = float(np.max(np.abs(disk_solution.values - exact)))
    assert err < 0.02 * float(np.max(exact))


def test_solution_positive_min_on_boundary(disk_solution):
    mesh = disk_solution.mesh
    assert float(np.min(disk_solution.values)) > 0.0
    interior = np.setdiff1d(np.arange(mesh.num_vertices), mesh.boundary_vertices)
    assert float(np.min(disk_solution.values[mesh.boundary_vertices])) <= \
        float(np.min(disk_solution.values[interior]))


def test_robin_constant_scaling(disk_mesh):
    # doubling beta halves the boundary value of the disk solution:
    # u = (1 - r^2)/4 + 1/(2 beta)
    f = ScalarField.constant(disk_mesh, 1.0)
    u1 = solve_poisson_robin(disk_mesh, f, BoundaryField.constant(disk_mesh, 1.0))
    u2 = solve_poisson_robin(disk_mesh, f, BoundaryField.constant(disk_mesh, 2.0))
    b1 = float(np.min(u1.values[disk_mesh.boundary_vertices]))
    b2 = float(np.min(u2.values[disk_mesh.boundary_vertices]))
    assert b1 == pytest.approx(0.5, rel=0.02)
    assert b2 == pytest.approx(0.25, rel=0.02)


def test_linearity_in_source(disk_mesh):
    beta = BoundaryField.constant(disk_mesh, 1.0)
    u1 = solve_poisson_robin(disk_mesh, ScalarField.constant(disk_mesh, 1.0), beta)
    u3 = solve_poisson_robin(disk_mesh, ScalarField.constant(disk_mesh, 3.0), beta)
    assert np.allclose(u3.values, 3.0 * u1.values, rtol=1e-8, atol=1e-10)


def test_source_validation(disk_mesh):
    beta = BoundaryField.constant(disk_mesh, 1.0)
    with pytest.raises(SolverError):
        solve_poisson_robin(disk_mesh, ScalarField.constant(disk_mesh, -1.0), beta)
    with pytest.raises(SolverError):
        solve_poisson_robin(disk_mesh, ScalarField.constant(disk_mesh, 0.0), beta)


def test_field_stats_match_exact_distribution(random_fields):
    for u in random_fields[:3]:
        stats = field_stats(u)
        dist = ExactDistribution.from_field(u)
        assert stats.L1 == pytest.approx(dist.moment(1), rel=1e-10)
        assert stats.L2 ** 2 == pytest.approx(dist.moment(2), rel=1e-10)
        assert stats.area == pytest.approx(u.mesh.area)
        assert stats.min == float(np.min(u.values))
        assert stats.max == float(np.max(u.values))


def test_abs_integral_with_sign_change(disk_mesh):
    # u = x on the disk: int |x| dx = 4/3 over the unit disk
    u = ScalarField(disk_mesh, disk_mesh.vertices[:, 0].copy())
    stats = field_stats(u)
    assert stats.L1 == pytest.approx(4.0 / 3.0, rel=5e-3)


def test_integrate_product_symmetry_and_moment(random_fields):
    a, b = random_fields[0], random_fields[1]
    assert integrate_product(a, b) == pytest.approx(integrate_product(b, a),
                                                    rel=1e-14)
    dist = ExactDistribution.from_field(a)
    assert integrate_product(a, a) == pytest.approx(dist.moment(2), rel=1e-10)


def test_from_function_constructor(disk_mesh):
    u = ScalarField.from_function(disk_mesh, lambda p: p[0] + 2.0 * p[1])
    want = disk_mesh.vertices[:, 0] + 2.0 * disk_mesh.vertices[:, 1]
    assert np.allclose(u.values, want)


def test_solve_system_rejects_indefinite(disk_mesh):
    from scipy import sparse
    from symcomp.fem import LinearSystem
    n = disk_mesh.num_vertices
    bad = LinearSystem(matrix=sparse.csr_matrix((n, n)), rhs=np.ones(n))
    with pytest.raises(SolverError):
        solve_system(disk_mesh, bad)
