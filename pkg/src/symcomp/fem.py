"""P1 finite elements for -Laplace(u) = f with the Robin condition
du/dnu + beta u = 0 on the boundary.

The bilinear form is grad u . grad w integrated over the triangles plus
beta u w integrated over the boundary edges (beta constant per edge).  The
same code covers planar charts and chordal triangles on the sphere: gradients
are taken inside each flat triangle.  The assembled matrix is symmetric
positive definite whenever beta > 0 on a boundary set of positive length and
is solved by diagonally preconditioned conjugate gradients.
"""

from __future__ import annotations

import math
import os
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import LinearOperator, cg

from .mesh import BoundaryField, Mesh, MeshError


class SolverError(RuntimeError):
    """Assembly or iterative solution failed."""


class PositivityWarning(UserWarning):
    """The discrete solution violated the positivity postcondition."""


@dataclass(frozen=True)
class ScalarField:
    """Piecewise-linear (nodal) function on a mesh."""

    mesh: Mesh
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.mesh.num_vertices,):
            raise MeshError("nodal value count must equal the vertex count")
        object.__setattr__(self, "values", v)

    @classmethod
    def constant(cls, mesh: Mesh, value: float) -> "ScalarField":
        return cls(mesh, np.full(mesh.num_vertices, float(value)))

    @classmethod
    def from_function(cls, mesh: Mesh, fn) -> "ScalarField":
        """Evaluate ``fn`` on vertex coordinates (rows of the vertex array)."""
        return cls(mesh, np.asarray([fn(p) for p in mesh.vertices], dtype=float))


@dataclass(frozen=True)
class LinearSystem:
    """Stiffness plus Robin boundary mass, and the P1 load vector."""

    matrix: sparse.csr_matrix
    rhs: np.ndarray


@dataclass(frozen=True)
class FieldStats:
    min: float
    max: float
    boundary_min: float
    L1: float
    L2: float
    area: float


def _triangle_gradients(mesh: Mesh):
    """Per-triangle barycentric gradients (T, 3, d) and areas (T,)."""
    p = mesh.triangle_corners
    areas = mesh.triangle_areas
    if np.any(areas < 1e-14 * mesh.area):
        raise SolverError("degenerate triangle encountered during assembly")
    if p.shape[2] == 2:
        p3 = np.concatenate([p, np.zeros(p.shape[:2] + (1,))], axis=2)
    else:
        p3 = p
    n = np.cross(p3[:, 1] - p3[:, 0], p3[:, 2] - p3[:, 0])
    nhat = n / np.linalg.norm(n, axis=1, keepdims=True)
    grads = np.empty_like(p3)
    for i in range(3):
        edge = p3[:, (i + 2) % 3] - p3[:, (i + 1) % 3]
        grads[:, i] = np.cross(nhat, edge) / (2.0 * areas[:, None])
    return grads, areas


def assemble(mesh: Mesh, f: ScalarField, beta: BoundaryField) -> LinearSystem:
    """Assemble the Robin problem.

    A_ij = sum_T area grad phi_i . grad phi_j + sum_e beta_e int_e phi_i phi_j,
    b_i = sum_T int_T f phi_i with f interpolated P1 (exact integration).
    """
    if f.mesh is not mesh:
        raise MeshError("source field lives on a different mesh")
    if len(beta.values) != len(mesh.boundary):
        raise MeshError("boundary field length does not match boundary edge count")

    grads, areas = _triangle_gradients(mesh)
    T = len(mesh.triangles)

    local = np.einsum("tid,tjd->tij", grads, grads) * areas[:, None, None]
    rows = np.repeat(mesh.triangles, 3, axis=1).reshape(T, 3, 3)
    cols = np.tile(mesh.triangles[:, None, :], (1, 3, 1))

    lens = mesh.boundary_lengths
    edge_local = (beta.values * lens)[:, None, None] * \
        (np.array([[2.0, 1.0], [1.0, 2.0]]) / 6.0)[None, :, :]
    erows = np.repeat(mesh.boundary, 2, axis=1).reshape(-1, 2, 2)
    ecols = np.tile(mesh.boundary[:, None, :], (1, 2, 1))

    n = mesh.num_vertices
    A = sparse.coo_matrix(
        (np.concatenate([local.ravel(), edge_local.ravel()]),
         (np.concatenate([rows.ravel(), erows.ravel()]),
          np.concatenate([cols.ravel(), ecols.ravel()]))),
        shape=(n, n)).tocsr()
    A.sum_duplicates()

    fv = f.values[mesh.triangles]
    load_local = areas[:, None] / 12.0 * (fv + 3.0 * fv.mean(axis=1, keepdims=True))
    b = np.zeros(n)
    np.add.at(b, mesh.triangles.ravel(), load_local.ravel())
    return LinearSystem(matrix=A, rhs=b)


def residual_check(sys: LinearSystem, u: ScalarField | np.ndarray) -> float:
    """Relative algebraic residual ||A u - b|| / ||b||."""
    x = u.values if isinstance(u, ScalarField) else np.asarray(u, dtype=float)
    return float(np.linalg.norm(sys.matrix @ x - sys.rhs)
                 / np.linalg.norm(sys.rhs))


def solve_system(mesh: Mesh, sys: LinearSystem, rtol: float = 1e-10) -> np.ndarray:
    """Diagonally preconditioned CG with iteration cap 50 sqrt(n)."""
    A, b = sys.matrix, sys.rhs
    n = len(b)
    diag = A.diagonal()
    if np.any(diag <= 0.0):
        raise SolverError("system matrix is not positive definite (zero diagonal)")
    M = LinearOperator((n, n), matvec=lambda x: x / diag)
    maxiter = int(50 * math.sqrt(n)) + 10
    x = None
    # scipy's stopping test can sit just above the target after rounding;
    # restart from the current iterate until the true residual complies
    for _ in range(4):
        x, info = cg(A, b, x0=x, M=M, rtol=rtol, atol=0.0, maxiter=maxiter)
        if info != 0:
            raise SolverError(
                f"conjugate gradients did not converge in {maxiter} iterations")
        if residual_check(sys, x) <= rtol * 1.001:
            return x
    raise SolverError("converged solution fails the residual postcondition")


# honor the worker cap from the environment; assembly is vectorized and runs
# on a single worker regardless, which conforms to the cap
def _worker_cap() -> int:
    try:
        return max(1, int(os.environ.get("SYMCOMP_THREADS", "1")))
    except ValueError:
        return 1


def solve_poisson_robin(mesh: Mesh, f: ScalarField, beta: BoundaryField) -> ScalarField:
    """Solve the Robin Poisson problem; requires f >= 0 and not identically 0.

    Postconditions (checked): relative residual <= 1e-10, strictly positive
    nodal values, minimum attained at a boundary vertex.  Violations of the
    two positivity checks raise a PositivityWarning (P1 on an obtuse
    triangulation has no discrete maximum principle), not an error.
    """
    if np.any(f.values < 0.0):
        raise SolverError("source f must be nonnegative")
    if not np.any(f.values > 0.0):
        raise SolverError("source f must not be identically zero")
    _worker_cap()
    sys = assemble(mesh, f, beta)
    u = solve_system(mesh, sys)
    if np.min(u) <= 0.0:
        warnings.warn("solution is not strictly positive at all vertices",
                      PositivityWarning)
    interior = np.setdiff1d(np.arange(mesh.num_vertices), mesh.boundary_vertices)
    if interior.size and np.min(u[interior]) < np.min(u[mesh.boundary_vertices]):
        warnings.warn("solution minimum is attained at an interior vertex",
                      PositivityWarning)
    return ScalarField(mesh, u)


def _abs_integral(mesh: Mesh, vals: np.ndarray) -> float:
    """Exact integral of |u| for P1 u: per-triangle split at the zero level."""
    v = np.sort(vals[mesh.triangles], axis=1)
    A = mesh.triangle_areas
    mean = v.mean(axis=1)
    total = np.zeros(len(A))

    all_pos = v[:, 0] >= 0.0
    all_neg = v[:, 2] <= 0.0
    total[all_pos] = (A * mean)[all_pos]
    total[all_neg] = (-A * mean)[all_neg]

    mixed = ~(all_pos | all_neg)
    if np.any(mixed):
        v1, v2, v3 = v[mixed, 0], v[mixed, 1], v[mixed, 2]
        Am = A[mixed]
        # integral of (u - t)_+ at t = 0, exact for the linear interpolant
        with np.errstate(divide="ignore", invalid="ignore"):
            upper = np.where(
                v2 <= 0.0,
                Am * v3 ** 3 / (3.0 * (v3 - v1) * (v3 - v2)),
                Am * (v1 + v2 + v3) / 3.0
                + Am * (-v1) ** 3 / (3.0 * (v2 - v1) * (v3 - v1)),
            )
        total[mixed] = 2.0 * upper - Am * mean[mixed]
    return float(np.sum(total))


def field_stats(u: ScalarField) -> FieldStats:
    """Min/max, boundary minimum, exact L1 and L2 norms of a P1 field."""
    mesh, vals = u.mesh, u.values
    v = vals[mesh.triangles]
    A = mesh.triangle_areas
    l2sq = np.sum(A / 6.0 * (np.sum(v ** 2, axis=1)
                             + 0.5 * (np.sum(v, axis=1) ** 2 - np.sum(v ** 2, axis=1))))
    return FieldStats(
        min=float(np.min(vals)),
        max=float(np.max(vals)),
        boundary_min=float(np.min(vals[mesh.boundary_vertices])),
        L1=_abs_integral(mesh, vals),
        L2=float(math.sqrt(l2sq)),
        area=mesh.area,
    )


def integrate_product(f: ScalarField, g: ScalarField) -> float:
    """Exact integral of the product of two P1 fields on the same mesh."""
    if f.mesh is not g.mesh:
        raise MeshError("fields live on different meshes")
    mesh = f.mesh
    fv = f.values[mesh.triangles]
    gv = g.values[mesh.triangles]
    A = mesh.triangle_areas
    return float(np.sum(A / 12.0 * (np.sum(fv, axis=1) * np.sum(gv, axis=1)
                                    + np.sum(fv * gv, axis=1))))
