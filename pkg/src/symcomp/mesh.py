"""Triangulations of bounded domains on the plane, flat cones and the sphere.

Domains are described by an exact :class:`DomainSpec` (circle, ellipse,
polygon, spherical cap, geodesic polygon, annular sector, cone disk).  Meshing
happens in a flat chart: the boundary is resampled at spacing ``h`` from the
exact spec, the interior is filled with a hexagonal lattice, triangulated with
Delaunay and relaxed by a few Laplacian smoothing sweeps.  Spherical domains
are meshed in a polar/gnomonic chart and the vertices are then mapped exactly
onto the sphere; the triangles stay chordal (flat).

Meshes are immutable after construction.  The oriented boundary chain is
stored as directed vertex pairs (domain on the left, outward normal well
defined) together with the exact boundary parameter of each chain vertex, so
refinement can reproject new boundary vertices onto the exact spec.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import cached_property

import numpy as np
import shapely
from scipy.spatial import Delaunay

from .geometry import GeometryError, Manifold, ball_area, myers_radius

APEX_EXCLUSION_FRACTION = 0.05  # of the domain diameter, cone meshes only


class MeshError(ValueError):
    """Invalid domain spec, meshing failure, or malformed mesh file."""


# ---------------------------------------------------------------------------
# domain specifications
# ---------------------------------------------------------------------------

class DomainSpec:
    """Exact description of a bounded domain in a flat chart.

    Subclasses provide a closed counterclockwise boundary curve parametrized
    by t in [0, 1) (``boundary_point``), a parameter ladder at target spacing
    h (``boundary_params``), the analytic area when known, and the chart to
    world map (identity except for spherical domains).
    """

    #: manifold kinds this spec is valid on
    kinds = ("plane",)

    def boundary_point(self, t):
        raise NotImplementedError

    def boundary_params(self, h: float) -> np.ndarray:
        raise NotImplementedError

    @property
    def area(self) -> float | None:
        """Analytic domain area (world measure), or None if not available."""
        return None

    @property
    def diameter(self) -> float:
        pts = self.boundary_point(np.linspace(0.0, 1.0, 256, endpoint=False))
        return float(np.hypot(*(pts.max(axis=0) - pts.min(axis=0))) * 1.0) or 1.0

    def chart_to_world(self, pts: np.ndarray) -> np.ndarray:
        return pts

    def validate(self, m: Manifold) -> None:
        if m.kind not in self.kinds:
            raise MeshError(
                f"{type(self).__name__} is not valid on a {m.kind} manifold")


def _uniform_count(length: float, h: float, minimum: int = 8) -> int:
    return max(minimum, int(round(length / h)))


@dataclass(frozen=True)
class Disk(DomainSpec):
    radius: float = 1.0
    center: tuple[float, float] = (0.0, 0.0)
    kinds = ("plane", "cone")

    def __post_init__(self):
        if self.radius <= 0.0:
            raise MeshError("disk radius must be positive")

    def boundary_point(self, t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        ang = 2.0 * math.pi * t
        return np.column_stack([
            self.center[0] + self.radius * np.cos(ang),
            self.center[1] + self.radius * np.sin(ang),
        ])

    def boundary_params(self, h):
        n = _uniform_count(2.0 * math.pi * self.radius, h)
        return np.arange(n) / n

    @property
    def area(self):
        return math.pi * self.radius ** 2

    @property
    def diameter(self):
        return 2.0 * self.radius


@dataclass(frozen=True)
class Ellipse(DomainSpec):
    a: float
    b: float
    kinds = ("plane",)

    def __post_init__(self):
        if self.a <= 0.0 or self.b <= 0.0:
            raise MeshError("ellipse semi-axes must be positive")

    @cached_property
    def _arclength_table(self):
        # dense angle -> cumulative arclength, for arclength parametrization
        ang = np.linspace(0.0, 2.0 * math.pi, 8193)
        x = self.a * np.cos(ang)
        y = self.b * np.sin(ang)
        seg = np.hypot(np.diff(x), np.diff(y))
        cum = np.concatenate([[0.0], np.cumsum(seg)])
        return ang, cum

    def boundary_point(self, t):
        t = np.atleast_1d(np.asarray(t, dtype=float)) % 1.0
        ang_tab, cum = self._arclength_table
        ang = np.interp(t * cum[-1], cum, ang_tab)
        return np.column_stack([self.a * np.cos(ang), self.b * np.sin(ang)])

    def boundary_params(self, h):
        n = _uniform_count(self._arclength_table[1][-1], h)
        return np.arange(n) / n

    @property
    def area(self):
        return math.pi * self.a * self.b

    @property
    def diameter(self):
        return 2.0 * max(self.a, self.b)


@dataclass(frozen=True)
class Polygon(DomainSpec):
    vertices: tuple[tuple[float, float], ...]
    kinds = ("plane", "cone")

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[0] < 3 or v.shape[1] != 2:
            raise MeshError("polygon needs at least 3 planar vertices")
        if _shoelace(v) <= 0.0:
            raise MeshError("polygon vertices must be counterclockwise")

    @cached_property
    def _verts(self):
        return np.asarray(self.vertices, dtype=float)

    @cached_property
    def _cum(self):
        v = self._verts
        seg = np.hypot(*(np.roll(v, -1, axis=0) - v).T)
        return np.concatenate([[0.0], np.cumsum(seg)])

    def boundary_point(self, t):
        t = np.atleast_1d(np.asarray(t, dtype=float)) % 1.0
        cum = self._cum
        s = t * cum[-1]
        idx = np.clip(np.searchsorted(cum, s, side="right") - 1, 0, len(self._verts) - 1)
        v0 = self._verts[idx]
        v1 = self._verts[(idx + 1) % len(self._verts)]
        seg = cum[idx + 1] - cum[idx]
        frac = np.where(seg > 0, (s - cum[idx]) / np.where(seg > 0, seg, 1.0), 0.0)
        return v0 + frac[:, None] * (v1 - v0)

    def boundary_params(self, h):
        cum = self._cum
        params = []
        for k in range(len(self._verts)):
            n = max(1, int(round((cum[k + 1] - cum[k]) / h)))
            params.append((cum[k] + (cum[k + 1] - cum[k]) * np.arange(n) / n) / cum[-1])
        return np.concatenate(params)

    @property
    def area(self):
        return _shoelace(self._verts)

    @property
    def diameter(self):
        v = self._verts
        return float(np.max(np.hypot(*(v[:, None, :] - v[None, :, :]).T)))


@dataclass(frozen=True)
class AnnularSector(DomainSpec):
    """Sector of an annulus: radii (r_in, r_out), opening angle, start angle."""

    r_in: float
    r_out: float
    angle: float
    start_angle: float = 0.0
    kinds = ("plane", "cone")

    def __post_init__(self):
        if not 0.0 < self.r_in < self.r_out:
            raise MeshError("annular sector requires 0 < r_in < r_out")
        if not 0.0 < self.angle < 2.0 * math.pi:
            raise MeshError("annular sector angle must lie in (0, 2*pi)")

    @cached_property
    def _arc_lengths(self):
        outer = self.r_out * self.angle
        inner = self.r_in * self.angle
        radial = self.r_out - self.r_in
        cum = np.concatenate([[0.0], np.cumsum([outer, radial, inner, radial])])
        return cum

    def boundary_point(self, t):
        t = np.atleast_1d(np.asarray(t, dtype=float)) % 1.0
        cum = self._arc_lengths
        s = t * cum[-1]
        pts = np.empty((len(s), 2))
        a0, da = self.start_angle, self.angle
        for i, si in enumerate(s):
            if si <= cum[1]:  # outer arc, CCW
                ang = a0 + da * si / (cum[1] - cum[0])
                r = self.r_out
            elif si <= cum[2]:  # radial edge inward at end angle
                frac = (si - cum[1]) / (cum[2] - cum[1])
                ang = a0 + da
                r = self.r_out + frac * (self.r_in - self.r_out)
            elif si <= cum[3]:  # inner arc, CW
                frac = (si - cum[2]) / (cum[3] - cum[2])
                ang = a0 + da * (1.0 - frac)
                r = self.r_in
            else:  # radial edge outward at start angle
                frac = (si - cum[3]) / (cum[4] - cum[3])
                ang = a0
                r = self.r_in + frac * (self.r_out - self.r_in)
            pts[i] = (r * math.cos(ang), r * math.sin(ang))
        return pts

    def boundary_params(self, h):
        cum = self._arc_lengths
        params = []
        for k in range(4):
            n = max(2, int(round((cum[k + 1] - cum[k]) / h)))
            params.append((cum[k] + (cum[k + 1] - cum[k]) * np.arange(n) / n) / cum[-1])
        return np.concatenate(params)

    @property
    def area(self):
        return 0.5 * self.angle * (self.r_out ** 2 - self.r_in ** 2)

    @property
    def diameter(self):
        return 2.0 * self.r_out


@dataclass(frozen=True)
class ConeDisk(DomainSpec):
    """Disk in the unrolled chart of a flat cone, centered on the sector
    bisector at ``center_distance`` from the apex; must clear the apex and
    the seam."""

    center_distance: float
    radius: float
    kinds = ("cone",)

    def __post_init__(self):
        if self.radius <= 0.0 or self.center_distance <= self.radius:
            raise MeshError("cone disk must exclude the apex")

    def _disk(self, fraction: float) -> Disk:
        half = math.pi * fraction
        cx = self.center_distance * math.cos(half)
        cy = self.center_distance * math.sin(half)
        return Disk(radius=self.radius, center=(cx, cy))

    def boundary_point(self, t):  # bisector placement fixed at fraction-independent call time
        raise MeshError("ConeDisk must be resolved against a cone manifold first")

    def resolve(self, m: Manifold) -> Disk:
        if m.kind != "cone":
            raise MeshError("ConeDisk requires a cone manifold")
        half_angle = math.pi * m.cone_angle_fraction
        if self.center_distance * math.sin(min(half_angle, 0.5 * math.pi)) <= self.radius:
            raise MeshError("cone disk crosses the seam of the unrolled chart")
        if self.center_distance - self.radius < \
                APEX_EXCLUSION_FRACTION * 2.0 * self.radius:
            raise MeshError("cone disk comes too close to the apex")
        return self._disk(m.cone_angle_fraction)


@dataclass(frozen=True)
class SphericalCap(DomainSpec):
    """Geodesic ball of radius r0 about the pole of the sphere of curvature
    kappa, meshed in the geodesic polar chart."""

    r0: float
    kappa: float = 1.0
    kinds = ("sphere",)

    def __post_init__(self):
        if self.kappa <= 0.0:
            raise MeshError("spherical cap requires kappa > 0")
        if not 0.0 < self.r0 < myers_radius(self.kappa):
            raise MeshError("cap radius must lie in (0, pi/sqrt(kappa))")

    def boundary_point(self, t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        ang = 2.0 * math.pi * t
        return np.column_stack([self.r0 * np.cos(ang), self.r0 * np.sin(ang)])

    def boundary_params(self, h):
        # spacing measured in the polar chart, consistent with the interior
        # lattice; the sphere map only shortens edges
        n = _uniform_count(2.0 * math.pi * self.r0, h)
        return np.arange(n) / n

    @property
    def area(self):
        return ball_area(self.kappa, 2, self.r0)

    @property
    def diameter(self):
        return 2.0 * self.r0

    def chart_to_world(self, pts: np.ndarray) -> np.ndarray:
        sk = math.sqrt(self.kappa)
        r = np.hypot(pts[:, 0], pts[:, 1])
        with np.errstate(invalid="ignore"):
            direc = np.where(r[:, None] > 0, pts / np.where(r[:, None] > 0, r[:, None], 1.0), 0.0)
        s = np.sin(sk * r) / sk
        z = np.cos(sk * r) / sk
        return np.column_stack([s * direc[:, 0], s * direc[:, 1], z])


@dataclass(frozen=True)
class GeodesicPolygon(DomainSpec):
    """Spherical polygon with geodesic edges, given by unit-direction vertices
    (counterclockwise seen from outside); meshed in a gnomonic chart centered
    at the mean direction, where geodesics are straight lines."""

    directions: tuple[tuple[float, float, float], ...]
    kappa: float = 1.0
    kinds = ("sphere",)

    def __post_init__(self):
        d = np.asarray(self.directions, dtype=float)
        if d.ndim != 2 or d.shape[0] < 3 or d.shape[1] != 3:
            raise MeshError("geodesic polygon needs at least 3 direction vectors")
        if self.kappa <= 0.0:
            raise MeshError("geodesic polygon requires kappa > 0")

    @cached_property
    def _frame(self):
        d = np.asarray(self.directions, dtype=float)
        d = d / np.linalg.norm(d, axis=1, keepdims=True)
        c = d.mean(axis=0)
        nc = np.linalg.norm(c)
        if nc < 1e-12:
            raise MeshError("geodesic polygon is not contained in a hemisphere")
        c = c / nc
        if np.any(d @ c <= 1e-6):
            raise MeshError("geodesic polygon must be strictly inside a hemisphere")
        e1 = np.cross(c, [0.0, 0.0, 1.0])
        if np.linalg.norm(e1) < 1e-8:
            e1 = np.cross(c, [0.0, 1.0, 0.0])
        e1 = e1 / np.linalg.norm(e1)
        e2 = np.cross(c, e1)
        return c, e1, e2, d

    @cached_property
    def _chart_polygon(self) -> Polygon:
        c, e1, e2, d = self._frame
        w = d @ c
        chart = np.column_stack([(d @ e1) / w, (d @ e2) / w]) / math.sqrt(self.kappa)
        if _shoelace(chart) < 0.0:
            chart = chart[::-1]
        return Polygon(tuple(map(tuple, chart)))

    def boundary_point(self, t):
        return self._chart_polygon.boundary_point(t)

    def boundary_params(self, h):
        return self._chart_polygon.boundary_params(h)

    def chart_to_world(self, pts: np.ndarray) -> np.ndarray:
        c, e1, e2, _ = self._frame
        sk = math.sqrt(self.kappa)
        v = (c[None, :] + sk * (pts[:, :1] * e1[None, :] + pts[:, 1:2] * e2[None, :]))
        v = v / np.linalg.norm(v, axis=1, keepdims=True)
        return v / sk

    @property
    def area(self):
        # spherical excess of the geodesic polygon, scaled by 1/kappa
        _, _, _, d = self._frame
        k = len(d)
        excess = -(k - 2) * math.pi
        for i in range(k):
            a, b, cc = d[i - 1], d[i], d[(i + 1) % k]
            t1 = a - b * (a @ b)
            t2 = cc - b * (cc @ b)
            ang = math.atan2(np.linalg.norm(np.cross(t1, t2)), float(t1 @ t2))
            excess += ang
        return excess / self.kappa


def _shoelace(v: np.ndarray) -> float:
    x, y = v[:, 0], v[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


# ---------------------------------------------------------------------------
# mesh container
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Mesh:
    """Immutable triangulation with an oriented boundary chain.

    ``vertices`` are 2-D chart coordinates for plane/cone meshes and 3-D
    points on the sphere of radius 1/sqrt(kappa) for sphere meshes.
    ``boundary`` holds directed edges (i, j) ordered into a closed
    counterclockwise loop; ``boundary_params`` gives the exact boundary
    parameter of vertex ``boundary[k, 0]`` when the generating spec is known.
    """

    manifold: Manifold
    vertices: np.ndarray
    triangles: np.ndarray
    boundary: np.ndarray
    h: float
    spec: DomainSpec | None = None
    boundary_params: np.ndarray | None = None

    @property
    def num_vertices(self) -> int:
        return len(self.vertices)

    @cached_property
    def triangle_corners(self) -> np.ndarray:
        return self.vertices[self.triangles]

    @cached_property
    def triangle_areas(self) -> np.ndarray:
        p = self.triangle_corners
        e1 = p[:, 1] - p[:, 0]
        e2 = p[:, 2] - p[:, 0]
        if self.vertices.shape[1] == 2:
            return 0.5 * (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])
        return 0.5 * np.linalg.norm(np.cross(e1, e2), axis=1)

    @cached_property
    def area(self) -> float:
        return float(np.sum(self.triangle_areas))

    @cached_property
    def boundary_lengths(self) -> np.ndarray:
        d = self.vertices[self.boundary[:, 1]] - self.vertices[self.boundary[:, 0]]
        return np.linalg.norm(d, axis=1)

    @cached_property
    def perimeter(self) -> float:
        return float(np.sum(self.boundary_lengths))

    @cached_property
    def boundary_vertices(self) -> np.ndarray:
        return np.unique(self.boundary)

    @cached_property
    def edge_lengths(self) -> np.ndarray:
        p = self.triangle_corners
        return np.concatenate([
            np.linalg.norm(p[:, 1] - p[:, 0], axis=1),
            np.linalg.norm(p[:, 2] - p[:, 1], axis=1),
            np.linalg.norm(p[:, 0] - p[:, 2], axis=1),
        ])

    @cached_property
    def min_angle_deg(self) -> float:
        p = self.triangle_corners
        ang = []
        for i in range(3):
            a = p[:, (i + 1) % 3] - p[:, i]
            b = p[:, (i + 2) % 3] - p[:, i]
            cosv = np.sum(a * b, axis=1) / (
                np.linalg.norm(a, axis=1) * np.linalg.norm(b, axis=1))
            ang.append(np.degrees(np.arccos(np.clip(cosv, -1.0, 1.0))))
        return float(np.min(ang))

    def edge_param_midpoints(self) -> np.ndarray:
        """Boundary parameter of each boundary-edge midpoint (for sampling
        coefficient fields); requires stored boundary parameters."""
        if self.boundary_params is None:
            raise MeshError("mesh carries no boundary parametrization")
        p0 = self.boundary_params
        p1 = np.roll(self.boundary_params, -1)
        return (p0 + ((p1 - p0) % 1.0) / 2.0) % 1.0

    def validate(self) -> None:
        """Structural invariants: positive areas, edge incidence counts, one
        closed consistently oriented boundary loop."""
        if np.any(self.triangle_areas <= 0.0):
            raise MeshError("mesh contains a degenerate or inverted triangle")
        edges = np.sort(np.concatenate([
            self.triangles[:, [0, 1]],
            self.triangles[:, [1, 2]],
            self.triangles[:, [2, 0]],
        ]), axis=1)
        uniq, counts = np.unique(edges, axis=0, return_counts=True)
        if np.any(counts > 2):
            raise MeshError("an edge belongs to more than two triangles")
        bnd = uniq[counts == 1]
        chain = np.sort(self.boundary, axis=1)
        if len(bnd) != len(chain) or not np.array_equal(
                np.unique(chain, axis=0), bnd):
            raise MeshError("boundary chain does not match single-triangle edges")
        if not np.array_equal(self.boundary[:, 1],
                              np.roll(self.boundary[:, 0], -1)):
            raise MeshError("boundary not closed")
        if self.manifold.kind == "cone":
            dist = np.linalg.norm(self.vertices, axis=1)
            diam = self.spec_diameter()
            if np.min(dist) < APEX_EXCLUSION_FRACTION * diam:
                raise MeshError("cone mesh has a vertex too close to the apex")

    def spec_diameter(self) -> float:
        if self.spec is not None:
            return self.spec.diameter
        lo = self.vertices.min(axis=0)
        hi = self.vertices.max(axis=0)
        return float(np.linalg.norm(hi - lo))


@dataclass(frozen=True)
class BoundaryField:
    """One strictly positive Robin coefficient per boundary edge."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or len(v) == 0:
            raise MeshError("boundary field must be a nonempty 1-D array")
        if np.any(v <= 0.0):
            raise MeshError("Robin coefficients must be strictly positive")
        object.__setattr__(self, "values", v)

    @classmethod
    def constant(cls, mesh: Mesh, value: float) -> "BoundaryField":
        return cls(np.full(len(mesh.boundary), float(value)))

    @classmethod
    def from_arcs(cls, mesh: Mesh, arcs) -> "BoundaryField":
        """Piecewise-constant in boundary parameter: ``arcs`` is a sequence of
        (start, end, value) with parameters in [0, 1]; the value of an edge is
        that of the arc containing its midpoint parameter."""
        mids = mesh.edge_param_midpoints()
        vals = np.full(len(mids), np.nan)
        for start, end, value in arcs:
            if end >= start:
                sel = (mids >= start) & (mids < end)
            else:  # arc wrapping through parameter 0
                sel = (mids >= start) | (mids < end)
            vals[sel] = value
        if np.any(np.isnan(vals)):
            raise MeshError("beta arcs do not cover the whole boundary")
        return cls(vals)


# ---------------------------------------------------------------------------
# mesh generation
# ---------------------------------------------------------------------------

def build_mesh(spec: DomainSpec, m: Manifold, h: float,
               smoothing_sweeps: int = 4) -> Mesh:
    """Triangulate the domain at target edge length h.

    Postconditions: max edge length <= 1.5 h, min triangle angle >= 20 deg,
    mesh area within 2 h^2 relative of the analytic area where known.
    The lattice-to-boundary gap depth is retried over a few values because
    quality near the boundary depends on how the lattice happens to land.
    """
    if h <= 0.0:
        raise MeshError("target edge length must be positive")
    if isinstance(spec, ConeDisk):
        spec = ConeDiskResolved(spec.resolve(m), m)
    spec.validate(m)

    fan = _fan_chart(spec)
    if fan is not None:
        return _fan_mesh(spec, m, h, *fan)

    params = np.sort(spec.boundary_params(h) % 1.0)
    bpts = spec.boundary_point(params)
    if _shoelace(bpts) < 0.0:
        raise MeshError("boundary parametrization must be counterclockwise")

    dense = spec.boundary_point(np.sort(np.concatenate(
        [params, params + np.diff(np.concatenate([params, [params[0] + 1.0]])) / 2.0]) % 1.0))
    polygon = shapely.Polygon(dense)
    failures = []
    for gap, shift in ((0.6, (0.0, 0.0)), (0.7, (0.0, 0.0)), (0.6, (0.5, 0.25)),
                       (0.7, (0.5, 0.25)), (0.8, (0.25, 0.5)), (0.5, (0.0, 0.0))):
        lattice = _hex_lattice(bpts, h, shift)
        inner = polygon.buffer(-gap * h)
        keep = shapely.contains_xy(inner, lattice[:, 0], lattice[:, 1])
        pts = np.vstack([bpts, lattice[keep]])
        n_b = len(bpts)
        tris = _delaunay_inside(pts, polygon)
        for _ in range(smoothing_sweeps):
            pts = _laplacian_smooth(pts, tris, n_b)
            tris = _delaunay_inside(pts, polygon)

        # repair isolated stretched edges by inserting their midpoints
        for _ in range(3):
            edges = np.vstack([tris[:, [0, 1]], tris[:, [1, 2]], tris[:, [2, 0]]])
            lens_e = np.linalg.norm(pts[edges[:, 0]] - pts[edges[:, 1]], axis=1)
            long_e = np.unique(np.sort(edges[lens_e > 1.45 * h], axis=1), axis=0)
            if len(long_e) == 0:
                break
            mids = 0.5 * (pts[long_e[:, 0]] + pts[long_e[:, 1]])
            pts = np.vstack([pts, mids])
            tris = _delaunay_inside(pts, polygon)
            for _ in range(2):
                pts = _laplacian_smooth(pts, tris, n_b)
                tris = _delaunay_inside(pts, polygon)

        tris = _orient_ccw(pts, tris)
        chain = _boundary_chain(tris, n_b)

        chain_params = params[chain[:, 0]]
        vertices = spec.chart_to_world(pts)
        mesh = Mesh(manifold=m, vertices=vertices, triangles=tris, boundary=chain,
                    h=h, spec=spec, boundary_params=chain_params)
        mesh.validate()
        min_angle = mesh.min_angle_deg
        max_edge = float(np.max(mesh.edge_lengths)) / (h * _chart_stretch(spec))
        if min_angle >= 20.0 and max_edge <= 1.5:
            return mesh
        failures.append(f"gap {gap} shift {shift}: min angle {min_angle:.2f} deg, "
                        f"max edge {max_edge:.3f} h")
    raise MeshError("mesh quality failure: " + "; ".join(failures))


class ConeDiskResolved(Disk):
    """Disk placed on the cone-chart bisector, produced by ConeDisk.resolve."""

    kinds = ("cone",)

    def __init__(self, disk: Disk, m: Manifold):
        object.__setattr__(self, "radius", disk.radius)
        object.__setattr__(self, "center", disk.center)


def _fan_chart(spec: DomainSpec):
    """(center, radius) of the chart disk for specs meshed as structured
    fans, else None.  Fans (concentric rings of 6j points) give cleaner
    nodal convergence on radial domains than a smoothed lattice."""
    if isinstance(spec, Disk):
        return np.asarray(spec.center, dtype=float), spec.radius
    if isinstance(spec, SphericalCap):
        return np.zeros(2), spec.r0
    return None


def _fan_mesh(spec: DomainSpec, m: Manifold, h: float,
              center: np.ndarray, R: float) -> Mesh:
    N = max(2, int(round(R / h)))
    nb = 6 * N
    params = np.arange(nb) / nb
    bpts = spec.boundary_point(params)
    pts = [bpts]
    for j in range(N - 1, 0, -1):
        mj = 6 * j
        ang = 2.0 * math.pi * np.arange(mj) / mj
        r = R * j / N
        pts.append(np.column_stack([center[0] + r * np.cos(ang),
                                    center[1] + r * np.sin(ang)]))
    pts.append(center[None, :])
    pts = np.vstack(pts)
    tris = Delaunay(pts).simplices
    tris = _orient_ccw(pts, tris)
    chain = _boundary_chain(tris, nb)
    mesh = Mesh(manifold=m, vertices=spec.chart_to_world(pts), triangles=tris,
                boundary=chain, h=h, spec=spec,
                boundary_params=params[chain[:, 0]])
    mesh.validate()
    if mesh.min_angle_deg < 20.0:
        raise MeshError(
            f"mesh quality failure: min angle {mesh.min_angle_deg:.2f} deg")
    if np.max(mesh.edge_lengths) > 1.5 * h * _chart_stretch(spec):
        raise MeshError("mesh quality failure: edge longer than 1.5 h")
    return mesh


def _chart_stretch(spec: DomainSpec) -> float:
    # chart edge lengths differ from world edge lengths only through the
    # sphere map, which is length nonincreasing; allow exact chart bound
    return 1.0


def _hex_lattice(bpts: np.ndarray, h: float,
                 shift: tuple[float, float] = (0.0, 0.0)) -> np.ndarray:
    lo = bpts.min(axis=0) - h + h * np.asarray(shift)
    hi = bpts.max(axis=0) + h
    dy = h * math.sqrt(3.0) / 2.0
    rows = int(math.ceil((hi[1] - lo[1]) / dy)) + 1
    cols = int(math.ceil((hi[0] - lo[0]) / h)) + 2
    ys = lo[1] + dy * np.arange(rows)
    pts = []
    for j, y in enumerate(ys):
        off = 0.5 * h if j % 2 else 0.0
        xs = lo[0] + off + h * np.arange(cols)
        pts.append(np.column_stack([xs, np.full_like(xs, y)]))
    return np.vstack(pts)


def _delaunay_inside(pts: np.ndarray, polygon) -> np.ndarray:
    tri = Delaunay(pts)
    simplices = tri.simplices
    cent = pts[simplices].mean(axis=1)
    inside = shapely.contains_xy(polygon, cent[:, 0], cent[:, 1])
    p = pts[simplices]
    area2 = (p[:, 1, 0] - p[:, 0, 0]) * (p[:, 2, 1] - p[:, 0, 1]) \
        - (p[:, 1, 1] - p[:, 0, 1]) * (p[:, 2, 0] - p[:, 0, 0])
    good = np.abs(area2) > 1e-14 * float(polygon.area)
    return simplices[inside & good]


def _laplacian_smooth(pts: np.ndarray, tris: np.ndarray, n_fixed: int) -> np.ndarray:
    nbr_sum = np.zeros_like(pts)
    nbr_cnt = np.zeros(len(pts))
    for a, b in ((0, 1), (1, 2), (2, 0)):
        i, j = tris[:, a], tris[:, b]
        np.add.at(nbr_sum, i, pts[j])
        np.add.at(nbr_sum, j, pts[i])
        np.add.at(nbr_cnt, i, 1.0)
        np.add.at(nbr_cnt, j, 1.0)
    out = pts.copy()
    movable = (np.arange(len(pts)) >= n_fixed) & (nbr_cnt > 0)
    out[movable] = nbr_sum[movable] / nbr_cnt[movable, None]
    return out


def _orient_ccw(pts: np.ndarray, tris: np.ndarray) -> np.ndarray:
    p = pts[tris]
    area2 = (p[:, 1, 0] - p[:, 0, 0]) * (p[:, 2, 1] - p[:, 0, 1]) \
        - (p[:, 1, 1] - p[:, 0, 1]) * (p[:, 2, 0] - p[:, 0, 0])
    tris = tris.copy()
    flip = area2 < 0.0
    tris[flip] = tris[flip][:, [0, 2, 1]]
    return tris


def _boundary_chain(tris: np.ndarray, n_b: int) -> np.ndarray:
    """Directed boundary edges in triangle (CCW) traversal order, chained
    into one closed loop; the domain lies on the left of each edge."""
    directed = np.concatenate([
        tris[:, [0, 1]], tris[:, [1, 2]], tris[:, [2, 0]],
    ])
    und = np.sort(directed, axis=1)
    uniq, inv, counts = np.unique(und, axis=0, return_inverse=True,
                                  return_counts=True)
    bnd_directed = directed[counts[inv] == 1]
    if len(bnd_directed) == 0:
        raise MeshError("triangulation has no boundary")
    succ = {int(i): int(j) for i, j in bnd_directed}
    if len(succ) != len(bnd_directed):
        raise MeshError("boundary is not a simple chain")
    start = int(bnd_directed[:, 0].min())
    chain = [start]
    cur = start
    for _ in range(len(bnd_directed)):
        cur = succ[cur]
        if cur == start:
            break
        chain.append(cur)
    if len(chain) != len(bnd_directed):
        raise MeshError("boundary edges form more than one loop")
    if max(chain) >= n_b:
        raise MeshError("an interior lattice point ended up on the boundary")
    chain = np.asarray(chain)
    return np.column_stack([chain, np.roll(chain, -1)])


# ---------------------------------------------------------------------------
# refinement
# ---------------------------------------------------------------------------

def refine(mesh: Mesh) -> Mesh:
    """Split every triangle 1 -> 4 at edge midpoints.

    Boundary midpoints are reprojected onto the exact domain spec when
    available; sphere midpoints are reprojected onto the sphere.  Boundary
    edge count doubles, h halves.
    """
    tris = mesh.triangles
    edges = np.concatenate([tris[:, [0, 1]], tris[:, [1, 2]], tris[:, [2, 0]]])
    und = np.sort(edges, axis=1)
    uniq, inv = np.unique(und, axis=0, return_inverse=True)
    mid_idx = mesh.num_vertices + np.arange(len(uniq))
    midpoints = 0.5 * (mesh.vertices[uniq[:, 0]] + mesh.vertices[uniq[:, 1]])

    if mesh.manifold.kind == "sphere":
        radius = 1.0 / math.sqrt(mesh.manifold.kappa)
        midpoints *= radius / np.linalg.norm(midpoints, axis=1, keepdims=True)

    edge_key = {tuple(e): k for k, e in enumerate(map(tuple, uniq))}

    new_params = None
    if mesh.spec is not None and mesh.boundary_params is not None:
        p0 = mesh.boundary_params
        p1 = np.roll(p0, -1)
        pmid = (p0 + ((p1 - p0) % 1.0) / 2.0) % 1.0
        bpts = mesh.spec.chart_to_world(mesh.spec.boundary_point(pmid))
        for k in range(len(mesh.boundary)):
            e = tuple(sorted(mesh.boundary[k]))
            midpoints[edge_key[e]] = bpts[k]
        new_params = pmid

    vertices = np.vstack([mesh.vertices, midpoints])
    m_ab = mid_idx[inv[:len(tris)]]
    m_bc = mid_idx[inv[len(tris):2 * len(tris)]]
    m_ca = mid_idx[inv[2 * len(tris):]]
    a, b, c = tris[:, 0], tris[:, 1], tris[:, 2]
    new_tris = np.concatenate([
        np.column_stack([a, m_ab, m_ca]),
        np.column_stack([b, m_bc, m_ab]),
        np.column_stack([c, m_ca, m_bc]),
        np.column_stack([m_ab, m_bc, m_ca]),
    ])

    new_chain = []
    new_chain_params = [] if new_params is not None else None
    for k in range(len(mesh.boundary)):
        i, j = mesh.boundary[k]
        mid = mid_idx[edge_key[tuple(sorted((i, j)))]]
        new_chain.append((i, mid))
        new_chain.append((mid, j))
        if new_chain_params is not None:
            new_chain_params.append(mesh.boundary_params[k])
            new_chain_params.append(new_params[k])

    out = Mesh(
        manifold=mesh.manifold,
        vertices=vertices,
        triangles=new_tris,
        boundary=np.asarray(new_chain),
        h=mesh.h / 2.0,
        spec=mesh.spec,
        boundary_params=np.asarray(new_chain_params) if new_chain_params is not None else None,
    )
    out.validate()
    return out


def split_boundary_field(beta: BoundaryField) -> BoundaryField:
    """Boundary field matching one refinement level: each edge value is
    inherited by its two children (use the beta spec to re-sample instead
    when one is available)."""
    return BoundaryField(np.repeat(beta.values, 2))


# ---------------------------------------------------------------------------
# serialization (line-oriented text format)
# ---------------------------------------------------------------------------

FORMAT_HEADER = "symcomp-mesh v1"


def export_mesh(mesh: Mesh, beta: BoundaryField | None = None) -> str:
    """Serialize to the v1 text format; reals carry 17 significant digits."""
    if beta is None:
        beta = BoundaryField.constant(mesh, 1.0)
    if len(beta.values) != len(mesh.boundary):
        raise MeshError("boundary field length does not match boundary edge count")
    lines = [FORMAT_HEADER,
             f"manifold {mesh.manifold.kind} {mesh.manifold.kappa:.17g} "
             f"{mesh.manifold.cone_angle_fraction:.17g}",
             f"vertices {mesh.num_vertices}"]
    for v in mesh.vertices:
        lines.append(" ".join(f"{x:.17g}" for x in v))
    lines.append(f"triangles {len(mesh.triangles)}")
    for t in mesh.triangles:
        lines.append(f"{t[0]} {t[1]} {t[2]}")
    lines.append(f"boundary {len(mesh.boundary)}")
    for (i, j), b in zip(mesh.boundary, beta.values):
        lines.append(f"{i} {j} {b:.17g}")
    return "\n".join(lines) + "\n"


def import_mesh(text) -> tuple[Mesh, BoundaryField]:
    """Parse the v1 text format (string or readable file object); errors
    name the offending record."""
    if hasattr(text, "read"):
        text = text.read()
    lines = text.splitlines()
    if not lines or lines[0].strip() != FORMAT_HEADER:
        raise MeshError("missing or unknown header (expected 'symcomp-mesh v1')")
    pos = 1

    def take(expect: str):
        nonlocal pos
        if pos >= len(lines):
            raise MeshError(f"unexpected end of file, expected '{expect}' at line {pos + 1}")
        parts = lines[pos].split()
        pos += 1
        if not parts or parts[0] != expect:
            raise MeshError(f"line {pos}: expected '{expect}' record")
        return parts[1:]

    mkind, mkappa, mfrac = take("manifold")
    try:
        manifold = Manifold(kind=mkind, kappa=float(mkappa),
                            cone_angle_fraction=float(mfrac))
    except (GeometryError, ValueError) as exc:
        raise MeshError(f"line 2: invalid manifold record: {exc}") from exc

    (nv,) = take("vertices")
    nv = int(nv)
    verts = []
    for k in range(nv):
        try:
            verts.append([float(x) for x in lines[pos + k].split()])
        except (ValueError, IndexError) as exc:
            raise MeshError(f"line {pos + k + 1}: bad vertex record") from exc
    pos += nv
    vertices = np.asarray(verts, dtype=float)
    if vertices.ndim != 2 or vertices.shape[1] not in (2, 3):
        raise MeshError("vertex records must have 2 or 3 coordinates each")

    (nt,) = take("triangles")
    nt = int(nt)
    tris = []
    for k in range(nt):
        try:
            tris.append([int(x) for x in lines[pos + k].split()])
        except (ValueError, IndexError) as exc:
            raise MeshError(f"line {pos + k + 1}: bad triangle record") from exc
    pos += nt
    triangles = np.asarray(tris, dtype=int)
    if triangles.size and (triangles.min() < 0 or triangles.max() >= nv):
        bad = int(np.argmax(np.any((triangles < 0) | (triangles >= nv), axis=1)))
        raise MeshError(f"triangle record {bad}: dangling vertex index")

    (nb,) = take("boundary")
    nb = int(nb)
    chain, betas = [], []
    for k in range(nb):
        try:
            i, j, b = lines[pos + k].split()
            chain.append((int(i), int(j)))
            betas.append(float(b))
        except (ValueError, IndexError) as exc:
            raise MeshError(f"line {pos + k + 1}: bad boundary record") from exc
    boundary = np.asarray(chain, dtype=int)
    if boundary.size and (boundary.min() < 0 or boundary.max() >= nv):
        raise MeshError("boundary record: dangling vertex index")
    if not np.array_equal(boundary[:, 1], np.roll(boundary[:, 0], -1)):
        raise MeshError("boundary not closed")

    mesh = Mesh(manifold=manifold, vertices=vertices, triangles=triangles,
                boundary=boundary, h=float(np.median(
                    np.linalg.norm(vertices[boundary[:, 1]] - vertices[boundary[:, 0]], axis=1)))
                if nb else 0.0)
    mesh.validate()
    return mesh, BoundaryField(np.asarray(betas, dtype=float))
