"""Distribution functions, decreasing rearrangements and Schwarz
symmetrization of piecewise-linear fields.

For a P1 field the superlevel measure mu(t) is, per triangle, a piecewise
quadratic in t with breakpoints at the triangle's vertex values, and the
integral of u over {u > t} is piecewise cubic.  :class:`ExactDistribution`
assembles the global piecewise polynomials once (event scan over all vertex
values) and then answers mu(t), the generalized inverse u*(s), partial
integrals of u* and moments of u* essentially exactly, which keeps the
equimeasurability and Hardy-Littlewood identities at quadrature precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fem import ScalarField, integrate_product
from .geometry import GeometryError, Manifold, ball_area, inverse_ball_area
from .mesh import MeshError
from .radial import RadialProfile


class RearrangementError(ValueError):
    """Invalid input to a rearrangement operation."""


@dataclass(frozen=True)
class DistributionData:
    """Tabulated superlevel-set measures t -> mu(t)."""

    levels: np.ndarray
    measures: np.ndarray
    total_measure: float

    def __post_init__(self):
        lv = np.asarray(self.levels, dtype=float)
        mu = np.asarray(self.measures, dtype=float)
        if lv.ndim != 1 or len(lv) == 0:
            raise RearrangementError("empty level grid")
        if np.any(np.diff(lv) <= 0.0):
            raise RearrangementError("levels must be strictly increasing")
        if mu.shape != lv.shape:
            raise RearrangementError("measure count must match level count")
        tol = 1e-10 * max(self.total_measure, 1.0)
        if np.any(np.diff(mu) > tol):
            raise RearrangementError("measures must be nonincreasing")
        if np.any(mu < -tol) or np.any(mu > self.total_measure + tol):
            raise RearrangementError("measures must lie in [0, total]")
        object.__setattr__(self, "levels", lv)
        object.__setattr__(self, "measures", mu)


@dataclass(frozen=True)
class RearrangedProfile:
    """Decreasing rearrangement sampled on an s-grid in [0, |Omega|]."""

    s: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.s, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if s.ndim != 1 or s.shape != v.shape or len(s) < 2:
            raise RearrangementError("profile needs matching s and value arrays")
        if np.any(np.diff(s) < 0.0) or s[0] < 0.0:
            raise RearrangementError("s-grid must be nondecreasing and nonnegative")
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "values", v)

    @property
    def total(self) -> float:
        return float(self.s[-1])


class ExactDistribution:
    """Exact distribution function of a P1 field (or of explicit per-cell
    data) as global piecewise polynomials in the level t."""

    def __init__(self, corner_values: np.ndarray, areas: np.ndarray):
        v = np.sort(np.asarray(corner_values, dtype=float), axis=1)
        A = np.asarray(areas, dtype=float)
        if v.ndim != 2 or v.shape[1] != 3 or A.shape != (len(v),):
            raise RearrangementError("need (T, 3) corner values and (T,) areas")
        self.total = float(np.sum(A))
        self.vmin = float(v.min())
        self.vmax = float(v.max())
        self.shift = self.vmin
        v = v - self.shift
        # snap near-equal corner values: a gap d between corners enters the
        # piece coefficients as A/d, so gaps near machine epsilon would wreck
        # the event-scan accumulation; treating them as exact ties perturbs
        # mu by less than 1e-9 of the value range
        rng = self.vmax - self.vmin
        if rng > 0.0:
            tie = 1e-9 * rng
            v[:, 1] = np.where(v[:, 1] - v[:, 0] < tie, v[:, 0], v[:, 1])
            v[:, 2] = np.where(v[:, 2] - v[:, 1] < tie, v[:, 1], v[:, 2])
        self.total_integral_shifted = float(np.sum(A * v.mean(axis=1)))

        v1, v2, v3 = v[:, 0], v[:, 1], v[:, 2]
        d21, d31, d32 = v2 - v1, v3 - v1, v3 - v2
        mean = (v1 + v2 + v3) / 3.0

        pos, dmu, dj = [], [], []

        def add(p, mu_delta, j_delta):
            pos.append(p)
            dmu.append(mu_delta)
            dj.append(j_delta)

        def stackc(*cols):
            return np.column_stack(cols)

        with np.errstate(divide="ignore", invalid="ignore"):
            D1 = d21 * d31
            D2 = d31 * d32
            p1mu = stackc(A - A * v1 ** 2 / D1, 2.0 * A * v1 / D1,
                          -A / D1, np.zeros_like(A))
            p2mu = stackc(A * v3 ** 2 / D2, -2.0 * A * v3 / D2,
                          A / D2, np.zeros_like(A))
            p1j = stackc(A * mean - A * v1 ** 3 / (3.0 * D1), np.zeros_like(A),
                         A * v1 / D1, -2.0 * A / (3.0 * D1))
            p2j = stackc(A * v3 ** 3 / (3.0 * D2), np.zeros_like(A),
                         -A * v3 / D2, 2.0 * A / (3.0 * D2))
        cmu = stackc(A, np.zeros_like(A), np.zeros_like(A), np.zeros_like(A))
        cj = stackc(A * mean, np.zeros_like(A), np.zeros_like(A), np.zeros_like(A))

        flat = d31 == 0.0
        low = (~flat) & (d21 == 0.0)
        high = (~flat) & (d32 == 0.0)
        both = (~flat) & (d21 > 0.0) & (d32 > 0.0)

        if np.any(both):
            m = both
            add(v1[m], p1mu[m] - cmu[m], p1j[m] - cj[m])
            add(v2[m], p2mu[m] - p1mu[m], p2j[m] - p1j[m])
            add(v3[m], -p2mu[m], -p2j[m])
        if np.any(low):
            m = low
            add(v1[m], p2mu[m] - cmu[m], p2j[m] - cj[m])
            add(v3[m], -p2mu[m], -p2j[m])
        if np.any(high):
            m = high
            add(v1[m], p1mu[m] - cmu[m], p1j[m] - cj[m])
            add(v2[m], -p1mu[m], -p1j[m])
        if np.any(flat):
            m = flat
            add(v1[m], -cmu[m], -cj[m])

        pos = np.concatenate(pos)
        dmu = np.vstack(dmu)
        dj = np.vstack(dj)
        b, inv = np.unique(pos, return_inverse=True)
        mu_acc = np.zeros((len(b), 4))
        j_acc = np.zeros((len(b), 4))
        np.add.at(mu_acc, inv, dmu)
        np.add.at(j_acc, inv, dj)
        # coefficients valid on [b_k, b_{k+1}), in the shifted variable
        self.b = b
        self.mu_c = np.cumsum(mu_acc, axis=0)
        self.mu_c[:, 0] += self.total
        self.j_c = np.cumsum(j_acc, axis=0)
        self.j_c[:, 0] += self.total_integral_shifted

        self._starts = self._eval(self.mu_c, np.arange(len(b)), b)
        ends = np.empty(len(b))
        ends[:-1] = self._eval(self.mu_c, np.arange(len(b) - 1), b[1:])
        ends[-1] = 0.0
        self._ends = ends

    @classmethod
    def from_field(cls, u: ScalarField) -> "ExactDistribution":
        return cls(u.values[u.mesh.triangles], u.mesh.triangle_areas)

    @classmethod
    def from_cells(cls, values: np.ndarray, measures: np.ndarray) -> "ExactDistribution":
        """Distribution of a piecewise-constant field given per-cell values
        and measures (each cell becomes a flat triangle)."""
        values = np.asarray(values, dtype=float)
        return cls(np.tile(values[:, None], (1, 3)), np.asarray(measures, dtype=float))

    @staticmethod
    def _eval(coefs: np.ndarray, idx: np.ndarray, t: np.ndarray) -> np.ndarray:
        c = coefs[idx]
        return ((c[:, 3] * t + c[:, 2]) * t + c[:, 1]) * t + c[:, 0]

    def _locate(self, ts: np.ndarray) -> np.ndarray:
        return np.searchsorted(self.b, ts, side="right") - 1

    def mu(self, t) -> np.ndarray:
        """Superlevel measure |{u > t}| (right-continuous at flats)."""
        t = np.atleast_1d(np.asarray(t, dtype=float)) - self.shift
        idx = self._locate(t)
        out = np.full(len(t), self.total)
        inside = idx >= 0
        out[inside] = self._eval(self.mu_c, idx[inside], t[inside])
        return np.clip(out, 0.0, self.total)

    def integral_above(self, t) -> np.ndarray:
        """Integral of u over the superlevel set {u > t}, exactly."""
        t = np.atleast_1d(np.asarray(t, dtype=float)) - self.shift
        idx = self._locate(t)
        out = np.full(len(t), self.total_integral_shifted)
        inside = idx >= 0
        out[inside] = self._eval(self.j_c, idx[inside], t[inside])
        return out + self.shift * self.mu(t + self.shift)

    def quantile(self, s) -> np.ndarray:
        """Decreasing rearrangement u*(s) = inf{t >= min u : mu(t) < s}."""
        s = np.atleast_1d(np.asarray(s, dtype=float))
        if np.any(s < -1e-12 * self.total) or \
                np.any(s > self.total * (1.0 + 1e-12)):
            raise RearrangementError("s outside [0, |Omega|]")
        out = np.empty(len(s))
        starts, ends, b = self._starts, self._ends, self.b
        K = len(b)
        nonpos = s <= 0.0
        out[nonpos] = b[-1]
        rest = np.where(~nonpos)[0]
        if len(rest):
            sr = s[rest]
            k0 = np.searchsorted(-starts, -sr, side="left")
            at_min = k0 == 0
            out[rest[at_min]] = b[0]
            inner = rest[~at_min]
            if len(inner):
                kk = k0[~at_min] - 1
                si = s[inner]
                solve = ends[kk] < si
                jump = inner[~solve]
                out[jump] = b[np.minimum(kk[~solve] + 1, K - 1)]
                idx = kk[solve]
                target = si[solve]
                lo = b[idx]
                hi = b[np.minimum(idx + 1, K - 1)]
                c = self.mu_c[idx]
                for _ in range(64):
                    mid = 0.5 * (lo + hi)
                    val = ((c[:, 3] * mid + c[:, 2]) * mid + c[:, 1]) * mid + c[:, 0]
                    below = val < target
                    hi = np.where(below, mid, hi)
                    lo = np.where(below, lo, mid)
                out[inner[solve]] = 0.5 * (lo + hi)
        return out + self.shift

    def partial_integral(self, s) -> np.ndarray:
        """Exact partial integral of the rearrangement, int_0^s u*(r) dr."""
        s = np.atleast_1d(np.asarray(s, dtype=float))
        t = self.quantile(s)
        return self.integral_above(t) + t * (s - self.mu(t))

    def moment(self, p: int = 1) -> float:
        """Exact int_0^{|Omega|} (u*)^p ds = int (u)^p dx for integer p >= 1."""
        b = self.b
        K = len(b)
        # smooth pieces: int t^q (-mu') dt with mu' in the shifted variable
        c1 = self.mu_c[:, 1]
        c2 = self.mu_c[:, 2]
        hi = np.concatenate([b[1:], [b[-1]]])
        lo = b

        def anti(q, t):
            return -(c1 * t ** (q + 1) / (q + 1) + 2.0 * c2 * t ** (q + 2) / (q + 2))

        piece = np.zeros(K)
        for q in range(p + 1):
            coef = math.comb(p, q) * self.shift ** (p - q)
            piece += coef * (anti(q, hi) - anti(q, lo))
        # jumps of mu (flat regions of u) contribute value^p * jump width
        prev_end = np.concatenate([[self.total], self._ends[:-1]])
        jumps = prev_end - self._starts
        jump_term = float(np.sum((b + self.shift) ** p * np.clip(jumps, 0.0, None)))
        return float(np.sum(piece)) + jump_term

    def to_table(self, levels: np.ndarray) -> DistributionData:
        levels = np.asarray(levels, dtype=float)
        raw = self.mu(levels)
        if len(raw) > 1 and float(np.max(np.diff(raw))) > 1e-8 * self.total:
            raise RearrangementError("mu evaluation is not nonincreasing")
        # clamp residual rounding wiggle below that threshold
        mu = np.minimum.accumulate(raw)
        return DistributionData(levels=levels, measures=mu,
                                total_measure=self.total)


def default_levels(u: ScalarField, count: int = 512,
                   max_vertex_levels: int = 4096) -> np.ndarray:
    """Level grid: ``count`` uniform levels over the value range plus vertex
    values as exact breakpoints (subsampled beyond ``max_vertex_levels``)."""
    vals = np.unique(u.values)
    if len(vals) > max_vertex_levels:
        vals = vals[np.linspace(0, len(vals) - 1, max_vertex_levels).astype(int)]
    lo, hi = float(u.values.min()), float(u.values.max())
    if hi <= lo:
        return np.array([lo])
    uniform = np.linspace(lo, hi, count)
    return np.unique(np.concatenate([uniform, vals]))


def distribution_function(u: ScalarField, levels: np.ndarray) -> DistributionData:
    """Exact superlevel-set measures of a P1 field at the given levels."""
    levels = np.asarray(levels, dtype=float)
    if levels.ndim != 1 or len(levels) == 0:
        raise RearrangementError("empty level grid")
    return ExactDistribution.from_field(u).to_table(levels)


def decreasing_rearrangement(d: DistributionData, s_grid: np.ndarray) -> RearrangedProfile:
    """Generalized inverse of the tabulated distribution function, with the
    right-continuous infimum convention (ties broken toward smaller t)."""
    s_grid = np.asarray(s_grid, dtype=float)
    if np.any(s_grid < 0.0) or np.any(s_grid > d.total_measure * (1.0 + 1e-12)):
        raise RearrangementError("s outside [0, |Omega|]")
    mu_rev = np.minimum.accumulate(d.measures)[::-1]
    lev_rev = d.levels[::-1]
    vals = np.interp(s_grid, mu_rev, lev_rev,
                     left=lev_rev[0], right=lev_rev[-1])
    vals[s_grid <= 0.0] = d.levels[-1]
    return RearrangedProfile(s=s_grid, values=vals)


def rearranged_profile(u: ScalarField, num: int = 2049) -> RearrangedProfile:
    """Exact decreasing rearrangement of a P1 field sampled on an s-grid
    containing the images of all vertex-value breakpoints."""
    dist = ExactDistribution.from_field(u)
    s = np.unique(np.concatenate([
        np.linspace(0.0, dist.total, num),
        np.clip(dist._starts, 0.0, dist.total),
        np.clip(dist._ends, 0.0, dist.total),
    ]))
    return RearrangedProfile(s=s, values=dist.quantile(s))


def schwarz_profile(p: RearrangedProfile, theta: float, m: Manifold,
                    num: int | None = None) -> RadialProfile:
    """Radial Schwarz rearrangement on the comparison ball: the profile value
    at radius r is the decreasing rearrangement at s = theta * |B_r|."""
    if not 0.0 < theta <= 1.0:
        raise RearrangementError("theta must lie in (0, 1]")
    kappa, n = m.kappa, m.dim
    total = p.total
    R0 = inverse_ball_area(kappa, n, total / theta)
    r = np.linspace(0.0, R0, num or len(p.s))
    if kappa == 0.0:
        from .geometry import unit_ball_volume
        s_of_r = theta * unit_ball_volume(n) * r ** n
    elif n == 2:
        s_of_r = theta * 2.0 * math.pi * (1.0 - np.cos(math.sqrt(kappa) * r)) / kappa
    else:
        s_of_r = theta * np.array([ball_area(kappa, n, ri) for ri in r])
    vals = np.interp(np.clip(s_of_r, 0.0, total), p.s, p.values)
    vals = np.minimum.accumulate(vals)
    return RadialProfile(r=r, values=vals, kappa=kappa, n=n)


def hardy_littlewood_check(f: ScalarField, g: ScalarField,
                           gauss_points: int = 8) -> float:
    """Margin int_0^{|Omega|} f* g* ds - int fg dx (nonnegative up to
    quadrature error).  The rearranged side is integrated piecewise between
    the breakpoint images of both distribution functions with Gauss-Legendre
    nodes and exact quantile evaluations."""
    if f.mesh is not g.mesh:
        raise MeshError("fields live on different meshes")
    df = ExactDistribution.from_field(f)
    dg = ExactDistribution.from_field(g)
    total = df.total
    knots = np.unique(np.clip(np.concatenate(
        [[0.0, total], df._starts, df._ends, dg._starts, dg._ends]), 0.0, total))
    x, w = np.polynomial.legendre.leggauss(gauss_points)
    a, b = knots[:-1], knots[1:]
    half = 0.5 * (b - a)
    nodes = (0.5 * (a + b)[:, None] + half[:, None] * x[None, :]).ravel()
    qf = df.quantile(nodes)
    qg = dg.quantile(nodes)
    rhs = float(np.sum((qf * qg).reshape(len(a), -1) * w[None, :] * half[:, None]))
    return rhs - integrate_product(f, g)


def concentration_check(fstar: RearrangedProfile, n: int, total: float) -> float:
    """Margin of the source concentration condition via the bathtub
    reduction: min over the s-grid of
    (s/|Omega|)^{(n-2)/n} int f - int_0^s f*; nonnegative iff the condition
    holds."""
    if n < 2:
        raise RearrangementError("dimension must be at least 2")
    if np.any(np.diff(fstar.values) > 1e-12 * max(abs(fstar.values[0]), 1.0)):
        raise RearrangementError("rearranged profile must be nonincreasing")
    s = fstar.s
    partial = np.concatenate([[0.0], np.cumsum(
        0.5 * (fstar.values[1:] + fstar.values[:-1]) * np.diff(s))])
    total_f = partial[-1]
    expo = (n - 2.0) / n
    with np.errstate(divide="ignore"):
        bound = np.where(s > 0.0, (s / total) ** expo * total_f, 0.0)
    return float(np.min((bound - partial)[s > 0.0]))


def level_polyline_length(u: ScalarField, t: float) -> float:
    """Exact length of the P1 level polyline {u = t} (interior level sets;
    triangles where u is constant at t are skipped)."""
    mesh = u.mesh
    V = u.values[mesh.triangles]
    order = np.argsort(V, axis=1)
    Vs = np.take_along_axis(V, order, axis=1)
    P = mesh.triangle_corners
    Ps = np.take_along_axis(P, order[:, :, None], axis=1)
    v1, v2, v3 = Vs[:, 0], Vs[:, 1], Vs[:, 2]
    cut = (v1 < t) & (t < v3)
    if not np.any(cut):
        return 0.0
    v1, v2, v3 = v1[cut], v2[cut], v3[cut]
    p1, p2, p3 = Ps[cut, 0], Ps[cut, 1], Ps[cut, 2]
    lower = t <= v2
    with np.errstate(divide="ignore", invalid="ignore"):
        # one crossing on the edge (v1,v3), the other on (v1,v2) or (v2,v3)
        fa = np.where(lower, (t - v1) / (v2 - v1), (t - v2) / (v3 - v2))
        pa = np.where(lower[:, None], p1 + fa[:, None] * (p2 - p1),
                      p2 + fa[:, None] * (p3 - p2))
        fb = (t - v1) / (v3 - v1)
        pb = p1 + fb[:, None] * (p3 - p1)
    seg = np.linalg.norm(pa - pb, axis=1)
    return float(np.sum(seg[np.isfinite(seg)]))
