"""Verification of the comparison inequalities.

Each verifier returns a :class:`CheckEntry` with lhs, rhs, the margin
rhs - lhs (checks are of <=-type), the tolerance in force and a verdict.
Differential-in-t statements are checked in integrated form only: the raw
derivative of a tabulated distribution function is staircase noise, while the
integrated inequalities are stable and are what the comparison argument
actually uses.

The verdict scale separates discretization error from violation: margins
above +tol hold strictly, margins within [-tol, +tol] hold within tolerance
(the equality regime), margins below -tol are violations.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, asdict

import numpy as np

from .fem import FieldStats, ScalarField
from .geometry import Manifold, ball_perimeter, inverse_ball_area, iso_profile_a
from .mesh import BoundaryField
from .radial import RadialProfile, radial_lp_norm
from .rearrange import (DistributionData, ExactDistribution, RearrangedProfile,
                        level_polyline_length)


class CompareError(ValueError):
    """Inconsistent inputs to a comparison check."""


VERDICT_HOLDS = "holds"
VERDICT_WITHIN_TOL = "holds-within-tolerance"
VERDICT_VIOLATED = "violated"


def verdict_for(margin: float, tolerance: float) -> str:
    if margin > tolerance:
        return VERDICT_HOLDS
    if margin >= -tolerance:
        return VERDICT_WITHIN_TOL
    return VERDICT_VIOLATED


def default_tolerance(h: float, reference: float, tol_scale: float = 0.5) -> float:
    """Mesh-resolution verdict tolerance C * h * reference."""
    return tol_scale * h * abs(reference)


@dataclass(frozen=True)
class CheckEntry:
    name: str
    lhs: float
    rhs: float
    margin: float
    tolerance: float
    verdict: str
    detail: dict = field(default_factory=dict)

    @classmethod
    def build(cls, name: str, lhs: float, rhs: float, tolerance: float,
              detail: dict | None = None) -> "CheckEntry":
        margin = rhs - lhs
        return cls(name=name, lhs=float(lhs), rhs=float(rhs),
                   margin=float(margin), tolerance=float(tolerance),
                   verdict=verdict_for(margin, tolerance),
                   detail=detail or {})

    @property
    def ok(self) -> bool:
        return self.verdict != VERDICT_VIOLATED


@dataclass
class ComparisonReport:
    """Case descriptor plus all check entries and optional convergence data."""

    case: dict
    entries: list
    convergence: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(e.ok for e in self.entries)

    def to_dict(self) -> dict:
        return {
            "case": self.case,
            "checks": [asdict(e) for e in self.entries],
            "convergence": self.convergence,
            "all_hold": self.ok,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True,
                          allow_nan=False) + "\n"

    def to_csv(self) -> str:
        lines = ["name,lhs,rhs,margin,tolerance,verdict"]
        for e in self.entries:
            lines.append(f"{e.name},{e.lhs:.17g},{e.rhs:.17g},"
                         f"{e.margin:.17g},{e.tolerance:.17g},{e.verdict}")
        return "\n".join(lines) + "\n"


def verify_L1(u_stats: FieldStats, v: RadialProfile, theta: float,
              m: Manifold, tolerance: float) -> CheckEntry:
    """||u||_{L1(Omega)} <= theta ||v||_{L1 of the comparison ball}."""
    sharp_area = _ball_area(m, v.R0)
    if abs(u_stats.area - theta * sharp_area) > 1e-8 * max(u_stats.area, 1.0):
        raise CompareError(
            f"area bookkeeping mismatch: |Omega|={u_stats.area:.12g}, "
            f"theta*|ball|={theta * sharp_area:.12g}")
    lhs = u_stats.L1
    rhs = theta * radial_lp_norm(v, 1)
    return CheckEntry.build("l1", lhs, rhs, tolerance)


def verify_pointwise(mu_u: DistributionData, mu_v: DistributionData,
                     theta: float, tolerance: float) -> CheckEntry:
    """mu_u(t) <= theta mu_v(t) at every shared level (equivalent to the
    pointwise domination of the symmetrized solution)."""
    if not np.array_equal(mu_u.levels, mu_v.levels):
        raise CompareError("level grids are not aligned")
    margins = theta * mu_v.measures - mu_u.measures
    worst = int(np.argmin(margins))
    return CheckEntry.build(
        "pointwise", float(mu_u.measures[worst]),
        float(theta * mu_v.measures[worst]), tolerance,
        detail={"worst_level": float(mu_u.levels[worst]),
                "levels_checked": int(len(mu_u.levels))})


def verify_min_comparison(u0: float, v0: float, tolerance: float) -> CheckEntry:
    """Boundary minimum comparison u0 <= v0."""
    return CheckEntry.build("boundary_min", u0, v0, tolerance)


def boundary_superlevel_length(u: ScalarField, t: float) -> float:
    """Length of the boundary portion where the linear trace of u exceeds t."""
    mesh = u.mesh
    ua = u.values[mesh.boundary[:, 0]]
    ub = u.values[mesh.boundary[:, 1]]
    lo = np.minimum(ua, ub)
    hi = np.maximum(ua, ub)
    with np.errstate(divide="ignore", invalid="ignore"):
        frac = np.where(hi > lo, (hi - t) / (hi - lo), np.where(lo > t, 1.0, 0.0))
    return float(np.sum(mesh.boundary_lengths * np.clip(frac, 0.0, 1.0)))


def verify_isoperimetric(u: ScalarField, levels: np.ndarray, theta: float,
                         m: Manifold, tolerance: float) -> CheckEntry:
    """For levels t above the boundary minimum: the perimeter of {u > t}
    (interior level polyline plus the boundary portion with trace above t)
    dominates theta times the perimeter of the model ball of area
    mu_u(t)/theta."""
    levels = np.asarray(levels, dtype=float)
    u0 = float(np.min(u.values[u.mesh.boundary_vertices]))
    if np.any(levels <= u0):
        raise CompareError("isoperimetric levels must exceed the boundary minimum")
    dist = ExactDistribution.from_field(u)
    mu = dist.mu(levels)
    worst_margin = math.inf
    worst = {}
    for t, mu_t in zip(levels, mu):
        per = level_polyline_length(u, float(t)) + \
            boundary_superlevel_length(u, float(t))
        if mu_t <= 0.0:
            comp = 0.0
        else:
            r = inverse_ball_area(m.kappa, m.dim, mu_t / theta)
            comp = theta * float(ball_perimeter(m.kappa, m.dim, r))
        # <=-type orientation: theta * comparison perimeter <= |boundary of
        # the superlevel set|
        if per - comp < worst_margin:
            worst_margin = per - comp
            worst = {"level": float(t), "superlevel_perimeter": per,
                     "comparison_perimeter": comp}
    return CheckEntry.build("isoperimetric", worst["comparison_perimeter"],
                            worst["superlevel_perimeter"], tolerance,
                            detail=worst)


def verify_level_inequality(u: ScalarField, beta: BoundaryField,
                            fstar: RearrangedProfile, theta: float,
                            m: Manifold, n: int, tolerance: float,
                            num_tau: int = 64) -> CheckEntry:
    """Integrated level-set inequality for the surface case with constant
    source: theta*tau <= (|Omega| - mu_u(tau) + int 1/beta) * a^2(|Omega|/theta)
    scaled by the source constant, over a ladder of tau."""
    if n != 2:
        raise CompareError("the integrated level-set check is restricted to n = 2")
    fconst = float(fstar.values[0])
    if np.max(np.abs(fstar.values - fconst)) > 1e-9 * max(abs(fconst), 1.0):
        raise CompareError("the integrated level-set check requires a constant source")
    mesh = u.mesh
    inv_beta = float(np.sum(mesh.boundary_lengths / beta.values))
    area = mesh.area
    a2 = iso_profile_a(m.kappa, n, area / theta) ** 2
    u0 = float(np.min(u.values[mesh.boundary_vertices]))
    taus = np.linspace(0.5 * u0, float(np.max(u.values)), num_tau)
    dist = ExactDistribution.from_field(u)
    mu = dist.mu(taus)
    lhs = theta * taus
    rhs = fconst * (area - mu + inv_beta) * a2
    margins = rhs - lhs
    worst = int(np.argmin(margins))
    return CheckEntry.build(
        "level_inequality", float(lhs[worst]), float(rhs[worst]), tolerance,
        detail={"worst_tau": float(taus[worst]), "tau_count": int(num_tau),
                "tau_min": float(taus[0]), "tau_max": float(taus[-1])})


def boundary_level_integral(u: ScalarField, beta: BoundaryField,
                            t: float) -> float:
    """Integral of 1/(beta u) over the part of the boundary where the linear
    trace of u exceeds t, using the exact log antiderivative per edge."""
    mesh = u.mesh
    i, j = mesh.boundary[:, 0], mesh.boundary[:, 1]
    ua, ub = u.values[i], u.values[j]
    if np.any(ua <= 0.0) or np.any(ub <= 0.0):
        raise CompareError("u must be positive on the boundary")
    lens = mesh.boundary_lengths
    bv = beta.values

    lo = np.minimum(ua, ub)
    hi = np.maximum(ua, ub)
    active = hi > t
    s_lo = np.where(lo > t, lo, t)
    diff = ub - ua
    with np.errstate(divide="ignore", invalid="ignore"):
        # orientation-free form: integrate over the sub-segment from value
        # max(lo, t) to hi; |du| = |diff| along the edge
        general = lens / (bv * np.abs(diff)) * np.log(
            np.where(active & (np.abs(diff) > 0), hi / np.where(s_lo > 0, s_lo, 1.0), 1.0))
        flat = lens / (bv * np.where(lo > 0, lo, 1.0)) * np.where(lo > t, 1.0, 0.0)
    out = np.where(np.abs(diff) > 1e-300, general, flat)
    return float(np.sum(np.where(active, out, 0.0)))


def compute_F(sigma_grid: np.ndarray, fstar: RearrangedProfile,
              m: Manifold, n: int) -> np.ndarray:
    """Table of F(s) = int_0^s a^2(sigma) sigma^{2/n - 1} (int_0^sigma f*) dsigma
    on the given grid (column-stacked (sigma, F))."""
    sigma_grid = np.asarray(sigma_grid, dtype=float)
    fine = np.unique(np.concatenate([
        sigma_grid, fstar.s, np.linspace(0.0, float(sigma_grid[-1]), 2049)]))
    fine = fine[fine <= sigma_grid[-1] * (1.0 + 1e-15)]
    fvals = np.interp(fine, fstar.s, fstar.values)
    inner = np.concatenate([[0.0], np.cumsum(
        0.5 * (fvals[1:] + fvals[:-1]) * np.diff(fine))])
    if m.kappa == 0.0:
        a2 = np.full(len(fine), iso_profile_a(0.0, n, 1.0) ** 2)
    else:
        a2 = np.array([iso_profile_a(m.kappa, n, s) ** 2 if s > 0 else 0.0
                       for s in fine])
        if len(fine) > 1:
            a2[fine == 0.0] = a2[1]
    with np.errstate(divide="ignore"):
        weight = np.where(fine > 0.0, fine ** (2.0 / n - 1.0), 0.0)
    integrand = a2 * weight * inner
    if n == 2:
        integrand[fine == 0.0] = a2[0] * inner[0]
    F_fine = np.concatenate([[0.0], np.cumsum(
        0.5 * (integrand[1:] + integrand[:-1]) * np.diff(fine))])
    return np.column_stack([sigma_grid, np.interp(sigma_grid, fine, F_fine)])


def _ball_area(m: Manifold, r: float) -> float:
    from .geometry import ball_area
    return ball_area(m.kappa, m.dim, r)
