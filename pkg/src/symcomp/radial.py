"""The symmetrized radial problem on the comparison ball.

The radially symmetric solution v(x) = phi(r) of the symmetrized Poisson
problem satisfies (sn^{n-1} phi')' = -sn^{n-1} h with the Robin closure
phi'(R0) + beta_bar * phi(R0) = 0, so

    phi'(r) = -sn(r)^{1-n} * int_0^r sn(rho)^{n-1} h(rho) drho,

which is evaluated by composite Simpson quadrature on a fine grid; the
apparent 0/0 at r = 0 is removable (phi'(0) = 0).  The harmonic-mean Robin
constant beta_bar is theta |boundary of the comparison ball| divided by the
boundary integral of 1/beta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_simpson, simpson

from .geometry import (GeometryError, Manifold, ball_perimeter,
                       inverse_ball_area, myers_radius, sn)
from .mesh import BoundaryField, Mesh


class RadialError(ValueError):
    """Invalid input to the radial solver."""


@dataclass(frozen=True)
class RadialProfile:
    """Function of geodesic radius on [0, R0], sampled on an r-grid."""

    r: np.ndarray
    values: np.ndarray
    kappa: float = 0.0
    n: int = 2

    def __post_init__(self):
        r = np.asarray(self.r, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if r.ndim != 1 or r.shape != v.shape or len(r) < 2:
            raise RadialError("profile needs matching r and value arrays")
        if r[0] != 0.0 or np.any(np.diff(r) <= 0.0):
            raise RadialError("r-grid must start at 0 and increase strictly")
        if self.kappa > 0.0 and r[-1] > myers_radius(self.kappa) * (1.0 + 1e-12):
            raise RadialError("profile extends past the Myers bound")
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "values", v)

    @property
    def R0(self) -> float:
        return float(self.r[-1])

    @property
    def boundary_value(self) -> float:
        return float(self.values[-1])

    def __call__(self, r) -> np.ndarray:
        return np.interp(np.asarray(r, dtype=float), self.r, self.values)


def beta_bar(beta: BoundaryField, mesh: Mesh, m: Manifold) -> float:
    """Harmonic-mean Robin constant of the symmetrized problem:
    theta |boundary of B(|Omega|/theta)| / int_{boundary} 1/beta dA."""
    lens = mesh.boundary_lengths
    if len(beta.values) != len(lens):
        raise RadialError("boundary field length does not match the mesh")
    total_inv = float(np.sum(lens / beta.values))
    if total_inv <= 0.0:
        raise RadialError("boundary has zero length")
    theta = m.theta
    R0 = inverse_ball_area(m.kappa, m.dim, mesh.area / theta)
    sharp_perimeter = float(ball_perimeter(m.kappa, m.dim, R0))
    return theta * sharp_perimeter / total_inv


def solve_radial(h: RadialProfile, m: Manifold, n: int, R0: float,
                 bbar: float, num: int = 4097) -> RadialProfile:
    """Quadrature solution of the symmetrized problem with source h >= 0
    (nonincreasing) on the ball of radius R0 and Robin constant bbar > 0.

    phi'(0) = 0, phi' < 0 on (0, R0), phi(R0) = -phi'(R0)/bbar.
    """
    if bbar <= 0.0:
        raise RadialError("Robin constant must be positive")
    if R0 <= 0.0:
        raise RadialError("comparison ball radius must be positive")
    kappa = m.kappa
    if kappa > 0.0 and R0 > myers_radius(kappa) * (1.0 + 1e-12):
        raise RadialError("comparison ball exceeds the Myers bound")
    hv = np.asarray(h.values, dtype=float)
    if np.any(hv < -1e-12 * max(1.0, float(np.max(np.abs(hv))))):
        raise RadialError("source profile must be nonnegative")
    if not np.any(hv > 0.0):
        raise RadialError("source profile must not be identically zero")

    r = np.unique(np.concatenate([
        np.linspace(0.0, R0, num),
        h.r[(h.r > 0.0) & (h.r < R0)],
    ]))
    hr = np.minimum.accumulate(np.clip(np.interp(r, h.r, hv), 0.0, None))
    w = sn(kappa, r) ** (n - 1)
    integral = cumulative_simpson(w * hr, x=r, initial=0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        dphi = np.where(r > 0.0, -integral / np.where(w > 0.0, w, 1.0), 0.0)
    phi_R0 = -dphi[-1] / bbar
    tail = cumulative_simpson(dphi, x=r, initial=0.0)
    phi = phi_R0 - (tail[-1] - tail)
    return RadialProfile(r=r, values=phi, kappa=kappa, n=n)


def monotonicity_report(v: RadialProfile) -> float:
    """Max difference quotient over the interior grid; strictly negative for
    a valid symmetrized solution."""
    return float(np.max(np.diff(v.values) / np.diff(v.r)))


def closed_form_disk(R: float, beta: float, num: int = 1001) -> RadialProfile:
    """Analytic oracle: flat disk of radius R, f = 1, constant Robin beta:
    phi(r) = (R^2 - r^2)/4 + R/(2 beta)."""
    if R <= 0.0 or beta <= 0.0:
        raise RadialError("radius and Robin constant must be positive")
    r = np.linspace(0.0, R, num)
    return RadialProfile(r=r, values=(R ** 2 - r ** 2) / 4.0 + R / (2.0 * beta),
                         kappa=0.0, n=2)


def closed_form_cap(kappa: float, R0: float, bbar: float,
                    num: int = 1001) -> RadialProfile:
    """Analytic oracle: spherical cap of geodesic radius R0 with f = 1:
    phi'(r) = -tan(sqrt(kappa) r / 2)/sqrt(kappa)."""
    if kappa <= 0.0 or bbar <= 0.0:
        raise RadialError("requires kappa > 0 and a positive Robin constant")
    if R0 >= myers_radius(kappa):
        raise RadialError("cap radius must stay below the Myers bound")
    a = math.sqrt(kappa)
    r = np.linspace(0.0, R0, num)
    phi_R0 = math.tan(a * R0 / 2.0) / (a * bbar)
    vals = phi_R0 - (2.0 / kappa) * (math.log(math.cos(a * R0 / 2.0))
                                     - np.log(np.cos(a * r / 2.0)))
    return RadialProfile(r=r, values=vals, kappa=kappa, n=2)


def radial_lp_norm(v: RadialProfile, p: int = 1) -> float:
    """L^p norm (to the first power for p = 1, the norm itself otherwise) of
    the radial profile over the comparison ball, by Simpson quadrature of
    |phi|^p against the perimeter element."""
    per = np.asarray(ball_perimeter(v.kappa, v.n, v.r), dtype=float)
    val = float(simpson(np.abs(v.values) ** p * per, x=v.r))
    return val if p == 1 else val ** (1.0 / p)


def radial_distribution(v: RadialProfile, levels: np.ndarray):
    """Superlevel measures mu_v(t) = |B(r_v(t))| of a nonincreasing radial
    profile, tabulated on the given levels."""
    from .geometry import ball_area
    from .rearrange import DistributionData
    levels = np.asarray(levels, dtype=float)
    vals = np.minimum.accumulate(v.values)
    # invert the decreasing profile: radius where phi crosses each level
    r_of_t = np.interp(levels, vals[::-1], v.r[::-1])
    kappa, n = v.kappa, v.n
    if kappa == 0.0:
        from .geometry import unit_ball_volume
        mu = unit_ball_volume(n) * r_of_t ** n
        total = unit_ball_volume(n) * v.R0 ** n
    elif n == 2:
        mu = 2.0 * math.pi * (1.0 - np.cos(math.sqrt(kappa) * r_of_t)) / kappa
        total = ball_area(kappa, 2, v.R0)
    else:
        mu = np.array([ball_area(kappa, n, ri) for ri in r_of_t])
        total = ball_area(kappa, n, v.R0)
    mu[levels >= vals[0]] = 0.0
    mu[levels < vals[-1]] = total
    mu = np.minimum.accumulate(np.clip(mu, 0.0, total))
    return DistributionData(levels=levels, measures=mu, total_measure=total)
