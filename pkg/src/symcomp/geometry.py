"""Closed-form metric quantities of the constant-curvature model spaces.

Everything here is a pure function of curvature ``kappa >= 0``, dimension
``n >= 2`` and a radius / volume argument: the warped-radius ``sn``, geodesic
ball area and perimeter, the inverse area map, the isoperimetric profile
``a(s) = s^{(n-1)/n} / |boundary of the ball of volume s|`` and the asymptotic
volume ratio ``theta`` of the supported ambient spaces (plane, round sphere,
flat cone).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize, special


class GeometryError(ValueError):
    """A metric quantity was requested outside its domain of validity."""


def unit_ball_volume(n: int) -> float:
    """Volume of the unit ball in R^n."""
    return math.pi ** (n / 2.0) / special.gamma(n / 2.0 + 1.0)


def unit_sphere_area(n: int) -> float:
    """(n-1)-dimensional area of the boundary of the unit ball in R^n."""
    return n * unit_ball_volume(n)


def myers_radius(kappa: float) -> float:
    """Diameter bound pi/sqrt(kappa) for kappa > 0, +inf for kappa = 0."""
    if kappa < 0.0:
        raise GeometryError("negative curvature is not supported")
    if kappa == 0.0:
        return math.inf
    return math.pi / math.sqrt(kappa)


# relative slack applied to the Myers bound so that r = pi/sqrt(kappa)
# computed in floating point is not rejected
_MYERS_SLACK = 1.0 + 1e-12


def _check_radius(kappa: float, r) -> None:
    r = np.asarray(r, dtype=float)
    if np.any(r < 0.0):
        raise GeometryError("radius must be nonnegative")
    if kappa > 0.0 and np.any(r > myers_radius(kappa) * _MYERS_SLACK):
        raise GeometryError(
            f"radius {float(np.max(r)):.6g} exceeds the Myers bound "
            f"{myers_radius(kappa):.6g} for kappa={kappa:.6g}"
        )


def sn(kappa: float, r):
    """Warped radius sin(sqrt(kappa) r)/sqrt(kappa) (= r for kappa = 0).

    Accepts scalars or arrays; continuous in kappa at kappa = 0.  For
    sqrt(kappa)*r below 1e-4 a series branch avoids cancellation.
    """
    _check_radius(kappa, r)
    r = np.asarray(r, dtype=float)
    if kappa == 0.0:
        out = r.copy()
    else:
        sk = math.sqrt(kappa)
        x = sk * r
        out = np.where(
            x < 1e-4,
            r * (1.0 - x * x / 6.0 * (1.0 - x * x / 20.0)),
            np.sin(x) / sk,
        )
    return out if out.ndim else float(out)


def sn_prime(kappa: float, r):
    """Derivative of ``sn`` in r: cos(sqrt(kappa) r) (= 1 for kappa = 0)."""
    _check_radius(kappa, r)
    r = np.asarray(r, dtype=float)
    out = np.cos(math.sqrt(kappa) * r) if kappa > 0.0 else np.ones_like(r)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class BallSpec:
    """Geodesic ball of the model space: radius, n-volume, (n-1)-perimeter."""

    radius: float
    area: float
    perimeter: float


def ball_perimeter(kappa: float, n: int, r):
    """(n-1)-area of the geodesic sphere of radius r in the model space."""
    s = sn(kappa, r)
    return unit_sphere_area(n) * np.asarray(s) ** (n - 1) if np.ndim(s) else \
        unit_sphere_area(n) * s ** (n - 1)


def ball_area(kappa: float, n: int, r: float) -> float:
    """n-volume of the geodesic ball of radius r in the model space."""
    _check_radius(kappa, r)
    r = float(r)
    if kappa == 0.0:
        return unit_ball_volume(n) * r ** n
    if n == 2:
        return 2.0 * math.pi * (1.0 - math.cos(math.sqrt(kappa) * r)) / kappa
    val, err = integrate.quad(
        lambda rho: ball_perimeter(kappa, n, rho), 0.0, r,
        epsabs=1e-12, epsrel=1e-12, limit=200,
    )
    return val


def ball_metrics(kappa: float, n: int, r: float) -> BallSpec:
    """Area and perimeter of the geodesic ball of radius r."""
    return BallSpec(radius=float(r),
                    area=ball_area(kappa, n, r),
                    perimeter=float(ball_perimeter(kappa, n, r)))


def model_space_volume(kappa: float, n: int) -> float:
    """Total volume of the model space M_kappa (+inf for the plane)."""
    if kappa == 0.0:
        return math.inf
    return ball_area(kappa, n, myers_radius(kappa))


def inverse_ball_area(kappa: float, n: int, area: float) -> float:
    """Radius of the geodesic ball with prescribed n-volume.

    Monotone inverse of ``ball_area``; accurate to 1e-12 relative.
    """
    if area < 0.0:
        raise GeometryError("ball area must be nonnegative")
    if area == 0.0:
        return 0.0
    if kappa == 0.0:
        return (area / unit_ball_volume(n)) ** (1.0 / n)
    total = model_space_volume(kappa, n)
    if area > total * _MYERS_SLACK:
        raise GeometryError(
            f"area {area:.6g} exceeds the model space volume {total:.6g}"
        )
    rmax = myers_radius(kappa)
    if n == 2:
        c = 1.0 - kappa * min(area, total) / (2.0 * math.pi)
        return math.acos(min(1.0, max(-1.0, c))) / math.sqrt(kappa)
    if area >= total:
        return rmax
    return optimize.brentq(
        lambda r: ball_area(kappa, n, r) - area, 0.0, rmax,
        xtol=1e-15, rtol=8.9e-16, maxiter=200,
    )


def iso_profile_a(kappa: float, n: int, s: float) -> float:
    """Isoperimetric profile s^{(n-1)/n} / perimeter(ball of volume s).

    Constant 1/(n omega_n^{1/n}) in the flat case; strictly increasing in s
    for kappa > 0.
    """
    if s <= 0.0:
        raise GeometryError("volume must be positive")
    if kappa == 0.0:
        return 1.0 / (n * unit_ball_volume(n) ** (1.0 / n))
    r = inverse_ball_area(kappa, n, s)
    per = float(ball_perimeter(kappa, n, r))
    if per <= 0.0:
        raise GeometryError("isoperimetric profile undefined at the full model space")
    return s ** ((n - 1.0) / n) / per


@dataclass(frozen=True)
class Manifold:
    """Ambient space description: plane, round sphere, or flat cone.

    ``kappa`` is the sectional curvature (zero except for the sphere) and
    ``cone_angle_fraction`` the total cone angle divided by 2*pi (1 unless the
    kind is ``cone``).  The asymptotic volume ratio ``theta`` is 1 for the
    plane and the full sphere and equals the angle fraction for a cone.
    """

    kind: str
    kappa: float = 0.0
    cone_angle_fraction: float = 1.0
    dim: int = 2

    def __post_init__(self):
        if self.kind not in ("plane", "sphere", "cone"):
            raise GeometryError(f"unknown manifold kind {self.kind!r}")
        if self.dim < 2:
            raise GeometryError("dimension must be at least 2")
        if self.kind == "plane":
            if self.kappa != 0.0 or self.cone_angle_fraction != 1.0:
                raise GeometryError("plane requires kappa=0 and angle fraction 1")
        elif self.kind == "sphere":
            if self.kappa <= 0.0:
                raise GeometryError("sphere requires kappa > 0")
            if self.cone_angle_fraction != 1.0:
                raise GeometryError("sphere requires angle fraction 1")
        elif self.kind == "cone":
            if self.kappa != 0.0:
                raise GeometryError("cone requires kappa = 0")
            if not 0.0 < self.cone_angle_fraction <= 1.0:
                raise GeometryError("cone angle fraction must lie in (0, 1]")

    @classmethod
    def plane(cls, dim: int = 2) -> "Manifold":
        return cls(kind="plane", dim=dim)

    @classmethod
    def sphere(cls, kappa: float = 1.0, dim: int = 2) -> "Manifold":
        return cls(kind="sphere", kappa=kappa, dim=dim)

    @classmethod
    def cone(cls, angle_fraction: float) -> "Manifold":
        return cls(kind="cone", cone_angle_fraction=angle_fraction)

    @property
    def theta(self) -> float:
        return theta_of(self)

    @property
    def model_volume(self) -> float:
        """Volume of the comparison model space M_kappa."""
        return model_space_volume(self.kappa, self.dim)


def theta_of(m: Manifold) -> float:
    """Asymptotic volume ratio of the ambient space; always in (0, 1]."""
    if m.kind == "cone":
        return m.cone_angle_fraction
    return 1.0
