"""Closed-form model-space quantities: areas, perimeters, inverses, theta."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from symcomp.geometry import (GeometryError, Manifold, ball_area, ball_metrics,
                              ball_perimeter, inverse_ball_area, iso_profile_a,
                              model_space_volume, myers_radius, sn, sn_prime,
                              theta_of, unit_ball_volume, unit_sphere_area)


def test_unit_ball_and_sphere_constants():
    assert unit_ball_volume(2) == pytest.approx(math.pi)
    assert unit_ball_volume(3) == pytest.approx(4.0 * math.pi / 3.0)
    assert unit_sphere_area(2) == pytest.approx(2.0 * math.pi)
    assert unit_sphere_area(3) == pytest.approx(4.0 * math.pi)


def test_flat_ball_formulas():
    assert ball_area(0.0, 2, 2.0) == pytest.approx(4.0 * math.pi)
    assert ball_perimeter(0.0, 2, 2.0) == pytest.approx(4.0 * math.pi)
    assert ball_area(0.0, 3, 1.5) == pytest.approx(4.0 * math.pi / 3.0 * 1.5 ** 3)


def test_sphere_cap_area_formula():
    # 2 pi (1 - cos(sqrt(kappa) r)) / kappa
    assert ball_area(1.0, 2, math.pi / 2) == pytest.approx(2.0 * math.pi)
    assert ball_area(4.0, 2, math.pi / 2) == pytest.approx(math.pi)
    # the full sphere of curvature kappa has area 4 pi / kappa
    assert model_space_volume(1.0, 2) == pytest.approx(4.0 * math.pi)
    assert model_space_volume(0.25, 2) == pytest.approx(16.0 * math.pi)
    assert model_space_volume(0.0, 2) == math.inf


def test_perimeter_is_area_derivative():
    kappa, r, dr = 0.7, 0.9, 1e-6
    num = (ball_area(kappa, 2, r + dr) - ball_area(kappa, 2, r - dr)) / (2 * dr)
    assert num == pytest.approx(float(ball_perimeter(kappa, 2, r)), rel=1e-8)


def test_sn_matches_sine_and_series_branch():
    assert sn(1.0, math.pi / 2) == pytest.approx(1.0)
    assert sn(0.0, 1.3) == 1.3
    # series branch (x < 1e-4) agrees with the sine branch continuation
    r = 5e-5
    assert sn(1.0, r) == pytest.approx(math.sin(r), rel=1e-14)
    assert sn_prime(1.0, 0.0) == 1.0
    assert sn_prime(0.0, 2.0) == 1.0


def test_radius_validation():
    with pytest.raises(GeometryError):
        sn(1.0, 4.0)  # beyond pi
    with pytest.raises(GeometryError):
        ball_area(1.0, 2, -0.1)
    assert myers_radius(4.0) == pytest.approx(math.pi / 2.0)
    with pytest.raises(GeometryError):
        myers_radius(-1.0)


@settings(max_examples=60, deadline=None)
@given(kappa=st.sampled_from([0.0, 0.5, 1.0, 2.0]),
       frac=st.floats(min_value=1e-3, max_value=0.999))
def test_inverse_ball_area_roundtrip(kappa, frac):
    rmax = 3.0 if kappa == 0.0 else myers_radius(kappa)
    r = frac * rmax
    area = ball_area(kappa, 2, r)
    assert inverse_ball_area(kappa, 2, area) == pytest.approx(r, abs=1e-9)


def test_inverse_ball_area_3d_roundtrip():
    for kappa in (0.0, 1.0):
        r = 0.8
        area = ball_area(kappa, 3, r)
        assert inverse_ball_area(kappa, 3, area) == pytest.approx(r, abs=1e-9)


def test_inverse_ball_area_validation():
    assert inverse_ball_area(1.0, 2, 0.0) == 0.0
    with pytest.raises(GeometryError):
        inverse_ball_area(1.0, 2, 100.0)  # exceeds the model space volume
    with pytest.raises(GeometryError):
        inverse_ball_area(0.0, 2, -1.0)


def test_iso_profile_flat_constant():
    # s^{1/2} / (2 sqrt(pi s)) = 1 / (2 sqrt(pi)), independent of s
    want = 1.0 / (2.0 * math.sqrt(math.pi))
    for s in (0.1, 1.0, 7.3):
        assert iso_profile_a(0.0, 2, s) == pytest.approx(want)
    assert iso_profile_a(0.0, 3, 1.0) == pytest.approx(
        1.0 / (3.0 * unit_ball_volume(3) ** (1.0 / 3.0)))


def test_iso_profile_sphere_increasing():
    vals = [iso_profile_a(1.0, 2, s) for s in (0.5, 1.0, 2.0, 6.0)]
    assert all(b > a for a, b in zip(vals, vals[1:]))
    with pytest.raises(GeometryError):
        iso_profile_a(1.0, 2, 0.0)


def test_ball_metrics_bundle():
    b = ball_metrics(0.0, 2, 1.0)
    assert (b.radius, b.area, b.perimeter) == pytest.approx(
        (1.0, math.pi, 2.0 * math.pi))


def test_manifold_theta_values():
    assert Manifold.plane().theta == 1.0
    assert Manifold.sphere(1.0).theta == 1.0
    assert Manifold.cone(0.75).theta == 0.75
    assert theta_of(Manifold.cone(0.3)) == 0.3


def test_manifold_validation():
    with pytest.raises(GeometryError):
        Manifold(kind="torus")
    with pytest.raises(GeometryError):
        Manifold.sphere(0.0)
    with pytest.raises(GeometryError):
        Manifold.cone(1.5)
    with pytest.raises(GeometryError):
        Manifold(kind="plane", kappa=1.0)
    with pytest.raises(GeometryError):
        Manifold(kind="cone", kappa=1.0, cone_angle_fraction=0.5)
