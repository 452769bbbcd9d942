"""Radial comparison problem: quadrature solver versus closed forms."""

import math

import numpy as np
import pytest

from symcomp.geometry import Manifold, ball_perimeter, inverse_ball_area
from symcomp.mesh import BoundaryField
from symcomp.radial import (RadialError, RadialProfile, beta_bar,
                            closed_form_cap, closed_form_disk,
                            monotonicity_report, radial_distribution,
                            radial_lp_norm, solve_radial)


def _const_source(R, value=1.0):
    r = np.linspace(0.0, R, 9)
    return RadialProfile(r=r, values=np.full(len(r), value))


def test_closed_form_disk_values():
    prof = closed_form_disk(1.0, 1.0)
    assert prof.values[0] == pytest.approx(0.75)
    assert prof.boundary_value == pytest.approx(0.5)
    # Robin closure: phi'(R) + beta phi(R) = 0 with phi'(R) = -R/2
    dr = prof.r[-1] - prof.r[-2]
    dphi = (prof.values[-1] - prof.values[-2]) / dr
    assert dphi + 1.0 * prof.boundary_value == pytest.approx(0.0, abs=1e-3)


def test_solver_matches_disk_oracle():
    m = Manifold.plane()
    got = solve_radial(_const_source(1.0), m, 2, 1.0, 1.0)
    want = (1.0 - got.r ** 2) / 4.0 + 0.5
    assert np.max(np.abs(got.values - want)) < 1e-8


def test_solver_matches_cap_oracle():
    m = Manifold.sphere(1.0)
    R0 = math.pi / 3.0
    got = solve_radial(_const_source(R0), m, 2, R0, 1.0)
    want = math.tan(R0 / 2.0) - 2.0 * (math.log(math.cos(R0 / 2.0))
                                       - np.log(np.cos(got.r / 2.0)))
    assert np.max(np.abs(got.values - want)) < 1e-8


def test_solver_scales_linearly_in_source():
    m = Manifold.plane()
    v1 = solve_radial(_const_source(1.0, 1.0), m, 2, 1.0, 1.0)
    v2 = solve_radial(_const_source(1.0, 2.0), m, 2, 1.0, 1.0)
    assert np.allclose(v2.values, 2.0 * v1.values, rtol=1e-12, atol=1e-14)


def test_solution_is_strictly_decreasing():
    m = Manifold.plane()
    v = solve_radial(_const_source(1.0), m, 2, 1.0, 1.0)
    assert monotonicity_report(v) < 0.0


def test_solver_validation():
    m = Manifold.plane()
    with pytest.raises(RadialError):
        solve_radial(_const_source(1.0), m, 2, 1.0, 0.0)
    with pytest.raises(RadialError):
        solve_radial(_const_source(1.0), m, 2, -1.0, 1.0)
    r = np.linspace(0.0, 1.0, 9)
    with pytest.raises(RadialError):
        solve_radial(RadialProfile(r=r, values=np.full(9, -1.0)), m, 2, 1.0, 1.0)
    with pytest.raises(RadialError):
        solve_radial(RadialProfile(r=r, values=np.zeros(9)), m, 2, 1.0, 1.0)
    with pytest.raises(RadialError):
        solve_radial(_const_source(4.0), Manifold.sphere(1.0), 2, 4.0, 1.0)


def test_radial_profile_validation():
    with pytest.raises(RadialError):
        RadialProfile(r=np.array([0.1, 0.2]), values=np.array([1.0, 2.0]))
    with pytest.raises(RadialError):
        RadialProfile(r=np.array([0.0, 0.0]), values=np.array([1.0, 2.0]))


def test_beta_bar_constant_disk(disk_mesh):
    # constant beta on a disk: beta_bar = beta * |circle| / |mesh polygon|,
    # barely above beta for a fine polygon
    beta = BoundaryField.constant(disk_mesh, 2.0)
    bb = beta_bar(beta, disk_mesh, Manifold.plane())
    R0 = inverse_ball_area(0.0, 2, disk_mesh.area)
    want = 2.0 * 2.0 * math.pi * R0 / disk_mesh.perimeter
    assert bb == pytest.approx(want, rel=1e-12)
    assert bb == pytest.approx(2.0, rel=2e-3)


def test_beta_bar_harmonic_mean(disk_mesh):
    # two arcs of values 1 and 2 in equal lengths: the harmonic mean 4/3
    # governs the symmetrized constant
    beta = BoundaryField.from_arcs(disk_mesh, ((0.0, 0.5, 1.0), (0.5, 1.0, 2.0)))
    bb = beta_bar(beta, disk_mesh, Manifold.plane())
    assert bb == pytest.approx(4.0 / 3.0, rel=5e-3)


def test_l1_norm_of_disk_solution():
    # int ((1 - r^2)/4 + 1/2) over the unit disk = 5 pi / 8
    prof = closed_form_disk(1.0, 1.0, num=4097)
    assert radial_lp_norm(prof, 1) == pytest.approx(5.0 * math.pi / 8.0,
                                                    rel=1e-10)


def test_l2_norm_against_quadrature():
    prof = closed_form_disk(1.0, 1.0, num=4097)
    r = prof.r
    want = math.sqrt(float(np.trapezoid(prof.values ** 2 * 2.0 * math.pi * r, r)))
    assert radial_lp_norm(prof, 2) == pytest.approx(want, rel=1e-6)


def test_radial_distribution_disk_closed_form():
    # v(r) = (1 - r^2)/4 + 1/2: mu_v(t) = pi (3 - 4 t) on [1/2, 3/4]
    prof = closed_form_disk(1.0, 1.0, num=4097)
    levels = np.array([0.55, 0.6, 0.7])
    table = radial_distribution(prof, levels)
    want = math.pi * (3.0 - 4.0 * levels)
    assert np.allclose(table.measures, want, rtol=1e-6)
    # below the boundary value the whole ball is above the level
    low = radial_distribution(prof, np.array([0.1]))
    assert low.measures[0] == pytest.approx(math.pi, rel=1e-9)
    high = radial_distribution(prof, np.array([1.0]))
    assert high.measures[0] == 0.0


def test_radial_distribution_monotone():
    prof = closed_form_cap(1.0, math.pi / 3.0, 1.0)
    levels = np.linspace(0.0, 1.0, 64)
    table = radial_distribution(prof, levels)
    assert np.all(np.diff(table.measures) <= 0.0)


def test_sphere_comparison_radius_respects_myers():
    with pytest.raises(RadialError):
        _const_source(1.0).__class__(r=np.linspace(0.0, 4.0, 9),
                                     values=np.ones(9), kappa=1.0)
