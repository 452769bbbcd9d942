"""Exact distribution functions, rearrangements, and their identities."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from symcomp.fem import ScalarField, integrate_product
from symcomp.geometry import Manifold, inverse_ball_area
from symcomp.rearrange import (DistributionData, ExactDistribution,
                               RearrangedProfile, RearrangementError,
                               concentration_check, decreasing_rearrangement,
                               default_levels, distribution_function,
                               hardy_littlewood_check, level_polyline_length,
                               rearranged_profile, schwarz_profile)


def _single_triangle(A=2.0):
    """One flat triangle with corner values (0, 0, 1): mu(t) = A (1-t)^2."""
    return ExactDistribution(np.array([[0.0, 0.0, 1.0]]), np.array([A]))


def test_single_triangle_distribution_closed_form():
    A = 2.0
    dist = _single_triangle(A)
    t = np.linspace(0.0, 1.0, 101)
    assert np.max(np.abs(dist.mu(t) - A * (1.0 - t) ** 2)) < 1e-12
    # integral of u over {u > t}: int_t^1 s * 2A(1-s) ds
    want = A * (1.0 / 3.0 - t ** 2 + 2.0 * t ** 3 / 3.0)
    assert np.max(np.abs(dist.integral_above(t) - want)) < 1e-12
    assert dist.moment(1) == pytest.approx(A / 3.0, abs=1e-12)
    assert dist.moment(2) == pytest.approx(A / 6.0, abs=1e-12)


def test_single_triangle_quantile_inverse():
    A = 2.0
    dist = _single_triangle(A)
    s = np.linspace(0.0, A, 51)
    want = 1.0 - np.sqrt(s / A)
    assert np.max(np.abs(dist.quantile(s) - want)) < 1e-10


def test_mu_outside_value_range():
    dist = _single_triangle(3.0)
    assert dist.mu(np.array([-0.5]))[0] == pytest.approx(3.0)
    assert dist.mu(np.array([1.5]))[0] == 0.0


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(min_value=-5.0, max_value=5.0), min_size=2,
                max_size=12))
def test_piecewise_constant_cells_properties(values):
    values = np.asarray(values)
    measures = np.full(len(values), 0.5)
    dist = ExactDistribution.from_cells(values, measures)
    grid = np.linspace(values.min() - 1.0, values.max() + 1.0, 64)
    mu = dist.mu(grid)
    assert np.all(np.diff(mu) <= 1e-12 * dist.total)
    assert mu[0] == pytest.approx(dist.total)
    assert mu[-1] == 0.0
    assert dist.moment(1) == pytest.approx(float(np.sum(values * measures)),
                                           abs=1e-9)


def test_distribution_of_linear_field_on_disk(disk_mesh):
    # u = x on the unit disk: |{x > t}| is the circular-segment area
    u = ScalarField(disk_mesh, disk_mesh.vertices[:, 0].copy())
    for t in (0.0, 0.3, 0.7):
        seg = math.acos(t) - t * math.sqrt(1.0 - t * t)
        got = float(ExactDistribution.from_field(u).mu(np.array([t]))[0])
        assert got == pytest.approx(seg, abs=5e-3)


def test_partial_integral_endpoints(random_fields):
    u = random_fields[0]
    dist = ExactDistribution.from_field(u)
    assert float(dist.partial_integral(np.array([dist.total]))[0]) == \
        pytest.approx(dist.moment(1), rel=1e-9)
    assert float(dist.partial_integral(np.array([0.0]))[0]) == pytest.approx(
        0.0, abs=1e-12)


def test_to_table_monotone(random_fields):
    u = random_fields[1]
    levels = default_levels(u, count=256)
    table = distribution_function(u, levels)
    assert np.all(np.diff(table.measures) <= 0.0)
    assert table.total_measure == pytest.approx(u.mesh.area)


def test_default_levels_contains_vertex_values(random_fields):
    u = random_fields[2]
    levels = default_levels(u, count=64)
    assert np.all(np.diff(levels) > 0.0)
    for v in u.values[:10]:
        assert np.any(np.isclose(levels, v, rtol=0.0, atol=0.0))


def test_decreasing_rearrangement_is_nonincreasing():
    dist = _single_triangle(1.0)
    table = dist.to_table(np.linspace(0.0, 1.0, 200))
    s = np.linspace(0.0, 1.0, 100)
    prof = decreasing_rearrangement(table, s)
    assert np.all(np.diff(prof.values) <= 1e-12)
    assert prof.values[0] == pytest.approx(1.0, abs=1e-9)


def test_rearranged_profile_preserves_integral(random_fields):
    u = random_fields[3]
    prof = rearranged_profile(u)
    integral = float(np.trapezoid(prof.values, prof.s))
    exact = ExactDistribution.from_field(u).moment(1)
    assert integral == pytest.approx(exact, rel=1e-6)
    assert prof.values[0] == pytest.approx(float(np.max(u.values)), abs=1e-9)


def test_schwarz_profile_of_constant(disk_mesh):
    area = disk_mesh.area
    prof = RearrangedProfile(s=np.linspace(0.0, area, 33),
                             values=np.full(33, 2.5))
    m = Manifold.plane()
    sch = schwarz_profile(prof, 1.0, m)
    assert sch.R0 == pytest.approx(inverse_ball_area(0.0, 2, area))
    assert np.allclose(sch.values, 2.5)


def test_schwarz_profile_theta_scales_radius():
    prof = RearrangedProfile(s=np.linspace(0.0, 1.0, 17),
                             values=np.linspace(1.0, 0.0, 17))
    m = Manifold.cone(0.25)
    sch = schwarz_profile(prof, 0.25, m)
    # comparison ball holds |Omega| / theta of flat area
    assert sch.R0 == pytest.approx(inverse_ball_area(0.0, 2, 4.0))
    assert np.all(np.diff(sch.values) <= 1e-12)
    with pytest.raises(RearrangementError):
        schwarz_profile(prof, 1.5, m)


def test_hardy_littlewood_nonnegative(random_fields):
    for a, b in zip(random_fields[:3], random_fields[3:]):
        assert hardy_littlewood_check(a, b) >= -1e-8


def test_hardy_littlewood_equality_for_comonotone(disk_mesh):
    # f and g = 2 f are already similarly ordered: the inequality is tight
    rng = np.random.default_rng(5)
    f = ScalarField(disk_mesh, rng.uniform(0.0, 1.0, disk_mesh.num_vertices))
    g = ScalarField(disk_mesh, 2.0 * f.values)
    ref = integrate_product(f, g)
    assert abs(hardy_littlewood_check(f, g)) <= 1e-6 * ref


def test_concentration_constant_source_passes():
    s = np.linspace(0.0, 1.0, 257)
    fstar = RearrangedProfile(s=s, values=np.full(len(s), 3.0))
    assert concentration_check(fstar, 3, 1.0) >= -1e-12


def test_concentration_spike_fails():
    # all mass on the first tenth of the domain violates the condition
    s = np.linspace(0.0, 1.0, 1001)
    vals = np.where(s <= 0.1, 10.0, 0.0)
    fstar = RearrangedProfile(s=s, values=vals)
    assert concentration_check(fstar, 3, 1.0) < -0.1


def test_concentration_requires_nonincreasing():
    s = np.linspace(0.0, 1.0, 11)
    with pytest.raises(RearrangementError):
        concentration_check(RearrangedProfile(s=s, values=s.copy()), 3, 1.0)


def test_level_polyline_length_on_disk(disk_mesh):
    # u = x: the level line {x = t} is a chord of length 2 sqrt(1 - t^2)
    u = ScalarField(disk_mesh, disk_mesh.vertices[:, 0].copy())
    for t in (0.0, 0.5):
        want = 2.0 * math.sqrt(1.0 - t * t)
        assert level_polyline_length(u, t) == pytest.approx(want, rel=5e-3)


def test_level_polyline_empty_above_max(disk_solution):
    top = float(np.max(disk_solution.values))
    assert level_polyline_length(disk_solution, top + 1.0) == 0.0
