"""Numerical verification of symmetrization comparison results for the
Robin Poisson problem on two-dimensional space forms.

The package solves -Laplace(u) = f with du/dnu + beta u = 0 on meshed
domains in the plane, on the round sphere and on flat cones, builds the
exact piecewise-polynomial distribution function of the P1 solution,
solves the symmetrized radial problem on the comparison ball, and checks
the comparison inequalities (L1, pointwise, boundary minimum,
isoperimetric, integrated level-set) with mesh-resolution verdicts.
"""

from .geometry import (GeometryError, Manifold, BallSpec, ball_area,
                       ball_metrics, ball_perimeter, inverse_ball_area,
                       iso_profile_a, model_space_volume, myers_radius, sn,
                       sn_prime, theta_of, unit_ball_volume, unit_sphere_area)
from .mesh import (MeshError, Mesh, BoundaryField, DomainSpec, Disk, Ellipse,
                   Polygon, AnnularSector, ConeDisk, SphericalCap,
                   GeodesicPolygon, build_mesh, refine, split_boundary_field,
                   export_mesh, import_mesh)
from .fem import (SolverError, PositivityWarning, ScalarField, LinearSystem,
                  FieldStats, assemble, field_stats, integrate_product,
                  residual_check, solve_poisson_robin, solve_system)
from .rearrange import (RearrangementError, DistributionData, ExactDistribution,
                        RearrangedProfile, concentration_check, default_levels,
                        decreasing_rearrangement, distribution_function,
                        hardy_littlewood_check, level_polyline_length,
                        rearranged_profile, schwarz_profile)
from .radial import (RadialError, RadialProfile, beta_bar, closed_form_cap,
                     closed_form_disk, monotonicity_report, radial_distribution,
                     radial_lp_norm, solve_radial)
from .compare import (CompareError, CheckEntry, ComparisonReport,
                      boundary_level_integral, compute_F, default_tolerance,
                      verdict_for, verify_L1, verify_isoperimetric,
                      verify_level_inequality, verify_min_comparison,
                      verify_pointwise)

__version__ = "0.1.0"
