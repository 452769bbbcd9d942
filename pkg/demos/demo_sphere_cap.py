"""Positive curvature: a geodesic cap on the round sphere.

On the unit sphere theta = 1 and the comparison domain of a geodesic cap is
the cap itself, so this is the curved analogue of the disk equality case.
The script solves the bundled cap configuration (geodesic radius pi/3) with
chordal P1 elements on the embedded triangulation and compares the pole
value against the radial quadrature oracle.
"""

import math

import numpy as np

from symcomp.cli import load_config, run_case
from symcomp.radial import closed_form_cap

cfg = load_config("sphere_cap")
report, _ = run_case(cfg)

R0 = math.pi / 3.0
oracle = closed_form_cap(1.0, R0, report.case["beta_bar"])
print("Geodesic cap of radius pi/3 on the unit sphere (f = 1, beta = 1)")
print(f"  mesh: {report.case['vertices']} vertices, area "
      f"{report.case['area']:.6f} vs exact {2.0 * math.pi * (1 - 0.5):.6f}")
print(f"  pole value: FEM {report.case['u_max']:.5f} vs radial oracle "
      f"{float(oracle.values[0]):.5f}")
print(f"  boundary value: FEM min {report.case['u_boundary_min']:.5f} vs "
      f"oracle {oracle.boundary_value:.5f}")
print()
for e in report.entries:
    print(f"  {e.name:<16} margin {e.margin:>10.3e}  tol {e.tolerance:.3e}  "
          f"{e.verdict}")
print()
print("As in the flat equality case the margins are discretization noise;")
print("the curved geometry enters through the warped ball area and the")
print("increasing isoperimetric profile, both of which the radial solver")
print("and the checks share.")
