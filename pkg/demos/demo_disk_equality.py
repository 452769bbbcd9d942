"""Equality case: the unit disk is its own symmetrization.

With f = 1 and a constant Robin coefficient on the unit disk, the symmetrized
problem is the original problem, so every comparison margin should collapse to
discretization noise.  This script solves the bundled disk configuration,
prints the margins next to their tolerances, and evaluates the solution
against the closed form u(r) = (1 - r^2)/4 + 1/(2 beta).
"""

import numpy as np

from symcomp.cli import load_config, run_case

cfg = load_config("disk_equality")
report, artifacts = run_case(cfg)

print("Equality case on the unit disk (f = 1, beta = 1)")
print(f"  mesh: h = {report.case['h']}, {report.case['vertices']} vertices, "
      f"area {report.case['area']:.6f} (pi = {np.pi:.6f})")
print(f"  closed form says u(0) = 0.75 and u|boundary = 0.5; the solver "
      f"found max {report.case['u_max']:.5f}, boundary min "
      f"{report.case['u_boundary_min']:.5f}")
print()
print("  check            margin        tolerance     verdict")
for e in report.entries:
    print(f"  {e.name:<16} {e.margin:>12.3e}  {e.tolerance:>12.3e}  {e.verdict}")
print()
print("Every margin sits inside its tolerance band: the inequalities hold")
print("with equality up to mesh resolution, exactly as they must when the")
print("domain already is the comparison ball.  Note the converse does not")
print("follow numerically: margins within tolerance never prove the domain")
print("is a ball, they only fail to distinguish it from one at this h.")
