"""Strict comparison: the unit square against its symmetrized ball.

The square is genuinely not a disk, so all comparison inequalities should
hold with strictly positive margins: the symmetrized Robin problem on the
ball of equal area concentrates the solution and pushes every norm up.  The
script runs the bundled square configuration and then repeats it with a
two-arc piecewise Robin coefficient to show that only the harmonic mean of
beta enters the comparison problem.
"""

from symcomp.cli import load_config, run_case

for tag, beta in (("constant beta = 1", None),
                  ("piecewise beta (1 on one half, 2 on the other)",
                   ("arcs", ((0.0, 0.5, 1.0), (0.5, 1.0, 2.0))))):
    cfg = load_config("square_robin")
    if beta is not None:
        cfg["beta"] = beta
    report, _ = run_case(cfg)
    print(f"Unit square, {tag}")
    print(f"  harmonic-mean Robin constant of the ball problem: "
          f"{report.case['beta_bar']:.5f}")
    print(f"  ||u||_L1 = {report.case['u_L1']:.5f} on the square, "
          f"v ranges over [{report.case['v_boundary']:.5f}, "
          f"{report.case['v_center']:.5f}] on the ball")
    for e in report.entries:
        strict = "strict" if e.margin > e.tolerance else "within tolerance"
        print(f"  {e.name:<16} margin {e.margin:>10.3e}  ({strict})")
    print()

print("The L1, boundary-minimum, and integrated level margins are strictly")
print("positive beyond tolerance: the square is measurably worse than the")
print("ball.  The pointwise distribution margin is zero only at saturated")
print("levels where both sides equal the full area.")
