"""
Stopping early: gap-bounded solves
==================================

With a relative gap target the MIP solver may stop before proving
optimality. It still returns a valid interval: the best bound is below the
true dominance move and the incumbent is above it. For instances this
small the subset DP gives the exact value to check against.
"""

import numpy as np

from mipdom import PointSet, SolveOptions, dom, highs_command, solve_dp_exact

try:
    import highspy  # noqa: F401
except ImportError:
    raise SystemExit("this demo needs highspy for the external MIP backend")

rng = np.random.default_rng(0)
P, Q = PointSet(rng.random((10, 3))), PointSet(rng.random((12, 3)))
exact = solve_dp_exact(P, Q).value
print(f"exact DoM {exact:.6f}")

for gap in (0.5, 0.2, 0.1, 1e-8):
    sol = dom(P, Q, SolveOptions(backend="external", external_command=highs_command(),
                                 relative_gap_target=gap))
    lo, hi = sol.interval
    print(f"gap target {gap:<6g} -> [{lo:.6f}, {hi:.6f}]  gap {sol.gap:.3f}  {sol.status.value}"
          f"  contains exact: {lo <= exact + 1e-9 and exact <= hi + 1e-9}")
