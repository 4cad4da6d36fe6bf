"""
The dominance move on a two-point example
=========================================

Two sets of two points each. We ask how far the points of P must travel
(Manhattan distance, only ever improving) until every point of Q is
weakly dominated, and look at the answer from every backend.
"""

import io

import numpy as np

from mipdom import PointSet, SolveOptions, build_model, dom, emit_lp, model_size, move_distance
from mipdom.exact2d import inward_clusters

P = PointSet([[2.0, 2.5], [3.0, 1.9]])
Q = PointSet([[2.2, 2.0], [3.0, 1.5]])

# how much each p would need to move to cover each q on its own
print("move_distance(p_i, q_j):")
for i, p in enumerate(P):
    print(f"  p{i + 1}", [round(move_distance(p, q), 3) for q in Q])

# the bi-objective method: clusters of Q points grow around points of P
clusters, iterations = inward_clusters(P, Q)
for c in clusters:
    print(f"cluster of p{c.p_index + 1}: q{[j + 1 for j in c.q_members]} "
          f"ideal point {c.representative.tolist()} cost {c.cost:.3g}")

# the same value from the exhaustive subset DP and the 2-D method
for backend in ("exact-dp", "exact-2d"):
    sol = dom(P, Q, SolveOptions(backend=backend))
    print(f"{backend:9s} DoM = {sol.value:.12g}  moved points {sol.moved_points.tolist()}")

# the mixed-integer model behind the external backend
model = build_model(P, Q)
print("model counts (continuous, binary, rows):", model.counts(), "=", model_size(2, 2, 2))
buf = io.StringIO()
emit_lp(model, buf)
print("\n".join(buf.getvalue().splitlines()[:6]), "\n  ...")

try:
    from mipdom import highs_command
    import highspy  # noqa: F401
except ImportError:
    print("highspy not installed, skipping the external solve")
else:
    sol = dom(P, Q, SolveOptions(backend="external", external_command=highs_command()))
    zp, zpq = sol.move_decomposition["zp"], sol.move_decomposition["zpq"]
    print(f"external  DoM = {sol.value:.12g}  (zp total {zp.sum():.3g}, zpq total {zpq.sum():.3g})")
    print("assignment q -> p:", {j + 1: i + 1 for j, i in sol.assignment.items()})
