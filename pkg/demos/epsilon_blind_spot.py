"""
Where the additive epsilon indicator loses information
======================================================

Two single-point sets in ten objectives. One is better in nine objectives
by one unit, the other is better in the last one by one unit. The
additive epsilon indicator sees a tie, the dominance move does not.
"""

from mipdom import PointSet, additive_epsilon, dom

p = PointSet([[0.0] * 9 + [1.0]])
q = PointSet([[1.0] * 9 + [0.0]])

print("eps(P, Q) =", additive_epsilon(p, q), "  eps(Q, P) =", additive_epsilon(q, p))
print("DoM(P, Q) =", dom(p, q).value, "  DoM(Q, P) =", dom(q, p).value)

# moving p one unit in the last objective is enough; q has to move in nine
print("P moves to", dom(p, q).moved_points[0].tolist())
print("Q moves to", dom(q, p).moved_points[0].tolist())
