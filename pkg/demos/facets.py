"""
Convergence, spread, uniformity and cardinality
===============================================

Pairs of sets on the linear front f1 + f2 = 1 that differ in exactly one
quality aspect. In every pair the first set is the better one, and the
dominance move agrees: moving it onto the other set is cheaper than the
reverse.
"""

import numpy as np

from mipdom import PointSet, dom


def front(t):
    t = np.asarray(t, dtype=float)
    return PointSet(np.column_stack([t, 1 - t]))


pairs = {
    "convergence": (front(np.linspace(0, 1, 8)), PointSet(front(np.linspace(0, 1, 8)).points + 0.1)),
    "spread": (front(np.linspace(0, 1, 8)), front(np.linspace(0.3, 0.7, 8))),
    "uniformity": (front(np.linspace(0, 1, 9)),
                   front(np.r_[np.linspace(0, 0.15, 4), np.linspace(0.85, 1, 5)])),
    "cardinality": (front(np.linspace(0, 1, 15)), front(np.linspace(0, 1, 5))),
}

print(f"{'facet':12s} {'DoM(A,B)':>10s} {'DoM(B,A)':>10s}")
for name, (a, b) in pairs.items():
    ab, ba = dom(a, b).value, dom(b, a).value
    print(f"{name:12s} {ab:10.4f} {ba:10.4f}  {'ok' if ab < ba else 'unexpected'}")
