"""
Ranking algorithms and correlating indicators
=============================================

Fake outputs of four "algorithms" on three problems, five points each so
the joint reference stays small enough for the exact subset DP. Each
algorithm is a noisy sample of a spherical front with its own distance
from the front and its own coverage. Every problem gets a table sorted by
dominance move against the joint non-dominated set, then the indicators
are correlated.
"""

import numpy as np

from mipdom import PointSet, build_report, correlate

rng = np.random.default_rng(11)


def sample(n, m, offset, arc):
    # points on the positive unit sphere, restricted to a fraction of the arc
    x = rng.random((n, m)) * arc + (1 - arc) / 2
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    return PointSet(x * (1 + offset + 0.02 * rng.random((n, 1))))


algos = {"alpha": (0.00, 1.0), "beta": (0.05, 0.9), "gamma": (0.10, 0.6), "delta": (0.20, 1.0)}
reports = []
for problem, m in (("sphere-2", 2), ("sphere-3", 3), ("sphere-4", 4)):
    sets = {name: sample(5, m, off, arc) for name, (off, arc) in algos.items()}
    doc = build_report(sets, problem=problem)
    reports.append(doc)
    print(doc.to_text())

print(correlate(reports).to_text())
