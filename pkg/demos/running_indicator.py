"""
The dominance move as a running indicator
=========================================

A synthetic run keeps an archive of non-dominated points that improves
every generation. Each generation is compared against a few pivot
archives. A column is zero at its own pivot and can only go down, since
later archives weakly dominate earlier ones. The long-format table can be
plotted directly (one line per pivot).
"""

import numpy as np

from mipdom import PointSet, nondominated_filter, running_matrix
from mipdom.harness import RunSeries, running_csv

rng = np.random.default_rng(5)
archive, generations = None, []
for g in range(1, 51):
    # each generation offers a few candidates that slowly approach the origin
    cand = PointSet(rng.random((6, 3)) * (1.5 - g / 50))
    archive = cand if archive is None else nondominated_filter(archive.union(cand))
    if g % 10 == 0:
        generations.append((g, archive))

series = RunSeries(tuple(generations), pivots=(10, 30, 50))
cells = running_matrix(series)
print(running_csv(cells))

for pv in series.pivots:
    col = [c.dom for c in cells if c.pivot == pv]
    print(f"pivot {pv}: non-increasing = {all(b <= a + 1e-12 for a, b in zip(col, col[1:]))}")
