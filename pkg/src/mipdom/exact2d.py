"""Exact dominance move for two objectives by inward-neighbour clustering.

Each point of Q starts as its own cluster. A cluster is repeatedly joined
with its inward neighbour (the node of ``R = P u Q`` that needs the least
movement to weakly dominate it) until every cluster owns a point of P:

1. dominated points are removed from both sets, and points of Q already
   covered by P are dropped;
2. every Q-cluster whose inward neighbour is a free point of P claims that
   point (first claim wins);
3. mutual inward neighbours form a loop and are collapsed into one cluster
   whose representative is their ideal point;
4. when no loop is left, a Q-cluster pointing at a cluster that already
   owns a point of P joins it; failing that, a longer cycle of Q-clusters
   is collapsed into its ideal point.

Steps 3 and 4 repeat until nothing changes. Moving the owner of a cluster
on to its ideal point costs exactly the accumulated inward distances, so
the cluster costs sum to the dominance move.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .core import PointSet, prefilter_pair
from .errors import BackendError, InvalidInputError
from .solver import DomSolution, _exact_solution, _lift

__all__ = ["Cluster", "move_distance", "inward_neighbor", "inward_clusters", "dom_2d"]


def move_distance(b, a) -> float:
    """Manhattan move that ``b`` needs in order to weakly dominate ``a``."""
    b, a = np.asarray(b, dtype=float), np.asarray(a, dtype=float)
    if b.shape != a.shape:
        raise InvalidInputError(f"dimension mismatch: {b.size} vs {a.size} objectives")
    return float(np.maximum(0.0, b - a).sum())


def inward_neighbor(a, r, *, return_index: bool = False):
    """Member of ``r`` with the smallest :func:`move_distance` onto ``a``.

    Ties go to the lowest index of ``r``. ``a`` itself must not be in ``r``.
    """
    pts = r.points if isinstance(r, PointSet) else np.asarray(r, dtype=float)
    if pts.ndim != 2 or pts.shape[0] == 0:
        raise InvalidInputError("inward neighbour of an empty set")
    a = np.asarray(a, dtype=float)
    if pts.shape[1] != a.shape[0]:
        raise InvalidInputError("dimension mismatch")
    k = int(np.argmin(np.maximum(0.0, pts - a).sum(axis=1)))
    return k if return_index else pts[k]


@dataclass
class Cluster:
    """A subset of R: at most one point of P plus the points of Q it must cover."""

    representative: np.ndarray
    p_index: int | None = None
    q_members: list[int] = field(default_factory=list)
    cost: float = 0.0

    @property
    def owned(self) -> bool:
        return self.p_index is not None

    @property
    def members(self) -> list[tuple[str, int]]:
        head = [] if self.p_index is None else [("P", self.p_index)]
        return head + [("Q", j) for j in self.q_members]


def _merge(a: Cluster, b: Cluster) -> Cluster:
    if b.owned:
        a, b = b, a
    cost = a.cost + (move_distance(a.representative, b.representative) if a.owned else 0.0)
    return Cluster(
        representative=np.minimum(a.representative, b.representative),
        p_index=a.p_index,
        q_members=sorted(a.q_members + b.q_members),
        cost=cost,
    )


def _neighbours(nodes: list[Cluster]) -> np.ndarray:
    reps = np.array([c.representative for c in nodes])
    # d[b, a]: move of b onto a
    d = np.maximum(0.0, reps[:, None, :] - reps[None, :, :]).sum(axis=2)
    np.fill_diagonal(d, np.inf)
    return np.argmin(d, axis=0)


def _q_cycle(nodes: list[Cluster], nb: np.ndarray) -> list[int] | None:
    """First cycle of the neighbour graph made only of unowned clusters."""
    for start, c in enumerate(nodes):
        if c.owned:
            continue
        seen: dict[int, int] = {}
        k = start
        while k not in seen and not nodes[k].owned:
            seen[k] = len(seen)
            k = int(nb[k])
        if k in seen and not nodes[k].owned:
            cyc, x = [k], int(nb[k])
            while x != k:
                cyc.append(x)
                x = int(nb[x])
            return sorted(cyc)
    return None


def _replace(nodes: list[Cluster], idx: list[int], merged: Cluster) -> None:
    lo = min(idx)
    for k in sorted(idx, reverse=True):
        del nodes[k]
    nodes.insert(lo, merged)


def inward_clusters(p, q) -> tuple[list[Cluster], int]:
    """Run the clustering on an already prefiltered bi-objective pair.

    Returns the final clusters (points of P that cover nothing stay as
    singleton clusters) and the number of collapse iterations.
    """
    P = p.points if isinstance(p, PointSet) else np.asarray(p, dtype=float)
    Q = q.points if isinstance(q, PointSet) else np.asarray(q, dtype=float)
    nodes = [Cluster(P[i].copy(), p_index=i) for i in range(P.shape[0])]
    nodes += [Cluster(Q[j].copy(), q_members=[j]) for j in range(Q.shape[0])]
    n_p = P.shape[0]

    # step 2: claims on free points of P, against the initial R
    nb = _neighbours(nodes)
    claimed: dict[int, int] = {}
    for k in range(n_p, len(nodes)):
        r = int(nb[k])
        if r < n_p and r not in claimed:
            claimed[r] = k
    for r, k in claimed.items():
        nodes[r] = _merge(nodes[r], nodes[k])
    for k in sorted(claimed.values(), reverse=True):
        del nodes[k]

    # steps 3-4
    iterations = 0
    while any(not c.owned for c in nodes):
        nb = _neighbours(nodes)
        group = None
        for a, c in enumerate(nodes):
            b = int(nb[a])
            if c.q_members and int(nb[b]) == a and not (c.owned and nodes[b].owned):
                group = [a, b]
                break
        if group is None:
            for a, c in enumerate(nodes):
                if not c.owned and nodes[int(nb[a])].owned:
                    group = [a, int(nb[a])]
                    break
        if group is None:
            cyc = _q_cycle(nodes, nb)
            if cyc is not None and len(cyc) > 2:
                group = cyc
        if group is None:
            raise BackendError("inward-neighbour clustering stalled")
        merged = nodes[group[0]]
        for k in group[1:]:
            merged = _merge(merged, nodes[k])
        _replace(nodes, group, merged)
        iterations += 1
        if iterations > Q.shape[0]:
            raise BackendError("inward-neighbour clustering did not converge")
    return nodes, iterations


def dom_2d(p: PointSet, q: PointSet) -> DomSolution:
    """Exact dominance move of ``p`` onto ``q`` for bi-objective sets."""
    if not isinstance(p, PointSet):
        p = PointSet(p)
    if not isinstance(q, PointSet):
        q = PointSet(q)
    if p.m_dim != 2 or q.m_dim != 2:
        raise InvalidInputError(
            f"the inward-neighbour method needs 2 objectives, got {p.m_dim} and {q.m_dim}"
        )
    t0 = time.perf_counter()
    pre = prefilter_pair(p, q)
    P = pre.p_reduced.points
    if pre.fully_covered:
        sol = _exact_solution(P, q.points[:0], np.zeros(0, dtype=int), "exact-2d")
        return _lift(sol, p, q, pre, time.perf_counter() - t0)

    Q = pre.q_reduced.points
    clusters, iterations = inward_clusters(P, Q)
    owner = np.empty(Q.shape[0], dtype=int)
    for c in clusters:
        for j in c.q_members:
            owner[j] = c.p_index
    sol = _exact_solution(
        P, Q, owner, "exact-2d",
        extra={"iterations": iterations, "cluster_cost": sum(c.cost for c in clusters)},
    )
    return _lift(sol, p, q, pre, time.perf_counter() - t0)
