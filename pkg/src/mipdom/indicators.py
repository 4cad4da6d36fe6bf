"""Companion quality indicators and the correlation test used to compare them.

All indicators follow the minimization convention. ``additive_epsilon``
and ``igd_plus`` compare a set against a reference set; ``hypervolume``
needs a reference point instead.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy.special import betainc

from .core import PointSet, nondominated_indices
from .errors import InvalidInputError

__all__ = [
    "IndicatorRow",
    "CorrelationResult",
    "additive_epsilon",
    "igd_plus",
    "hypervolume",
    "pearson",
    "HV_MAX_OBJECTIVES",
    "HV_MAX_POINTS",
]

HV_MAX_OBJECTIVES = 10
HV_MAX_POINTS = 100
ALPHA = 0.05


@dataclass(frozen=True)
class IndicatorRow:
    algorithm: str
    dom_value: float
    hv_value: float
    igd_plus_value: float
    eps_additive_value: float

    def __post_init__(self):
        vals = (self.dom_value, self.hv_value, self.igd_plus_value, self.eps_additive_value)
        if not all(math.isfinite(v) for v in vals):
            raise InvalidInputError(f"non-finite indicator value in row {self.algorithm!r}")
        if self.dom_value < 0 or self.hv_value < 0:
            raise InvalidInputError(f"negative DoM or HV in row {self.algorithm!r}")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class CorrelationResult:
    r: float
    p_value: float
    n: int

    @property
    def significant(self) -> bool:
        return self.p_value <= ALPHA

    def to_dict(self) -> dict:
        return {"r": self.r, "p_value": self.p_value, "n": self.n, "significant": self.significant}


def _pair(a, b) -> tuple[np.ndarray, np.ndarray]:
    A = a.points if isinstance(a, PointSet) else np.atleast_2d(np.asarray(a, dtype=float))
    B = b.points if isinstance(b, PointSet) else np.atleast_2d(np.asarray(b, dtype=float))
    if A.shape[1] != B.shape[1]:
        raise InvalidInputError(f"dimension mismatch: {A.shape[1]} vs {B.shape[1]} objectives")
    return A, B


def additive_epsilon(p, q) -> float:
    """Smallest shift that makes ``p`` weakly dominate every point of ``q``.

    ``max_q min_p max_m (p_m - q_m)``; zero or negative when ``p`` already
    covers ``q``.
    """
    P, Q = _pair(p, q)
    shift = (P[:, None, :] - Q[None, :, :]).max(axis=2)
    return float(shift.min(axis=0).max())


def igd_plus(a, ref) -> float:
    """Inverted generational distance plus of ``a`` against a reference set.

    Mean over reference points of the dominance-aware distance
    ``sqrt(sum_m max(a_m - r_m, 0)^2)`` to the closest member of ``a``.
    """
    A, R = _pair(a, ref)
    d = np.sqrt((np.maximum(A[:, None, :] - R[None, :, :], 0.0) ** 2).sum(axis=2))
    return float(d.min(axis=0).mean())


def hypervolume(s, ref_point) -> float:
    """Exact hypervolume of ``s`` with respect to ``ref_point``.

    Points that are worse than the reference point in some objective are
    discarded first. Uses the WFG exclusive-volume recursion, which is
    exponential in the worst case, so inputs are capped at
    ``HV_MAX_OBJECTIVES`` objectives and ``HV_MAX_POINTS`` points.
    """
    pts = s.points if isinstance(s, PointSet) else np.atleast_2d(np.asarray(s, dtype=float))
    ref = np.asarray(ref_point, dtype=float)
    if ref.ndim != 1 or ref.shape[0] != pts.shape[1]:
        raise InvalidInputError(
            f"dimension mismatch: reference point has {ref.size}, points have {pts.shape[1]}"
        )
    pts = pts[np.all(pts <= ref, axis=1)]
    if pts.shape[0] == 0:
        return 0.0
    pts = pts[nondominated_indices(pts)]
    if pts.shape[1] > HV_MAX_OBJECTIVES or pts.shape[0] > HV_MAX_POINTS:
        raise InvalidInputError(
            f"exact hypervolume refused for {pts.shape[0]} points in {pts.shape[1]} "
            f"objectives (limits: {HV_MAX_POINTS} points, {HV_MAX_OBJECTIVES} objectives)"
        )
    return float(_wfg(pts, ref))


def _hv2d(pts: np.ndarray, ref: np.ndarray) -> float:
    pts = pts[np.argsort(pts[:, 0], kind="stable")]
    vol, best_y = 0.0, ref[1]
    for x, y in pts:
        if y < best_y:
            vol += (ref[0] - x) * (best_y - y)
            best_y = y
    return vol


def _wfg(pts: np.ndarray, ref: np.ndarray) -> float:
    n, m = pts.shape
    if n == 0:
        return 0.0
    if n == 1:
        return float(np.prod(ref - pts[0]))
    if m == 1:
        return float(ref[0] - pts[:, 0].min())
    if m == 2:
        return _hv2d(pts, ref)
    # process worst-last-objective first so that limit sets shrink quickly
    pts = pts[np.argsort(-pts[:, -1], kind="stable")]
    total = 0.0
    for k in range(n):
        box = float(np.prod(ref - pts[k]))
        rest = pts[k + 1:]
        if rest.shape[0]:
            limited = np.maximum(rest, pts[k])
            limited = limited[nondominated_indices(limited)]
            box -= _wfg(limited, ref)
        total += box
    return total


def pearson(x, y) -> CorrelationResult:
    """Sample Pearson correlation with a two-sided Student-t significance test."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.ndim != 1 or x.shape != y.shape:
        raise InvalidInputError("pearson needs two 1-D sequences of equal length")
    n = x.size
    if n < 3:
        raise InvalidInputError(f"pearson needs at least 3 samples, got {n}")
    dx, dy = x - x.mean(), y - y.mean()
    sxx, syy = float(dx @ dx), float(dy @ dy)
    if sxx == 0.0 or syy == 0.0:
        raise InvalidInputError("correlation undefined: zero variance")
    r = float(np.clip((dx @ dy) / math.sqrt(sxx * syy), -1.0, 1.0))
    df = n - 2
    if abs(r) == 1.0:
        p = 0.0
    else:
        t2 = r * r * df / (1.0 - r * r)
        # two-sided tail of Student-t: I_{df/(df+t^2)}(df/2, 1/2)
        p = float(betainc(df / 2.0, 0.5, df / (df + t2)))
    return CorrelationResult(r=r, p_value=min(max(p, 0.0), 1.0), n=n)
