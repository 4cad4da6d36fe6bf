"""Point sets, dominance predicates and the preprocessing shared by every solver.

All objectives are minimized. A point ``p`` *weakly dominates* ``q`` when
``p[m] <= q[m]`` for every objective ``m``; it *dominates* ``q`` when, in
addition, at least one component is strictly smaller.
"""

from __future__ import annotations

import csv
import io
import os
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import InvalidInputError

__all__ = [
    "PointSet",
    "PrefilterOutcome",
    "Translation",
    "CsvFormatError",
    "weakly_leq",
    "dominates",
    "nondominated_indices",
    "nondominated_filter",
    "prefilter_pair",
    "translate_nonnegative",
    "minmax_normalize",
    "read_csv",
    "write_csv",
    "format_float",
]


def format_float(x: float) -> str:
    """Shortest decimal that survives a text round trip (17 significant digits)."""
    return format(float(x), ".17g")


class PointSet:
    """Immutable, duplicate-free ordered collection of objective vectors.

    Parameters
    ----------
    points : array_like, shape (n, m)
        Objective vectors, one per row. Must be finite and non-empty.
    labels : sequence of str, optional
        One identifier per input row.

    Exact duplicate rows are dropped at construction; the first occurrence
    (and its label) is kept, so indices always refer to the de-duplicated
    order.
    """

    __slots__ = ("_points", "_labels")

    def __init__(self, points, labels: Sequence[str] | None = None):
        arr = np.array(points, dtype=float, copy=True)
        if arr.ndim == 1 and arr.size > 0:
            arr = arr.reshape(1, -1)
        if arr.ndim != 2 or arr.shape[0] == 0 or arr.shape[1] == 0:
            raise InvalidInputError(
                f"a point set needs a non-empty (n, m) array, got shape {arr.shape}"
            )
        if not np.all(np.isfinite(arr)):
            raise InvalidInputError("point coordinates must be finite (no NaN or inf)")
        if labels is not None:
            labels = tuple(str(s) for s in labels)
            if len(labels) != arr.shape[0]:
                raise InvalidInputError(
                    f"got {len(labels)} labels for {arr.shape[0]} points"
                )

        _, first = np.unique(arr, axis=0, return_index=True)
        keep = np.sort(first)
        if keep.size != arr.shape[0]:
            arr = arr[keep]
            if labels is not None:
                labels = tuple(labels[k] for k in keep)

        arr.setflags(write=False)
        self._points = arr
        self._labels = labels

    @property
    def points(self) -> np.ndarray:
        """Read-only ``(n, m)`` array of objective vectors."""
        return self._points

    @property
    def m_dim(self) -> int:
        return self._points.shape[1]

    @property
    def labels(self) -> tuple[str, ...] | None:
        return self._labels

    def __len__(self) -> int:
        return self._points.shape[0]

    def __iter__(self) -> Iterator[np.ndarray]:
        return iter(self._points)

    def __getitem__(self, i) -> np.ndarray:
        return self._points[i]

    def __eq__(self, other) -> bool:
        if not isinstance(other, PointSet):
            return NotImplemented
        return self._points.shape == other._points.shape and bool(
            np.all(self._points == other._points)
        )

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"PointSet(n={len(self)}, m={self.m_dim})"

    def subset(self, indices: Iterable[int]) -> "PointSet":
        idx = list(indices)
        labels = None if self._labels is None else [self._labels[k] for k in idx]
        return PointSet(self._points[idx], labels)

    def union(self, other: "PointSet") -> "PointSet":
        """Concatenate two sets (duplicates across them are merged)."""
        _check_same_dim(self, other)
        if self._labels is None or other._labels is None:
            labels = None
        else:
            labels = self._labels + other._labels
        return PointSet(np.vstack([self._points, other._points]), labels)

    def translated(self, offset) -> "PointSet":
        return PointSet(self._points + np.asarray(offset, dtype=float), self._labels)

    def scaled(self, factor: float) -> "PointSet":
        return PointSet(self._points * float(factor), self._labels)


def _check_same_dim(a, b) -> None:
    ma = a.m_dim if isinstance(a, PointSet) else np.shape(a)[-1]
    mb = b.m_dim if isinstance(b, PointSet) else np.shape(b)[-1]
    if ma != mb:
        raise InvalidInputError(f"dimension mismatch: {ma} vs {mb} objectives")


def _as_vector(x) -> np.ndarray:
    v = np.asarray(x, dtype=float)
    if v.ndim != 1:
        raise InvalidInputError(f"expected an objective vector, got shape {v.shape}")
    return v


def weakly_leq(p, q) -> bool:
    """True iff ``p[m] <= q[m]`` for every objective."""
    p, q = _as_vector(p), _as_vector(q)
    if p.shape != q.shape:
        raise InvalidInputError(f"dimension mismatch: {p.size} vs {q.size} objectives")
    return bool(np.all(p <= q))


def dominates(p, q) -> bool:
    """Pareto dominance: ``p`` is no worse everywhere and strictly better somewhere."""
    p, q = _as_vector(p), _as_vector(q)
    if p.shape != q.shape:
        raise InvalidInputError(f"dimension mismatch: {p.size} vs {q.size} objectives")
    return bool(np.all(p <= q) and np.any(p < q))


def nondominated_indices(points) -> np.ndarray:
    """Indices of the mutually non-dominated rows of ``points``, in input order.

    Among exact duplicates only the first occurrence survives.
    """
    a = np.asarray(points, dtype=float)
    n = a.shape[0]
    if n == 0:
        return np.zeros(0, dtype=int)
    # leq[j, i]: row j weakly dominates row i
    leq = np.all(a[:, None, :] <= a[None, :, :], axis=2)
    equal = leq & leq.T
    strict = leq & ~equal
    dominated = strict.any(axis=0)
    # a later duplicate of an earlier row is dropped as well
    earlier_dup = np.triu(equal, k=1).any(axis=0)
    return np.flatnonzero(~(dominated | earlier_dup))


def nondominated_filter(s: PointSet) -> PointSet:
    """Maximal subset of mutually non-dominated points, order preserved."""
    keep = nondominated_indices(s.points)
    if keep.size == len(s):
        return s
    return s.subset(keep)


@dataclass(frozen=True)
class PrefilterOutcome:
    """Result of :func:`prefilter_pair`.

    ``p_index[k]`` / ``q_index[k]`` map row ``k`` of the reduced sets back
    to the original sets. ``zero_cost_covers`` pairs every original ``q``
    that is already weakly dominated by an original ``p`` with that ``p``.
    ``shadowed`` pairs the remaining dropped ``q`` (dominated inside ``Q``)
    with a surviving ``q`` that weakly dominates it; whatever covers the
    survivor covers it too.
    """

    p_reduced: PointSet
    q_reduced: PointSet | None
    p_index: np.ndarray
    q_index: np.ndarray
    zero_cost_covers: tuple[tuple[int, int], ...]
    shadowed: tuple[tuple[int, int], ...] = field(default=())

    @property
    def fully_covered(self) -> bool:
        return self.q_index.size == 0


def prefilter_pair(p: PointSet, q: PointSet) -> PrefilterOutcome:
    """Drop everything that cannot change the dominance move of ``p`` onto ``q``.

    Dominated points are removed inside each set, then every ``q`` already
    weakly dominated by some ``p`` is removed at zero cost.
    """
    _check_same_dim(p, q)
    pa, qa = p.points, q.points
    p_keep = nondominated_indices(pa)
    pk = pa[p_keep]

    # covered[k, j]: kept p_k weakly dominates q_j
    covered = np.all(pk[:, None, :] <= qa[None, :, :], axis=2)
    is_covered = covered.any(axis=0)
    covers = tuple(
        (int(j), int(p_keep[np.argmax(covered[:, j])]))
        for j in np.flatnonzero(is_covered)
    )

    q_nd = np.zeros(len(q), dtype=bool)
    q_nd[nondominated_indices(qa)] = True
    q_keep = np.flatnonzero(q_nd & ~is_covered)

    shadowed = []
    for j in np.flatnonzero(~q_nd & ~is_covered):
        dom_by = np.all(qa[q_keep] <= qa[j], axis=1)
        # transitivity guarantees a surviving weak dominator exists
        shadowed.append((int(j), int(q_keep[np.argmax(dom_by)])))

    return PrefilterOutcome(
        p_reduced=p.subset(p_keep),
        q_reduced=q.subset(q_keep) if q_keep.size else None,
        p_index=p_keep,
        q_index=q_keep,
        zero_cost_covers=covers,
        shadowed=tuple(shadowed),
    )


@dataclass(frozen=True)
class Translation:
    """A common per-objective shift applied to both sets of a pair."""

    offset: np.ndarray

    def apply(self, points) -> np.ndarray:
        return np.asarray(points, dtype=float) + self.offset

    def revert(self, points) -> np.ndarray:
        return np.asarray(points, dtype=float) - self.offset

    @property
    def is_identity(self) -> bool:
        return not np.any(self.offset)


def translate_nonnegative(p: PointSet, q: PointSet) -> tuple[PointSet, PointSet, Translation]:
    """Shift both sets by one offset so that every coordinate is ``>= 0``.

    ``offset[m] = max(0, -min(p[:, m], q[:, m]))``. Manhattan moves are
    translation invariant, so the dominance move is unchanged.
    """
    _check_same_dim(p, q)
    low = np.minimum(p.points.min(axis=0), q.points.min(axis=0))
    offset = np.maximum(0.0, -low)
    t = Translation(offset)
    if t.is_identity:
        return p, q, t
    return p.translated(offset), q.translated(offset), t


def minmax_normalize(values) -> np.ndarray:
    """Affine map onto ``[0, 1]``; a constant list maps to all zeros."""
    v = np.asarray(values, dtype=float)
    if v.ndim != 1 or v.size < 2:
        raise InvalidInputError("normalization needs at least two values")
    lo, hi = v.min(), v.max()
    if hi == lo:
        return np.zeros_like(v)
    return (v - lo) / (hi - lo)


class CsvFormatError(InvalidInputError):
    """A point-set CSV file could not be parsed."""

    def __init__(self, path, line: int, column: int | None, reason: str):
        self.path = str(path)
        self.line = line
        self.column = column
        where = f"{self.path}:{line}" + (f":{column}" if column is not None else "")
        super().__init__(f"{where}: {reason}")


def read_csv(source, *, name: str | None = None) -> PointSet:
    """Parse a point-set CSV file (path or text stream).

    One point per row with ``M`` comma-separated decimal fields. Lines
    starting with ``#`` and blank lines are skipped.
    """
    if isinstance(source, (str, os.PathLike)):
        name = name or str(source)
        with open(source, newline="") as fh:
            return _parse_csv(fh, name)
    return _parse_csv(source, name or "<stream>")


def _parse_csv(fh: io.TextIOBase, name: str) -> PointSet:
    rows: list[list[float]] = []
    width = None
    for lineno, raw in enumerate(fh, start=1):
        text = raw.strip()
        if not text or text.startswith("#"):
            continue
        fields = next(csv.reader([text]))
        if width is None:
            width = len(fields)
        elif len(fields) != width:
            raise CsvFormatError(
                name, lineno, None, f"expected {width} fields, found {len(fields)}"
            )
        row = []
        for col, tok in enumerate(fields, start=1):
            try:
                x = float(tok.strip())
            except ValueError:
                raise CsvFormatError(name, lineno, col, f"not a number: {tok.strip()!r}") from None
            if not np.isfinite(x):
                raise CsvFormatError(name, lineno, col, f"non-finite value {tok.strip()!r}")
            row.append(x)
        rows.append(row)
    if not rows:
        raise CsvFormatError(name, 0, None, "no points found")
    return PointSet(rows)


def write_csv(s: PointSet, dest, *, header: bool = True) -> None:
    """Write ``s`` so that :func:`read_csv` reproduces it bit for bit."""
    lines = []
    if header:
        lines.append("# " + ",".join(f"f{m + 1}" for m in range(s.m_dim)))
    lines.extend(",".join(format_float(x) for x in row) for row in s.points)
    text = "\n".join(lines) + "\n"
    if isinstance(dest, (str, os.PathLike)):
        with open(dest, "w", newline="") as fh:
            fh.write(text)
    else:
        dest.write(text)
